// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/catalog/png.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>

#include "phantomforge/error.hpp"

namespace phantomforge::catalog {
namespace {

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v >> 24));
  out.push_back(static_cast<char>(v >> 16));
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v));
}

void chunk(std::string& out, const char* type, const std::string& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  out += body;
  put_u32(out, static_cast<std::uint32_t>(
                   crc32(0, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()))));
}

}  // namespace

std::string encode_png(const RgbImage& image) {
  if (image.width == 0 || image.height == 0 || image.pixels.size() != image.width * image.height * 3) {
    throw Error(ErrorCode::kInvalidArgument, "PNG image has inconsistent size");
  }
  std::string raw;
  raw.reserve(image.height * (image.width * 3 + 1));
  for (std::size_t y = 0; y < image.height; ++y) {
    raw.push_back('\0');  // filter: none
    raw.append(reinterpret_cast<const char*>(image.pixels.data() + y * image.width * 3), image.width * 3);
  }
  uLongf packed_len = compressBound(static_cast<uLong>(raw.size()));
  std::string packed(packed_len, '\0');
  if (compress2(reinterpret_cast<Bytef*>(packed.data()), &packed_len,
                reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                Z_BEST_COMPRESSION) != Z_OK) {
    throw Error(ErrorCode::kIo, "PNG compression failed");
  }
  packed.resize(packed_len);

  std::string png("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(image.width));
  put_u32(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr += std::string("\x08\x02\x00\x00\x00", 5);  // 8-bit RGB, deflate, no filter, no interlace
  chunk(png, "IHDR", ihdr);
  chunk(png, "IDAT", packed);
  chunk(png, "IEND", "");
  return png;
}

std::string_view to_string(ProjectionAxis axis) {
  switch (axis) {
    case ProjectionAxis::kAxial:
      return "axial";
    case ProjectionAxis::kCoronal:
      return "coronal";
    case ProjectionAxis::kSagittal:
      return "sagittal";
  }
  return "axial";
}

ProjectionAxis parse_projection_axis(std::string_view text) {
  for (ProjectionAxis a : kProjectionAxes) {
    if (to_string(a) == text) return a;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "preview axis must be axial, coronal or sagittal (got \"" + std::string(text) + "\")");
}

std::array<std::uint8_t, 3> label_color(Label label) {
  if (label == 0) return {0, 0, 0};
  // Golden-angle hue walk, fixed saturation and value.
  const double h = std::fmod(static_cast<double>(label) * 137.50776405, 360.0) / 60.0;
  const double c = 0.85 * 0.95;
  const double x = c * (1.0 - std::abs(std::fmod(h, 2.0) - 1.0));
  const double m = 0.95 - c;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  auto byte = [&](double v) { return static_cast<std::uint8_t>(std::lround((v + m) * 255.0)); };
  return {byte(r), byte(g), byte(b)};
}

RgbImage max_label_projection(const VoxelGrid& grid, ProjectionAxis axis) {
  const Dims d = grid.dims();
  std::size_t w = 0, h = 0;
  switch (axis) {
    case ProjectionAxis::kAxial: w = d.nx; h = d.ny; break;
    case ProjectionAxis::kCoronal: w = d.nx; h = d.nz; break;
    case ProjectionAxis::kSagittal: w = d.ny; h = d.nz; break;
  }
  std::vector<Label> proj(w * h, 0);
  for (std::size_t k = 0; k < d.nz; ++k) {
    for (std::size_t j = 0; j < d.ny; ++j) {
      for (std::size_t i = 0; i < d.nx; ++i) {
        const Label v = grid.at(i, j, k);
        if (v == 0) continue;
        std::size_t px = 0;
        switch (axis) {
          case ProjectionAxis::kAxial: px = j * w + i; break;
          case ProjectionAxis::kCoronal: px = (d.nz - 1 - k) * w + i; break;
          case ProjectionAxis::kSagittal: px = (d.nz - 1 - k) * w + j; break;
        }
        proj[px] = std::max(proj[px], v);
      }
    }
  }
  RgbImage img{w, h, std::vector<std::uint8_t>(w * h * 3)};
  for (std::size_t p = 0; p < proj.size(); ++p) {
    const auto c = label_color(proj[p]);
    std::copy(c.begin(), c.end(), img.pixels.begin() + static_cast<std::ptrdiff_t>(3 * p));
  }
  return img;
}

}  // namespace phantomforge::catalog
