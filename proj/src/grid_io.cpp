// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/grid_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <string>

#include "byte_source.hpp"
#include "nifti.hpp"
#include "phantomforge/error.hpp"

namespace phantomforge {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::size_t bytes_per_voxel(StoredType t) { return t == StoredType::kU8 ? 1 : 2; }

std::uint16_t swap16(std::uint16_t v) { return static_cast<std::uint16_t>((v >> 8) | (v << 8)); }

// Converts `n` stored voxels in `raw` into labels. `swap` means the stored
// byte order differs from the host's.
void decode_voxels(const unsigned char* raw, std::size_t n, StoredType type, bool swap,
                   Label* out) {
  switch (type) {
    case StoredType::kU8:
      for (std::size_t i = 0; i < n; ++i) out[i] = raw[i];
      return;
    case StoredType::kU16:
      std::memcpy(out, raw, n * 2);
      if (swap) {
        for (std::size_t i = 0; i < n; ++i) out[i] = swap16(out[i]);
      }
      return;
    case StoredType::kI16:
      for (std::size_t i = 0; i < n; ++i) {
        std::uint16_t v;
        std::memcpy(&v, raw + 2 * i, 2);
        if (swap) v = swap16(v);
        if (static_cast<std::int16_t>(v) < 0) {
          throw Error(ErrorCode::kFormat, "int16 label volume contains negative labels");
        }
        out[i] = v;
      }
      return;
  }
}

GridHeader parse_sidecar(const fs::path& payload) {
  const fs::path side = sidecar_path(payload);
  std::ifstream in(side);
  if (!in) throw Error(ErrorCode::kNotFound, "missing sidecar " + side.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, "malformed sidecar " + side.string() + ": " + e.what());
  }
  GridHeader header;
  try {
    const auto dims = doc.at("dims").get<std::vector<long long>>();
    const auto spacing = doc.at("spacing_mm").get<std::vector<double>>();
    const auto origin = doc.value("origin_mm", std::vector<double>{0.0, 0.0, 0.0});
    if (dims.size() != 3 || spacing.size() != 3 || origin.size() != 3) {
      throw Error(ErrorCode::kFormat, "sidecar dims/spacing_mm/origin_mm must have 3 entries");
    }
    for (long long d : dims) {
      if (d <= 0) throw Error(ErrorCode::kValidation, "sidecar dims must be positive");
    }
    header.geometry.dims = {static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1]),
                            static_cast<std::size_t>(dims[2])};
    header.geometry.spacing_mm = {spacing[0], spacing[1], spacing[2]};
    header.geometry.origin_mm = {origin[0], origin[1], origin[2]};
    const std::string dtype = doc.value("dtype", std::string("u16"));
    if (dtype == "u16") {
      header.stored_type = StoredType::kU16;
    } else if (dtype == "u8") {
      header.stored_type = StoredType::kU8;
    } else {
      throw Error(ErrorCode::kFormat, "unsupported sidecar dtype \"" + dtype + "\"");
    }
    header.gzip = doc.value("gzip", false);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, "invalid sidecar " + side.string() + ": " + e.what());
  }
  header.geometry.validate();
  return header;
}

bool host_is_little() { return std::endian::native == std::endian::little; }

}  // namespace

fs::path sidecar_path(const fs::path& payload) {
  fs::path side = payload;
  side += ".json";
  return side;
}

GridFormat detect_grid_format(const fs::path& path) {
  const std::string name = path.filename().string();
  auto ends_with = [&](std::string_view suffix) {
    return name.size() >= suffix.size() &&
           name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return (ends_with(".nii") || ends_with(".nii.gz")) ? GridFormat::kNifti1
                                                      : GridFormat::kRawSidecar;
}

GridHeader read_grid_header(const fs::path& path, GridFormat format) {
  if (format == GridFormat::kRawSidecar) return parse_sidecar(path);
  if (!fs::exists(path)) throw Error(ErrorCode::kNotFound, "no such file " + path.string());
  detail::ByteSource src(path);
  return detail::read_nifti_header(src).header;
}

struct SliceReader::Impl {
  GridHeader header;
  std::unique_ptr<detail::ByteSource> src;
  bool swap = false;
  bool check_trailing = false;
  std::size_t next_slice = 0;
  std::vector<unsigned char> raw;
};

SliceReader::SliceReader(const fs::path& path, GridFormat format)
    : impl_(std::make_unique<Impl>()) {
  if (format == GridFormat::kRawSidecar) {
    impl_->header = parse_sidecar(path);
    if (!fs::exists(path)) throw Error(ErrorCode::kNotFound, "no such file " + path.string());
    impl_->src = std::make_unique<detail::ByteSource>(path);
    impl_->swap = !host_is_little();
    impl_->check_trailing = true;
  } else {
    if (!fs::exists(path)) throw Error(ErrorCode::kNotFound, "no such file " + path.string());
    impl_->src = std::make_unique<detail::ByteSource>(path);
    const detail::NiftiInfo info = detail::read_nifti_header(*impl_->src);
    impl_->header = info.header;
    impl_->swap = info.swapped;
  }
  impl_->header.geometry.validate();
}

SliceReader::~SliceReader() = default;
SliceReader::SliceReader(SliceReader&&) noexcept = default;
SliceReader& SliceReader::operator=(SliceReader&&) noexcept = default;

const GridHeader& SliceReader::header() const { return impl_->header; }

std::size_t SliceReader::slices_read() const { return impl_->next_slice; }

bool SliceReader::next(std::vector<Label>& out) {
  const Dims& d = impl_->header.geometry.dims;
  if (impl_->next_slice == d.nz) {
    if (impl_->check_trailing) {
      impl_->check_trailing = false;
      if (!impl_->src->at_end()) {
        throw Error(ErrorCode::kFormat,
                    "payload is longer than dims declare in " + impl_->src->path());
      }
    }
    return false;
  }
  const std::size_t n = d.slice_count();
  const std::size_t bytes = n * bytes_per_voxel(impl_->header.stored_type);
  impl_->raw.resize(bytes);
  const std::size_t got = impl_->src->read_some(impl_->raw.data(), bytes);
  if (got != bytes) {
    throw Error(ErrorCode::kFormat,
                "payload length does not match dims in " + impl_->src->path() + " (slice " +
                    std::to_string(impl_->next_slice) + " truncated)");
  }
  out.resize(n);
  decode_voxels(impl_->raw.data(), n, impl_->header.stored_type, impl_->swap, out.data());
  ++impl_->next_slice;
  return true;
}

VoxelGrid read_label_grid(const fs::path& path, GridFormat format) {
  SliceReader reader(path, format);
  const GridHeader header = reader.header();
  const std::size_t per = header.geometry.dims.slice_count();
  std::vector<Label> labels(header.geometry.dims.count());
  std::vector<Label> slice;
  for (std::size_t k = 0; reader.next(slice); ++k) {
    std::memcpy(labels.data() + k * per, slice.data(), per * sizeof(Label));
  }
  VoxelGrid grid(header.geometry, std::move(labels));
  if (format == GridFormat::kNifti1) grid.set_source_affine(header.affine);
  return grid;
}

VoxelGrid read_label_grid(const fs::path& path) {
  return read_label_grid(path, detect_grid_format(path));
}

void write_label_grid(const VoxelGrid& grid, const fs::path& path, bool compress) {
  grid.geometry().validate();
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::vector<Label> swapped;
  std::span<const Label> labels = grid.labels();
  if (!host_is_little()) {
    swapped.assign(labels.begin(), labels.end());
    for (auto& v : swapped) v = swap16(v);
    labels = swapped;
  }
  const auto* bytes = reinterpret_cast<const char*>(labels.data());
  const std::size_t total = labels.size() * sizeof(Label);

  if (compress) {
    gzFile out = gzopen(path.string().c_str(), "wb6");
    if (out == nullptr) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    std::size_t done = 0;
    while (done < total) {
      const std::size_t chunk = std::min<std::size_t>(total - done, 1u << 28);
      if (gzwrite(out, bytes + done, static_cast<unsigned>(chunk)) != static_cast<int>(chunk)) {
        gzclose(out);
        throw Error(ErrorCode::kIo, "gzip write failed for " + path.string());
      }
      done += chunk;
    }
    if (gzclose(out) != Z_OK) throw Error(ErrorCode::kIo, "gzip close failed for " + path.string());
  } else {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    out.write(bytes, static_cast<std::streamsize>(total));
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
  }

  const GridTemplate& g = grid.geometry();
  json side = {
      {"dims", {g.dims.nx, g.dims.ny, g.dims.nz}},
      {"spacing_mm", {g.spacing_mm[0], g.spacing_mm[1], g.spacing_mm[2]}},
      {"origin_mm", {g.origin_mm[0], g.origin_mm[1], g.origin_mm[2]}},
      {"dtype", "u16"},
      {"gzip", compress},
  };
  std::ofstream out(sidecar_path(path), std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write sidecar for " + path.string());
  out << side.dump(2) << '\n';
}

}  // namespace phantomforge
