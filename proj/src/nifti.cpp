// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0
//
// NIfTI-1 single-file reader restricted to label maps: uint8, int16 or
// uint16 voxels and an axis-aligned voxel-to-world transform.

#include "nifti.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <string>

namespace phantomforge::detail {
namespace {

constexpr std::size_t kHeaderSize = 348;

class HeaderView {
 public:
  HeaderView(const unsigned char* raw, bool swapped) : raw_(raw), swapped_(swapped) {}

  std::int16_t i16(std::size_t off) const {
    std::uint16_t v;
    std::memcpy(&v, raw_ + off, 2);
    if (swapped_) v = static_cast<std::uint16_t>((v >> 8) | (v << 8));
    return static_cast<std::int16_t>(v);
  }
  std::int32_t i32(std::size_t off) const {
    std::uint32_t v;
    std::memcpy(&v, raw_ + off, 4);
    if (swapped_) v = __builtin_bswap32(v);
    return static_cast<std::int32_t>(v);
  }
  float f32(std::size_t off) const {
    std::uint32_t v;
    std::memcpy(&v, raw_ + off, 4);
    if (swapped_) v = __builtin_bswap32(v);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
  }

 private:
  const unsigned char* raw_;
  bool swapped_;
};

Affine quaternion_affine(const HeaderView& h, const std::array<double, 3>& pixdim,
                         double qfac) {
  const double b = h.f32(256);
  const double c = h.f32(260);
  const double d = h.f32(264);
  const double a = std::sqrt(std::max(0.0, 1.0 - (b * b + c * c + d * d)));
  const double r[3][3] = {
      {a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
      {2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)},
      {2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - c * c - b * b}};
  const double scale[3] = {pixdim[0], pixdim[1], pixdim[2] * qfac};
  Affine m{};
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) m[row * 4 + col] = r[row][col] * scale[col];
  }
  m[3] = h.f32(268);
  m[7] = h.f32(272);
  m[11] = h.f32(276);
  m[15] = 1.0;
  return m;
}

void require_axis_aligned(const Affine& m) {
  double scale = 0.0;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) scale = std::max(scale, std::abs(m[row * 4 + col]));
  }
  const double tol = 1e-6 * scale;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) {
      const double v = m[row * 4 + col];
      if (row == col) {
        if (std::abs(v) <= tol) {
          throw Error(ErrorCode::kFormat,
                      "NIfTI affine is not axis-aligned (zero diagonal entry); "
                      "permuted or oblique volumes must be resampled before ingest");
        }
      } else if (std::abs(v) > tol) {
        throw Error(ErrorCode::kFormat,
                    "NIfTI affine is not axis-aligned (rotation or axis permutation); "
                    "reorientation would change left/right semantics, resample the "
                    "label map to an axis-aligned grid first");
      }
    }
  }
}

}  // namespace

NiftiInfo read_nifti_header(ByteSource& src) {
  unsigned char raw[kHeaderSize];
  src.read_exact(raw, kHeaderSize, "NIfTI header");

  std::int32_t sizeof_hdr;
  std::memcpy(&sizeof_hdr, raw, 4);
  NiftiInfo info;
  if (sizeof_hdr != static_cast<std::int32_t>(kHeaderSize)) {
    if (static_cast<std::int32_t>(__builtin_bswap32(static_cast<std::uint32_t>(sizeof_hdr))) !=
        static_cast<std::int32_t>(kHeaderSize)) {
      throw Error(ErrorCode::kFormat, "not a NIfTI-1 file (sizeof_hdr != 348): " + src.path());
    }
    info.swapped = true;
  }
  if (std::memcmp(raw + 344, "n+1\0", 4) != 0) {
    throw Error(ErrorCode::kFormat,
                "unsupported NIfTI magic (only single-file \"n+1\" is accepted): " + src.path());
  }
  const HeaderView h(raw, info.swapped);

  const int ndim = h.i16(40);
  if (ndim < 3 || ndim > 7) {
    throw Error(ErrorCode::kFormat, "NIfTI dim[0] must be in 3..7, got " + std::to_string(ndim));
  }
  std::array<std::int64_t, 3> dims{};
  for (int i = 0; i < 3; ++i) {
    dims[i] = h.i16(42 + 2 * i);
    if (dims[i] <= 0) throw Error(ErrorCode::kFormat, "NIfTI dims must be positive");
  }
  for (int i = 4; i <= ndim; ++i) {
    if (h.i16(40 + 2 * i) > 1) {
      throw Error(ErrorCode::kFormat, "NIfTI volume has more than 3 non-singleton dimensions");
    }
  }

  const int datatype = h.i16(70);
  switch (datatype) {
    case 2: info.header.stored_type = StoredType::kU8; break;
    case 4: info.header.stored_type = StoredType::kI16; break;
    case 512: info.header.stored_type = StoredType::kU16; break;
    default:
      throw Error(ErrorCode::kFormat,
                  "unsupported NIfTI datatype " + std::to_string(datatype) +
                      " (label maps must be uint8, int16 or uint16)");
  }

  const double slope = h.f32(112);
  const double inter = h.f32(116);
  if (slope != 0.0 && (slope != 1.0 || inter != 0.0)) {
    throw Error(ErrorCode::kFormat, "NIfTI intensity scaling is not allowed on label maps");
  }

  const double qfac = h.f32(76) < 0.0f ? -1.0 : 1.0;
  std::array<double, 3> pixdim{};
  for (int i = 0; i < 3; ++i) {
    pixdim[i] = std::abs(static_cast<double>(h.f32(80 + 4 * i)));
    if (!(pixdim[i] > 0.0)) throw Error(ErrorCode::kFormat, "NIfTI pixdim must be positive");
  }

  Affine affine{};
  const int qform_code = h.i16(252);
  const int sform_code = h.i16(254);
  if (sform_code > 0) {
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 4; ++col) affine[row * 4 + col] = h.f32(280 + 16 * row + 4 * col);
    }
    affine[15] = 1.0;
  } else if (qform_code > 0) {
    affine = quaternion_affine(h, pixdim, qfac);
  } else {
    affine = {pixdim[0], 0, 0, 0, 0, pixdim[1], 0, 0, 0, 0, pixdim[2], 0, 0, 0, 0, 1};
  }
  require_axis_aligned(affine);

  info.header.geometry.dims = {static_cast<std::size_t>(dims[0]),
                               static_cast<std::size_t>(dims[1]),
                               static_cast<std::size_t>(dims[2])};
  info.header.geometry.spacing_mm = {pixdim[0], pixdim[1], pixdim[2]};
  info.header.geometry.origin_mm = {affine[3], affine[7], affine[11]};
  info.header.affine = affine;

  const double vox_offset = h.f32(108);
  if (vox_offset < static_cast<double>(kHeaderSize)) {
    throw Error(ErrorCode::kFormat, "NIfTI vox_offset points inside the header");
  }
  info.vox_offset = static_cast<std::size_t>(vox_offset);
  src.skip(info.vox_offset - kHeaderSize);
  return info;
}

}  // namespace phantomforge::detail
