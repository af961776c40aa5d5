// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace phantomforge {

using Vec3 = std::array<double, 3>;
using Label = std::uint16_t;

struct Dims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 0;

  std::size_t count() const { return nx * ny * nz; }
  std::size_t slice_count() const { return nx * ny; }
  bool operator==(const Dims&) const = default;
};

/// Geometry of a voxel grid without its labels. The origin is the physical
/// position of the center of voxel (0, 0, 0); voxel (i, j, k) sits at
/// origin + (i, j, k) * spacing.
struct GridTemplate {
  Dims dims;
  Vec3 spacing_mm{1.0, 1.0, 1.0};
  Vec3 origin_mm{0.0, 0.0, 0.0};

  /// Throws Error(kValidation) on zero dims or non-positive spacing.
  void validate() const;

  double voxel_volume_mm3() const {
    return spacing_mm[0] * spacing_mm[1] * spacing_mm[2];
  }

  Vec3 voxel_center(std::size_t i, std::size_t j, std::size_t k) const {
    return {origin_mm[0] + static_cast<double>(i) * spacing_mm[0],
            origin_mm[1] + static_cast<double>(j) * spacing_mm[1],
            origin_mm[2] + static_cast<double>(k) * spacing_mm[2]};
  }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return i + dims.nx * (j + dims.ny * k);
  }

  bool operator==(const GridTemplate&) const = default;
};

/// Row-major 4x4 voxel-to-world affine as found in a NIfTI header.
using Affine = std::array<double, 16>;

/// Axis-aligned multi-label volume, x fastest, then y, then z.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  /// All-zero grid.
  explicit VoxelGrid(GridTemplate geometry);
  /// Throws Error(kValidation) if labels.size() != dims.count().
  VoxelGrid(GridTemplate geometry, std::vector<Label> labels);

  const GridTemplate& geometry() const { return geometry_; }
  const Dims& dims() const { return geometry_.dims; }
  const Vec3& spacing() const { return geometry_.spacing_mm; }
  const Vec3& origin() const { return geometry_.origin_mm; }

  std::span<const Label> labels() const { return labels_; }
  std::span<Label> labels() { return labels_; }

  Label at(std::size_t i, std::size_t j, std::size_t k) const {
    return labels_[geometry_.index(i, j, k)];
  }
  void set(std::size_t i, std::size_t j, std::size_t k, Label value) {
    labels_[geometry_.index(i, j, k)] = value;
  }

  std::span<const Label> slice(std::size_t k) const {
    const std::size_t n = geometry_.dims.slice_count();
    return std::span<const Label>(labels_).subspan(k * n, n);
  }

  /// Affine of the file this grid was read from, when the source carried one.
  const std::optional<Affine>& source_affine() const { return source_affine_; }
  void set_source_affine(std::optional<Affine> affine) { source_affine_ = affine; }

  bool operator==(const VoxelGrid& other) const {
    return geometry_ == other.geometry_ && labels_ == other.labels_;
  }

 private:
  GridTemplate geometry_;
  std::vector<Label> labels_;
  std::optional<Affine> source_affine_;
};

/// Binary mask (labels in {0, 1}) of the voxels equal to `structure_id`.
/// An absent id yields an all-zero mask.
VoxelGrid extract_mask(const VoxelGrid& grid, Label structure_id);

/// Inclusive voxel bounding box of the nonzero labels; nullopt when empty.
struct VoxelBox {
  std::array<std::size_t, 3> lo;
  std::array<std::size_t, 3> hi;
};
std::optional<VoxelBox> nonzero_bounds(const VoxelGrid& grid);

}  // namespace phantomforge
