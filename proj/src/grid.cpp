// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phantomforge/error.hpp"
#include "phantomforge/simd/kernels.hpp"

namespace phantomforge {

void GridTemplate::validate() const {
  if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0) {
    throw Error(ErrorCode::kValidation, "grid dims must be positive");
  }
  for (double s : spacing_mm) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::kValidation, "grid spacing must be positive and finite");
    }
  }
  for (double o : origin_mm) {
    if (!std::isfinite(o)) throw Error(ErrorCode::kValidation, "grid origin must be finite");
  }
}

VoxelGrid::VoxelGrid(GridTemplate geometry) : geometry_(geometry) {
  geometry_.validate();
  labels_.assign(geometry_.dims.count(), 0);
}

VoxelGrid::VoxelGrid(GridTemplate geometry, std::vector<Label> labels)
    : geometry_(geometry), labels_(std::move(labels)) {
  geometry_.validate();
  if (labels_.size() != geometry_.dims.count()) {
    throw Error(ErrorCode::kValidation,
                "label count " + std::to_string(labels_.size()) + " does not match dims (" +
                    std::to_string(geometry_.dims.count()) + " voxels)");
  }
}

VoxelGrid extract_mask(const VoxelGrid& grid, Label structure_id) {
  if (structure_id == 0) {
    throw Error(ErrorCode::kInvalidArgument, "structure id 0 is background");
  }
  std::vector<Label> mask(grid.labels().size());
  simd::kernels().mask_equal_u16(grid.labels().data(), mask.size(), structure_id,
                                 mask.data());
  return VoxelGrid(grid.geometry(), std::move(mask));
}

std::optional<VoxelBox> nonzero_bounds(const VoxelGrid& grid) {
  const Dims& d = grid.dims();
  VoxelBox box{{d.nx, d.ny, d.nz}, {0, 0, 0}};
  bool any = false;
  auto labels = grid.labels();
  for (std::size_t k = 0; k < d.nz; ++k) {
    for (std::size_t j = 0; j < d.ny; ++j) {
      const Label* row = labels.data() + d.nx * (j + d.ny * k);
      std::size_t first = d.nx;
      std::size_t last = 0;
      for (std::size_t i = 0; i < d.nx; ++i) {
        if (row[i] != 0) {
          first = std::min(first, i);
          last = i;
        }
      }
      if (first == d.nx) continue;
      any = true;
      box.lo = {std::min(box.lo[0], first), std::min(box.lo[1], j), std::min(box.lo[2], k)};
      box.hi = {std::max(box.hi[0], last), std::max(box.hi[1], j), std::max(box.hi[2], k)};
    }
  }
  if (!any) return std::nullopt;
  return box;
}

}  // namespace phantomforge
