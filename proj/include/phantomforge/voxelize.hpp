// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "phantomforge/grid.hpp"
#include "phantomforge/mesh/mesh.hpp"

namespace phantomforge {

/// Voxel centers inside the closed surface become 1, by crossing parity along
/// one +x ray per (y, z) row. Rows whose ray touches a triangle edge or vertex
/// exactly are recast with a small deterministic offset. Throws
/// Error(kValidation) for meshes that are not watertight.
VoxelGrid voxelize_mesh(const mesh::TriangleMesh& mesh, const GridTemplate& tpl, int jobs = 1);

/// Paints masks in priority order, so ids later in `priority` win overlaps.
VoxelGrid assemble_phantom(const std::vector<std::pair<Label, VoxelGrid>>& masks,
                           const std::vector<Label>& priority);

}  // namespace phantomforge
