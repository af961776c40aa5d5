// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <json.hpp>
#include <set>
#include <string>

#include "phantomforge/grid.hpp"
#include "phantomforge/grid_io.hpp"
#include "phantomforge/taxonomy.hpp"

namespace phantomforge {

/// Per-structure voxel counts and volumes of one grid.
struct VolumeTable {
  Dims dims;
  Vec3 spacing_mm{1.0, 1.0, 1.0};
  std::uint64_t total_voxels = 0;
  std::map<Label, std::uint64_t> counts;          // every taxonomy id, zeros included
  std::map<Label, std::uint64_t> unknown_counts;  // nonzero labels outside the taxonomy

  double voxel_volume_mm3() const { return spacing_mm[0] * spacing_mm[1] * spacing_mm[2]; }

  /// count * sx*sy*sz / 1000. Ids outside the table have volume 0.
  double volume_ml(Label id) const;
  std::uint64_t count(Label id) const;

  std::map<Label, double> volumes_ml() const;

  /// `structure_id,name,volume_ml`, one row per taxonomy structure.
  std::string to_csv(const Taxonomy& taxonomy) const;
  nlohmann::json to_json() const;
  static VolumeTable from_json(const nlohmann::json& doc);

  bool operator==(const VolumeTable&) const = default;
};

/// Single pass over the labels.
VolumeTable structure_volumes(const VoxelGrid& grid, const Taxonomy& taxonomy);

/// Same tally streamed from disk one z-slice at a time.
VolumeTable structure_volumes(const std::filesystem::path& path, GridFormat format,
                              const Taxonomy& taxonomy);

/// Per-slice tallies merged associatively; identical to the single pass for any
/// job count.
VolumeTable structure_volumes_parallel(const VoxelGrid& grid, const Taxonomy& taxonomy, int jobs);

/// |{id in expected : volume(id) == 0}| / |expected|. Throws on an empty set.
double zero_volume_fraction(const VolumeTable& table, const std::set<Label>& expected);
double zero_volume_fraction(const std::map<Label, double>& volumes_ml,
                            const std::set<Label>& expected);

/// 2|A and B| / (|A| + |B|) over nonzero voxels; 1.0 when both are empty.
/// Throws Error(kDimensionMismatch) when dims differ.
double dice(const VoxelGrid& a, const VoxelGrid& b);

}  // namespace phantomforge
