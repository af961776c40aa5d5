// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "phantomforge/catalog/records.hpp"

namespace phantomforge::catalog {

struct MomentStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // sample deviation, 0 when n == 1
};
MomentStats moments(const std::vector<double>& values);

struct DemographicsSummary {
  std::size_t phantoms = 0;
  std::map<std::string, std::size_t> sex_counts;
  double age_bin_years = 5.0;
  std::map<std::string, std::map<int, std::size_t>> age_histogram;  // race -> bin start -> count
  std::map<std::string, MomentStats> age_by_sex;
  double height_bin_m = 0.05;
  double weight_bin_kg = 5.0;
  std::map<std::pair<int, int>, std::size_t> height_weight;  // (height bin, weight bin) -> count
  std::size_t missing_height_weight = 0;

  nlohmann::json to_json() const;
};

struct StructureVolumeStats {
  Label id = 0;
  std::string name;
  std::size_t phantoms = 0;
  MomentStats volume_ml;  // zeros excluded
  double missing_fraction = 0.0;
};

/// Over the given manifests, which callers restrict to accepted phantoms.
/// Throws Error(kInsufficientData) when there are none.
DemographicsSummary demographics_summary(const std::vector<PhantomManifest>& manifests);
std::vector<StructureVolumeStats> volume_summary(const std::vector<PhantomManifest>& manifests,
                                                 const Taxonomy& taxonomy);
nlohmann::json to_json(const std::vector<StructureVolumeStats>& stats);

}  // namespace phantomforge::catalog
