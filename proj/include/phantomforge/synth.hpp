// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "phantomforge/catalog/records.hpp"
#include "phantomforge/qc.hpp"

namespace phantomforge::synth {

struct SynthOptions {
  std::size_t scans = 200;
  std::size_t symmetry_defects = 5;  // three discrepant pairs each
  std::size_t truncations = 4;       // about 40 structures zeroed each
  std::size_t triple_outliers = 3;   // three structures at 3x nominal each
  std::size_t duplicate_pairs = 10;  // patients with two scans
  double gallbladder_missing = 0.16;
  double spread = 0.2;               // healthy volumes span nominal * (1 +- spread)
  double male_fraction = 0.5;
  double male_age_mean = 64.9, male_age_sd = 14.0;
  double female_age_mean = 61.2, female_age_sd = 15.6;
  double missing_habitus = 0.05;     // fraction without height/weight
  Vec3 spacing_mm{1.0, 1.0, 1.0};
  std::uint64_t seed = 7;
};

enum class Planted { kHealthy, kSymmetry, kTruncation, kOutlier };
std::string_view to_string(Planted p);

struct SynthScan {
  catalog::ScanMetadata meta;
  std::map<Label, std::uint32_t> counts;  // voxels per structure, zeros included
  Planted planted = Planted::kHealthy;

  std::map<Label, double> volumes_ml(const Vec3& spacing_mm) const;
};

struct SynthCohort {
  SynthOptions options;
  std::vector<SynthScan> scans;
  std::vector<std::string> symmetry_ids;
  std::vector<std::string> truncation_ids;
  std::vector<std::string> outlier_ids;
  std::map<std::string, std::vector<std::string>> duplicate_patients;
  std::vector<std::string> gallbladder_missing_ids;

  std::vector<CohortScan> cohort() const;
  nlohmann::json truth_json() const;
};

/// Seeded cohort. Healthy volumes are stratified: for each structure the scans
/// take evenly spaced values across nominal * (1 +- spread) in a random order,
/// so no healthy value sits in a tail.
SynthCohort synth_cohort(const Taxonomy& taxonomy, const SynthOptions& options);

/// Label grid realizing exactly the scan's voxel counts.
VoxelGrid synth_grid(const SynthScan& scan, const Vec3& spacing_mm);

/// Writes volumes/<scan_id>.lvol(+json), meta.csv and truth.json under `dir`.
void write_fixture(const SynthCohort& cohort, const std::filesystem::path& dir, bool compress = true);

/// Normal quantile, by bisection on the CDF.
double normal_quantile(double p);

}  // namespace phantomforge::synth
