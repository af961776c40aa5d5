// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <json.hpp>
#include <optional>
#include <span>
#include <vector>

#include "phantomforge/grid.hpp"
#include "phantomforge/stats/dip.hpp"
#include "phantomforge/stats/gmm.hpp"

namespace phantomforge::stats {

enum class ModelKind { kUnimodal, kMultimodal };

struct ModelConfig {
  double dip_alpha = 0.05;
  int bootstrap_b = 2000;
  DipReference dip_reference = DipReference::kNormal;
  std::size_t min_samples = 20;  // nonzero samples below this give a low-confidence model
  int mc_draws = 10000;
  std::uint64_t base_seed = 20240501;
  EmOptions em;
};

struct UnimodalParams {
  double median = 0.0;
  double robust_sigma = 0.0;  // IQR / 1.349
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Population model of one structure's volume across a cohort.
struct VolumeModel {
  Label structure_id = 0;
  std::size_t n_samples = 0;
  std::size_t n_nonzero = 0;
  double zero_prevalence = 0.0;
  std::optional<DipResult> dip;
  ModelKind kind = ModelKind::kUnimodal;
  std::optional<UnimodalParams> unimodal;
  std::optional<GmmParams> gmm;
  std::uint64_t mc_seed = 0;
  int mc_draws = 0;
  bool low_confidence = false;
  bool fitted = false;

  /// Sorted mixture densities of the Monte Carlo draws (multimodal only).
  std::shared_ptr<const std::vector<double>> mc_densities;

  nlohmann::json to_json() const;
  /// Rebuilds the Monte Carlo cache from (gmm, mc_seed, mc_draws).
  static VolumeModel from_json(const nlohmann::json& doc);
};

/// Zeros are split off into zero_prevalence. With >= min_samples nonzero
/// values the dip test picks the branch: p < alpha fits a GMM (k = 2 or 3 by
/// BIC), otherwise median / IQR. Fewer nonzero values give a widened
/// unimodal model marked low_confidence; none at all gives no distribution.
VolumeModel fit_volume_model(std::span<const double> samples, Label structure_id,
                             const ModelConfig& config);

/// Highest-density-region level Pr[f(X) > f(x)] under the model.
/// x == 0 scores 1 - zero_prevalence. Throws Error(kInvalidState) for an
/// unfitted model and Error(kInvalidArgument) for negative volumes.
double outlier_probability(const VolumeModel& model, double x);

/// Draws `draws` samples from the mixture with `seed` and returns their sorted
/// densities.
std::vector<double> mixture_density_levels(const GmmParams& gmm, std::uint64_t seed, int draws);

}  // namespace phantomforge::stats
