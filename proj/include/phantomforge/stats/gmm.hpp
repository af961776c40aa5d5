// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <json.hpp>
#include <span>
#include <vector>

namespace phantomforge::stats {

struct GmmParams {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;

  std::size_t k() const { return weights.size(); }
  /// Free parameters of a 1-D mixture: k means, k variances, k-1 weights.
  std::size_t parameter_count() const { return 3 * k() - 1; }

  nlohmann::json to_json() const;
  static GmmParams from_json(const nlohmann::json& doc);
};

struct EmOptions {
  double tolerance = 1e-8;         // stop when the log-likelihood gain drops below
  int max_iterations = 500;
  double variance_floor_rel = 1e-6;  // floor = rel * var(samples)
};

/// Fits a k-component 1-D Gaussian mixture by EM. Component j starts at the
/// (j - 0.5)/k sample quantile with the sample variance and weight 1/k, so the
/// fit is deterministic and scale-equivariant. `seed` only drives the
/// re-seeding of a component whose responsibilities vanish.
/// If `trace` is non-null it receives the log-likelihood after every E-step.
/// Requires k in {1, 2, 3} and n >= 5k; throws on degenerate (constant) data.
GmmParams gmm_fit_em(std::span<const double> samples, int k, std::uint64_t seed,
                     const EmOptions& options = {}, std::vector<double>* trace = nullptr);

double gmm_density(const GmmParams& gmm, double x);
double gmm_log_likelihood(const GmmParams& gmm, std::span<const double> samples);

/// -2 log L + p ln n.
double bic(double log_likelihood, std::size_t parameter_count, std::size_t n);
double bic(const GmmParams& gmm, std::size_t n);

}  // namespace phantomforge::stats
