// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/stats/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <json.hpp>
#include <numbers>
#include <random>

#include "phantomforge/error.hpp"
#include "phantomforge/stats/sample.hpp"

namespace phantomforge::stats {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // 0.5 * ln(2 pi)

double log_normal_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -kLogSqrt2Pi - 0.5 * std::log(variance) - 0.5 * d * d / variance;
}

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : v) s += std::exp(t - m);
  return m + std::log(s);
}

}  // namespace

nlohmann::json GmmParams::to_json() const {
  return {{"k", k()},
          {"weights", weights},
          {"means", means},
          {"variances", variances},
          {"log_likelihood", log_likelihood},
          {"iterations", iterations},
          {"converged", converged}};
}

GmmParams GmmParams::from_json(const nlohmann::json& doc) {
  GmmParams g;
  g.weights = doc.at("weights").get<std::vector<double>>();
  g.means = doc.at("means").get<std::vector<double>>();
  g.variances = doc.at("variances").get<std::vector<double>>();
  g.log_likelihood = doc.value("log_likelihood", 0.0);
  g.iterations = doc.value("iterations", 0);
  g.converged = doc.value("converged", false);
  if (g.means.size() != g.weights.size() || g.variances.size() != g.weights.size()) {
    throw Error(ErrorCode::kFormat, "GMM parameter arrays differ in length");
  }
  return g;
}

double gmm_density(const GmmParams& gmm, double x) {
  double f = 0.0;
  for (std::size_t j = 0; j < gmm.k(); ++j) {
    f += gmm.weights[j] * std::exp(log_normal_pdf(x, gmm.means[j], gmm.variances[j]));
  }
  return f;
}

double gmm_log_likelihood(const GmmParams& gmm, std::span<const double> samples) {
  std::vector<double> terms(gmm.k());
  double ll = 0.0;
  for (double x : samples) {
    for (std::size_t j = 0; j < gmm.k(); ++j) {
      terms[j] = std::log(gmm.weights[j]) + log_normal_pdf(x, gmm.means[j], gmm.variances[j]);
    }
    ll += log_sum_exp(terms);
  }
  return ll;
}

double bic(double log_likelihood, std::size_t parameter_count, std::size_t n) {
  return -2.0 * log_likelihood +
         static_cast<double>(parameter_count) * std::log(static_cast<double>(n));
}

double bic(const GmmParams& gmm, std::size_t n) {
  return bic(gmm.log_likelihood, gmm.parameter_count(), n);
}

GmmParams gmm_fit_em(std::span<const double> samples, int k, std::uint64_t seed,
                     const EmOptions& options, std::vector<double>* trace) {
  if (k < 1 || k > 3) throw Error(ErrorCode::kInvalidArgument, "GMM k must be 1, 2 or 3");
  const std::size_t n = samples.size();
  const std::size_t kk = static_cast<std::size_t>(k);
  if (n < 5 * kk) {
    throw Error(ErrorCode::kInsufficientData,
                "GMM with k=" + std::to_string(k) + " needs at least " + std::to_string(5 * k) +
                    " samples");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double total_var = variance(sorted);
  if (!(total_var > 0.0)) {
    throw Error(ErrorCode::kInsufficientData, "GMM fit on degenerate (constant) samples");
  }
  const double floor = options.variance_floor_rel * total_var;

  GmmParams g;
  g.weights.assign(kk, 1.0 / static_cast<double>(k));
  g.variances.assign(kk, total_var);
  for (std::size_t j = 0; j < kk; ++j) {
    g.means.push_back(quantile_sorted(sorted, (static_cast<double>(j) + 0.5) / k));
  }

  std::mt19937_64 rng(seed);
  std::vector<double> resp(n * kk);
  std::vector<double> terms(kk);
  double previous = -std::numeric_limits<double>::infinity();
  if (trace != nullptr) trace->clear();

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    // E-step; also yields the log-likelihood of the current parameters.
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < kk; ++j) {
        terms[j] = std::log(g.weights[j]) + log_normal_pdf(samples[i], g.means[j], g.variances[j]);
      }
      const double lse = log_sum_exp(terms);
      ll += lse;
      for (std::size_t j = 0; j < kk; ++j) resp[i * kk + j] = std::exp(terms[j] - lse);
    }
    if (trace != nullptr) trace->push_back(ll);
    g.log_likelihood = ll;
    g.iterations = iter;
    if (ll - previous < options.tolerance) {
      g.converged = true;
      break;
    }
    previous = ll;

    // M-step.
    for (std::size_t j = 0; j < kk; ++j) {
      double nk = 0.0;
      double sx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += resp[i * kk + j];
        sx += resp[i * kk + j] * samples[i];
      }
      if (nk < 1e-12 * static_cast<double>(n)) {
        // Collapsed component: restart it on a random sample point.
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        g.means[j] = samples[pick(rng)];
        g.variances[j] = total_var;
        g.weights[j] = 1.0 / static_cast<double>(n);
        continue;
      }
      const double mean = sx / nk;
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = samples[i] - mean;
        ss += resp[i * kk + j] * d * d;
      }
      g.means[j] = mean;
      g.variances[j] = std::max(ss / nk, floor);
      g.weights[j] = nk / static_cast<double>(n);
    }
    double wsum = 0.0;
    for (double w : g.weights) wsum += w;
    for (double& w : g.weights) w /= wsum;
  }
  return g;
}

}  // namespace phantomforge::stats
