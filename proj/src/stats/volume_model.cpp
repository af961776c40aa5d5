// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/stats/volume_model.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numbers>
#include <random>

#include "phantomforge/error.hpp"
#include "phantomforge/stats/sample.hpp"

namespace phantomforge::stats {
namespace {

using nlohmann::json;

constexpr double kIqrToSigma = 1.349;
constexpr double kMadToSigma = 1.4826;
constexpr std::uint64_t kDipStream = 0xD1Bull;

UnimodalParams robust_params(const std::vector<double>& sorted) {
  UnimodalParams p;
  p.median = quantile_sorted(sorted, 0.5);
  p.q1 = quantile_sorted(sorted, 0.25);
  p.q3 = quantile_sorted(sorted, 0.75);
  p.robust_sigma = (p.q3 - p.q1) / kIqrToSigma;
  if (p.robust_sigma <= 0.0) {
    // Heavy ties inside the IQR: fall back to MAD, then the plain deviation.
    std::vector<double> dev;
    dev.reserve(sorted.size());
    for (double v : sorted) dev.push_back(std::abs(v - p.median));
    std::sort(dev.begin(), dev.end());
    p.robust_sigma = kMadToSigma * quantile_sorted(dev, 0.5);
    if (p.robust_sigma <= 0.0) p.robust_sigma = sample_stddev(sorted);
  }
  return p;
}

}  // namespace

std::vector<double> mixture_density_levels(const GmmParams& gmm, std::uint64_t seed, int draws) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> cumulative(gmm.k());
  double acc = 0.0;
  for (std::size_t j = 0; j < gmm.k(); ++j) cumulative[j] = acc += gmm.weights[j];
  std::vector<double> levels;
  levels.reserve(static_cast<std::size_t>(draws));
  for (int i = 0; i < draws; ++i) {
    const double u = uniform(rng) * acc;
    std::size_t j = 0;
    while (j + 1 < gmm.k() && u >= cumulative[j]) ++j;
    const double z = normal(rng);
    const double x = gmm.means[j] + std::sqrt(gmm.variances[j]) * z;
    levels.push_back(gmm_density(gmm, x));
  }
  std::sort(levels.begin(), levels.end());
  return levels;
}

VolumeModel fit_volume_model(std::span<const double> samples, Label structure_id,
                             const ModelConfig& config) {
  VolumeModel m;
  m.structure_id = structure_id;
  m.n_samples = samples.size();
  m.mc_seed = mix_seed(config.base_seed, structure_id);
  m.fitted = true;

  std::vector<double> nonzero;
  for (double v : samples) {
    if (v < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative volume in cohort samples");
    if (v > 0.0) nonzero.push_back(v);
  }
  std::sort(nonzero.begin(), nonzero.end());
  m.n_nonzero = nonzero.size();
  m.zero_prevalence =
      samples.empty() ? 1.0
                      : static_cast<double>(samples.size() - nonzero.size()) /
                            static_cast<double>(samples.size());
  if (nonzero.empty()) return m;

  if (nonzero.size() < config.min_samples) {
    UnimodalParams p = robust_params(nonzero);
    p.robust_sigma = std::max({2.0 * p.robust_sigma, 2.0 * sample_stddev(nonzero),
                               0.25 * std::abs(p.median)});
    m.unimodal = p;
    m.low_confidence = true;
    return m;
  }

  const double d = dip_statistic(nonzero);
  const double p_value = dip_pvalue(d, nonzero.size(), config.bootstrap_b,
                                    mix_seed(config.base_seed, kDipStream), config.dip_reference);
  m.dip = DipResult{d, p_value};

  if (p_value < config.dip_alpha) {
    m.kind = ModelKind::kMultimodal;
    std::optional<GmmParams> best;
    double best_bic = 0.0;
    for (int k = 2; k <= 3; ++k) {
      if (nonzero.size() < static_cast<std::size_t>(5 * k)) break;
      GmmParams g = gmm_fit_em(nonzero, k, mix_seed(m.mc_seed, static_cast<std::uint64_t>(k)),
                               config.em);
      const double b = bic(g, nonzero.size());
      if (!best || b < best_bic) {
        best = std::move(g);
        best_bic = b;
      }
    }
    m.gmm = std::move(best);
    m.mc_draws = config.mc_draws;
    m.mc_densities = std::make_shared<const std::vector<double>>(
        mixture_density_levels(*m.gmm, m.mc_seed, m.mc_draws));
  } else {
    m.unimodal = robust_params(nonzero);
  }
  return m;
}

double outlier_probability(const VolumeModel& model, double x) {
  if (!model.fitted) throw Error(ErrorCode::kInvalidState, "volume model is not fitted");
  if (x < 0.0) throw Error(ErrorCode::kInvalidArgument, "volumes cannot be negative");
  if (x == 0.0) return 1.0 - model.zero_prevalence;
  if (model.n_nonzero == 0) return 1.0;

  if (model.kind == ModelKind::kMultimodal) {
    if (!model.gmm || !model.mc_densities || model.mc_densities->empty()) {
      throw Error(ErrorCode::kInvalidState, "multimodal model without mixture parameters");
    }
    const double level = gmm_density(*model.gmm, x);
    const auto& levels = *model.mc_densities;
    const auto first_gt = std::upper_bound(levels.begin(), levels.end(), level);
    return static_cast<double>(levels.end() - first_gt) / static_cast<double>(levels.size());
  }

  const UnimodalParams& p = *model.unimodal;
  const double dev = std::abs(x - p.median);
  if (p.robust_sigma <= 0.0) return dev == 0.0 ? 0.0 : 1.0;
  // 2 Phi(z) - 1
  return std::erf(dev / (p.robust_sigma * std::numbers::sqrt2));
}

json VolumeModel::to_json() const {
  json doc = {{"structure_id", structure_id},
              {"n_samples", n_samples},
              {"n_nonzero", n_nonzero},
              {"zero_prevalence", zero_prevalence},
              {"kind", kind == ModelKind::kMultimodal ? "multimodal" : "unimodal"},
              {"mc_seed", mc_seed},
              {"mc_draws", mc_draws},
              {"low_confidence", low_confidence},
              {"fitted", fitted}};
  doc["dip"] = dip ? json{{"statistic", dip->statistic}, {"p_value", dip->p_value}} : json(nullptr);
  doc["unimodal_params"] = unimodal ? json{{"median", unimodal->median},
                                           {"robust_sigma", unimodal->robust_sigma},
                                           {"q1", unimodal->q1},
                                           {"q3", unimodal->q3}}
                                    : json(nullptr);
  doc["gmm_params"] = gmm ? gmm->to_json() : json(nullptr);
  return doc;
}

VolumeModel VolumeModel::from_json(const json& doc) {
  try {
    VolumeModel m;
    m.structure_id = doc.at("structure_id").get<Label>();
    m.n_samples = doc.at("n_samples").get<std::size_t>();
    m.n_nonzero = doc.at("n_nonzero").get<std::size_t>();
    m.zero_prevalence = doc.at("zero_prevalence").get<double>();
    m.kind = doc.at("kind").get<std::string>() == "multimodal" ? ModelKind::kMultimodal
                                                               : ModelKind::kUnimodal;
    m.mc_seed = doc.at("mc_seed").get<std::uint64_t>();
    m.mc_draws = doc.at("mc_draws").get<int>();
    m.low_confidence = doc.at("low_confidence").get<bool>();
    m.fitted = doc.at("fitted").get<bool>();
    if (!doc.at("dip").is_null()) {
      m.dip = DipResult{doc["dip"].at("statistic").get<double>(),
                        doc["dip"].at("p_value").get<double>()};
    }
    if (!doc.at("unimodal_params").is_null()) {
      const json& u = doc["unimodal_params"];
      m.unimodal = UnimodalParams{u.at("median").get<double>(), u.at("robust_sigma").get<double>(),
                                  u.at("q1").get<double>(), u.at("q3").get<double>()};
    }
    if (!doc.at("gmm_params").is_null()) {
      m.gmm = GmmParams::from_json(doc["gmm_params"]);
      m.mc_densities = std::make_shared<const std::vector<double>>(
          mixture_density_levels(*m.gmm, m.mc_seed, m.mc_draws));
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed volume model: ") + e.what());
  }
}

}  // namespace phantomforge::stats
