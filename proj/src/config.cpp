// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <toml.hpp>

#include "phantomforge/error.hpp"

namespace phantomforge {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, std::set<std::string> known) {
  if (!obj.is_object()) throw Error(ErrorCode::kValidation, where + " must be a table/object");
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) {
      throw Error(ErrorCode::kValidation, "unknown config key " + where + "." + key);
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj[key].get<T>();
}

void check(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kValidation, "config: " + what);
}

}  // namespace

void PipelineConfig::validate() const {
  const QcThresholds& t = thresholds;
  check(t.min_age_years >= 0.0, "thresholds.min_age_years must be >= 0");
  check(t.symmetry_rel_diff >= 0.0 && t.symmetry_rel_diff <= 1.0,
        "thresholds.symmetry_rel_diff must be in [0, 1]");
  check(t.max_symmetry_discrepancies >= 0, "thresholds.max_symmetry_discrepancies must be >= 0");
  check(t.zero_volume_max >= 0.0 && t.zero_volume_max <= 1.0,
        "thresholds.zero_volume_max must be in [0, 1]");
  check(t.outlier_threshold > 0.0 && t.outlier_threshold < 1.0,
        "thresholds.outlier_threshold must be in (0, 1)");
  check(t.max_flagged_organs >= 0, "thresholds.max_flagged_organs must be >= 0");
  check(t.min_cohort_scans >= 4, "thresholds.min_cohort_scans must be >= 4");
  check(model.dip_alpha > 0.0 && model.dip_alpha < 1.0, "thresholds.dip_alpha must be in (0, 1)");
  check(model.bootstrap_b >= 200, "model.bootstrap_b must be >= 200");
  check(model.min_samples >= 4, "model.min_nonzero_samples must be >= 4");
  check(model.mc_draws >= 100, "model.mc_draws must be >= 100");
  check(model.em.tolerance > 0.0, "model.em_tolerance must be > 0");
  check(model.em.max_iterations >= 1, "model.em_max_iterations must be >= 1");
  check(model.em.variance_floor_rel > 0.0, "model.variance_floor_rel must be > 0");
  check(smoothing.lambda >= 0.0 && smoothing.lambda <= 1.0, "smoothing.lambda must be in [0, 1]");
  check(smoothing.iterations >= 0, "smoothing.iterations must be >= 0");
  check(review.rating_min >= 0 && review.rating_min <= review.rating_max,
        "review.rating_min must be <= review.rating_max");
}

json PipelineConfig::to_json() const {
  json doc = {
      {"thresholds",
       {{"min_age_years", thresholds.min_age_years},
        {"symmetry_rel_diff", thresholds.symmetry_rel_diff},
        {"max_symmetry_discrepancies", thresholds.max_symmetry_discrepancies},
        {"zero_volume_max", thresholds.zero_volume_max},
        {"outlier_threshold", thresholds.outlier_threshold},
        {"max_flagged_organs", thresholds.max_flagged_organs},
        {"min_cohort_scans", thresholds.min_cohort_scans},
        {"dip_alpha", model.dip_alpha}}},
      {"model",
       {{"bootstrap_b", model.bootstrap_b},
        {"dip_reference", stats::to_string(model.dip_reference)},
        {"min_nonzero_samples", model.min_samples},
        {"mc_draws", model.mc_draws},
        {"em_tolerance", model.em.tolerance},
        {"em_max_iterations", model.em.max_iterations},
        {"variance_floor_rel", model.em.variance_floor_rel}}},
      {"smoothing", {{"lambda", smoothing.lambda}, {"iterations", smoothing.iterations}}},
      {"seeds", {{"base", model.base_seed}}},
      {"review", {{"rating_min", review.rating_min}, {"rating_max", review.rating_max}}},
  };
  if (taxonomy_path) doc["taxonomy"] = *taxonomy_path;
  if (output_dir) doc["output_dir"] = *output_dir;
  return doc;
}

PipelineConfig PipelineConfig::from_json(const json& doc) {
  PipelineConfig c;
  try {
    reject_unknown(doc, "config",
                   {"taxonomy", "output_dir", "thresholds", "model", "smoothing", "seeds", "review"});
    if (doc.contains("taxonomy")) c.taxonomy_path = doc["taxonomy"].get<std::string>();
    if (doc.contains("output_dir")) c.output_dir = doc["output_dir"].get<std::string>();
    if (doc.contains("thresholds")) {
      const json& t = doc["thresholds"];
      reject_unknown(t, "thresholds",
                     {"min_age_years", "symmetry_rel_diff", "max_symmetry_discrepancies",
                      "zero_volume_max", "outlier_threshold", "max_flagged_organs",
                      "min_cohort_scans", "dip_alpha"});
      read(t, "min_age_years", c.thresholds.min_age_years);
      read(t, "symmetry_rel_diff", c.thresholds.symmetry_rel_diff);
      read(t, "max_symmetry_discrepancies", c.thresholds.max_symmetry_discrepancies);
      read(t, "zero_volume_max", c.thresholds.zero_volume_max);
      read(t, "outlier_threshold", c.thresholds.outlier_threshold);
      read(t, "max_flagged_organs", c.thresholds.max_flagged_organs);
      read(t, "min_cohort_scans", c.thresholds.min_cohort_scans);
      read(t, "dip_alpha", c.model.dip_alpha);
    }
    if (doc.contains("model")) {
      const json& m = doc["model"];
      reject_unknown(m, "model",
                     {"bootstrap_b", "dip_reference", "min_nonzero_samples", "mc_draws",
                      "em_tolerance", "em_max_iterations", "variance_floor_rel"});
      read(m, "bootstrap_b", c.model.bootstrap_b);
      if (m.contains("dip_reference")) {
        c.model.dip_reference = stats::parse_dip_reference(m["dip_reference"].get<std::string>());
      }
      read(m, "min_nonzero_samples", c.model.min_samples);
      read(m, "mc_draws", c.model.mc_draws);
      read(m, "em_tolerance", c.model.em.tolerance);
      read(m, "em_max_iterations", c.model.em.max_iterations);
      read(m, "variance_floor_rel", c.model.em.variance_floor_rel);
    }
    if (doc.contains("smoothing")) {
      const json& s = doc["smoothing"];
      reject_unknown(s, "smoothing", {"lambda", "iterations"});
      read(s, "lambda", c.smoothing.lambda);
      read(s, "iterations", c.smoothing.iterations);
    }
    if (doc.contains("seeds")) {
      reject_unknown(doc["seeds"], "seeds", {"base"});
      read(doc["seeds"], "base", c.model.base_seed);
    }
    if (doc.contains("review")) {
      reject_unknown(doc["review"], "review", {"rating_min", "rating_max"});
      read(doc["review"], "rating_min", c.review.rating_min);
      read(doc["review"], "rating_max", c.review.rating_max);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kValidation, std::string("config has a value of the wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::from_toml(std::string_view text) {
  toml::table table;
  try {
    table = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw Error(ErrorCode::kFormat, std::string("invalid TOML config: ") + std::string(e.description()));
  }
  std::ostringstream as_json;
  as_json << toml::json_formatter{table};
  return from_json(json::parse(as_json.str()));
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".toml") return from_toml(buf.str());
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, "invalid JSON config " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

}  // namespace phantomforge
