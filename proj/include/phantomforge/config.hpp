// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>

#include "phantomforge/qc.hpp"

namespace phantomforge {

struct SmoothingConfig {
  double lambda = 0.5;
  int iterations = 20;
};

struct ReviewConfig {
  int rating_min = 1;
  int rating_max = 5;
};

/// Every tunable of a pipeline run. Serialized next to each catalog.
struct PipelineConfig {
  std::optional<std::string> taxonomy_path;  // bundled default when absent
  std::optional<std::string> output_dir;
  QcThresholds thresholds;
  stats::ModelConfig model;
  SmoothingConfig smoothing;
  ReviewConfig review;

  /// Throws Error(kValidation) naming the first out-of-range field.
  void validate() const;
  QcConfig qc() const { return {thresholds, model}; }

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static PipelineConfig from_json(const nlohmann::json& doc);
  static PipelineConfig from_toml(std::string_view text);
  /// `.toml` files parse as TOML, everything else as JSON.
  static PipelineConfig load(const std::filesystem::path& path);
};

}  // namespace phantomforge
