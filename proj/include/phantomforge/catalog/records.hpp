// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "phantomforge/qc.hpp"
#include "phantomforge/taxonomy.hpp"
#include "phantomforge/volumetry.hpp"

namespace phantomforge::catalog {

/// Demographics supplied with a scan at ingest.
struct ScanMetadata {
  std::string scan_id;
  std::string patient_id;
  Sex sex = Sex::kUnknown;
  double age_years = 0.0;
  std::optional<double> height_m;
  std::optional<double> weight_kg;
  std::string race = "unknown";

  void validate() const;
  nlohmann::json to_json() const;
  static ScanMetadata from_json(const nlohmann::json& doc);
};

/// Reads metadata rows from a CSV file with a header line (columns scan_id,
/// patient_id, sex, age_years, height_m, weight_kg, race; empty cells are
/// missing values) or from a JSON array of objects.
std::vector<ScanMetadata> load_metadata(const std::filesystem::path& path);

struct PatientRecord {
  std::string patient_id;
  Sex sex = Sex::kUnknown;
  double age_years = 0.0;  // at the most recent scan
  std::optional<double> height_m;
  std::optional<double> weight_kg;
  std::string race = "unknown";
  std::vector<std::string> scans;

  std::optional<double> bmi() const;
  nlohmann::json to_json() const;
  static PatientRecord from_json(const nlohmann::json& doc);
  bool operator==(const PatientRecord&) const = default;
};

struct ScanRecord {
  std::string scan_id;
  std::string patient_id;
  double age_years = 0.0;
  std::string source;         // path the grid was ingested from, if any
  std::string grid_file;      // relative to the scan directory
  GridTemplate geometry;
  VolumeTable volumes;
  std::string ingested_at;    // ISO 8601 UTC

  nlohmann::json to_json() const;
  static ScanRecord from_json(const nlohmann::json& doc);
  bool operator==(const ScanRecord&) const = default;
};

struct ManifestStructure {
  Label id = 0;
  std::string name;
  double volume_ml = 0.0;
  std::optional<std::string> mesh_path;  // relative to the catalog root
  std::string voxel_source;              // relative to the catalog root
};

struct PhantomManifest {
  std::string phantom_id;
  PatientRecord patient;  // snapshot; age_years is the age at this scan
  std::vector<ManifestStructure> structures;
  QcOutcome qc;
  std::optional<int> review_rating;
  std::string pipeline_version;
  std::string created_at;

  nlohmann::json to_json() const;
  static PhantomManifest from_json(const nlohmann::json& doc);
};

struct PhantomQuery {
  std::optional<Sex> sex;
  std::optional<double> age_min;
  std::optional<double> age_max;
  std::optional<std::string> race;
  std::optional<double> bmi_min;
  std::optional<double> bmi_max;
  std::optional<std::string> structure;  // id or name, must have nonzero volume
  bool include_all = false;

  /// Throws Error(kInvalidArgument) when a range has min > max.
  void validate() const;
  bool matches(const PhantomManifest& manifest, const Taxonomy& taxonomy) const;
};

std::string utc_timestamp();

}  // namespace phantomforge::catalog
