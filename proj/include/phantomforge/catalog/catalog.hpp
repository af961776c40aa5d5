// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phantomforge/catalog/png.hpp"
#include "phantomforge/catalog/records.hpp"
#include "phantomforge/catalog/summary.hpp"
#include "phantomforge/config.hpp"
#include "phantomforge/grid_io.hpp"
#include "phantomforge/qc.hpp"

namespace phantomforge::catalog {

struct PendingItem {
  std::string scan_id;
  std::string patient_id;
  std::map<std::string, std::string> previews;  // axis -> path relative to the catalog root
  QcOutcome qc;

  nlohmann::json to_json() const;
};

struct MeshJob {
  std::optional<std::string> phantom_id;  // all accepted phantoms when absent
  std::optional<Label> structure;         // every present structure when absent
  std::optional<double> lambda;           // config default when absent
  std::optional<int> iterations;
};

struct MeshArtifact {
  std::string phantom_id;
  Label structure = 0;
  std::string path;  // relative to the catalog root
  std::size_t vertices = 0;
  std::size_t triangles = 0;
  double volume_mm3 = 0.0;
};

/// Plain-file phantom catalog:
///   config.json, taxonomy.json, patients.json, reviews.log
///   scans/<scan_id>/{volume.lvol(.json), volumes.csv, volumes.json, scan.json, qc.json,
///                    preview_<axis>.png}
///   phantoms/<phantom_id>/{manifest.json, <structure_id>.ply}
///   qc/{base_outcomes.json, models.json, funnel.json}
/// The phantom id of a scan is its scan id. Mutations hold an exclusive lock
/// on <root>/.lock; every file is replaced atomically.
class Catalog {
 public:
  /// Creates the layout; an existing catalog is opened unchanged.
  static Catalog init(const std::filesystem::path& root, const PipelineConfig& config = {});
  static Catalog open(const std::filesystem::path& root);

  const std::filesystem::path& root() const { return root_; }
  const PipelineConfig& config() const { return config_; }
  const Taxonomy& taxonomy() const { return taxonomy_; }

  ScanRecord ingest_scan(const VoxelGrid& grid, const ScanMetadata& meta,
                         const std::string& source = "");
  ScanRecord ingest_file(const std::filesystem::path& path, const ScanMetadata& meta);

  std::vector<PatientRecord> patients() const;
  std::vector<ScanRecord> scans() const;
  ScanRecord scan(const std::string& scan_id) const;
  VoxelGrid load_grid(const std::string& scan_id) const;

  /// Runs QC over every scan, then replays the review log on top.
  FunnelReport run_qc(int jobs = 1, const std::optional<PipelineConfig>& override_config = {});
  bool has_qc() const;
  FunnelReport funnel() const;
  std::vector<QcOutcome> outcomes() const;
  QcOutcome outcome(const std::string& scan_id) const;

  QcOutcome submit_review(const std::string& scan_id, Verdict verdict, int rating,
                          const std::string& reviewer, const std::string& notes);
  std::vector<PendingItem> pending_reviews() const;
  std::vector<ReviewRecord> review_log() const;
  /// Final statuses rebuilt from the stored pre-review outcomes plus the log.
  std::map<std::string, FinalStatus> replay_reviews() const;

  PhantomManifest manifest(const std::string& phantom_id) const;
  std::vector<PhantomManifest> query_phantoms(const PhantomQuery& query) const;
  std::filesystem::path preview_path(const std::string& phantom_id, ProjectionAxis axis) const;
  std::filesystem::path mesh_path(const std::string& phantom_id, Label structure) const;

  std::vector<MeshArtifact> extract_meshes(const MeshJob& job, int jobs = 1);
  /// Rasterizes the phantom's meshes on a grid with the given isotropic
  /// spacing covering the source scan; returns the path of the label grid.
  std::filesystem::path voxelize_phantom(const std::string& phantom_id, double spacing_mm,
                                         int jobs = 1);

  DemographicsSummary demographics() const;
  std::vector<StructureVolumeStats> volume_stats() const;

 private:
  Catalog(std::filesystem::path root, PipelineConfig config, Taxonomy taxonomy);

  std::filesystem::path scan_dir(const std::string& scan_id) const;
  std::filesystem::path phantom_dir(const std::string& phantom_id) const;
  std::vector<QcOutcome> base_outcomes() const;
  std::vector<QcOutcome> replay(std::vector<QcOutcome> base,
                                const std::vector<ReviewRecord>& log) const;
  /// Per-scan files are rewritten only where the outcome differs from `previous`.
  void store_outcomes(const std::vector<QcOutcome>& current, const std::vector<std::string>& warnings,
                      const std::vector<QcOutcome>* previous = nullptr);
  void write_manifest(const ScanRecord& scan, const QcOutcome& outcome,
                      const std::map<std::string, PatientRecord>& patients);
  std::map<std::string, PatientRecord> patient_map() const;

  std::filesystem::path root_;
  PipelineConfig config_;
  Taxonomy taxonomy_;
};

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace phantomforge::catalog
