// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phantomforge/stats/volume_model.hpp"
#include "phantomforge/taxonomy.hpp"

namespace phantomforge {

struct QcThresholds {
  double min_age_years = 14.0;
  double symmetry_rel_diff = 0.5;
  int max_symmetry_discrepancies = 2;
  double zero_volume_max = 0.25;
  double outlier_threshold = 0.9;
  int max_flagged_organs = 2;
  std::size_t min_cohort_scans = 20;  // below this the statistical stage is skipped
};

enum class FinalStatus {
  kAccepted,
  kRejectedAge,
  kRejectedSymmetry,
  kRejectedZeroVolume,
  kRejectedStatistical,
  kRejectedReview,
  kPendingReview,
  kSupersededDuplicate,
};
std::string_view to_string(FinalStatus status);
FinalStatus parse_final_status(std::string_view text);

enum class Verdict { kApproved, kFlagged, kRejected };
std::string_view to_string(Verdict verdict);
Verdict parse_verdict(std::string_view text);

struct SymmetryResult {
  std::vector<StructurePair> discrepant_pairs;
  bool pass = true;
};

struct ZeroVolumeResult {
  double fraction = 0.0;
  bool pass = true;
};

struct StatisticalResult {
  std::map<Label, double> p_out;
  std::vector<Label> flagged_ids;
  bool skull_flag = false;
  bool pass = true;
};

struct ReviewRecord {
  std::string scan_id;
  Verdict verdict = Verdict::kApproved;
  int rating = 0;
  std::string reviewer;
  std::string timestamp;
  std::string notes;

  nlohmann::json to_json() const;
  static ReviewRecord from_json(const nlohmann::json& doc);
};

/// Per-scan QC ledger. Stages after the first failing one stay empty.
struct QcOutcome {
  std::string scan_id;
  std::string patient_id;
  bool age_pass = false;
  std::optional<SymmetryResult> symmetry;
  std::optional<ZeroVolumeResult> zero_volume;
  std::optional<StatisticalResult> statistical;
  std::optional<double> mean_p_out;  // over structures with nonzero volume
  std::optional<ReviewRecord> review;
  FinalStatus final_status = FinalStatus::kPendingReview;

  nlohmann::json to_json() const;
  static QcOutcome from_json(const nlohmann::json& doc);
  bool operator==(const QcOutcome& other) const;
};

/// |L - R| / max(L, R) > rel_diff marks a pair; pairs with both volumes zero
/// are skipped.
SymmetryResult symmetry_check(const std::map<Label, double>& volumes_ml,
                              const std::vector<StructurePair>& pairs, double rel_diff = 0.5,
                              int max_discrepancies = 2);

StatisticalResult statistical_check(const std::map<Label, double>& p_out,
                                    const std::array<Label, 3>& skull_trio,
                                    double threshold = 0.9, int max_flagged = 2);

struct DedupCandidate {
  std::string scan_id;
  double mean_p_out = 0.0;
};

/// Lowest mean_p_out wins; ties go to the lexicographically smaller scan_id.
std::string select_unique_scan(const std::vector<DedupCandidate>& candidates);

/// Mean p_out over the structures whose volume is nonzero (0 when none are).
double mean_outlier_probability(const std::map<Label, double>& p_out,
                                const std::map<Label, double>& volumes_ml);

struct StageCount {
  std::string stage;
  std::size_t entrants = 0;
  std::size_t passed = 0;
  std::size_t rejected = 0;
  std::vector<std::string> rejected_ids;
};

struct FunnelReport {
  std::vector<StageCount> stages;  // age, symmetry, zero_volume, statistical, review, dedup
  std::size_t total_scans = 0;
  std::size_t pending_review = 0;
  std::size_t accepted = 0;
  bool statistical_enabled = true;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  static FunnelReport from_json(const nlohmann::json& doc);
  std::string to_table() const;
};

struct CohortScan {
  std::string scan_id;
  std::string patient_id;
  Sex sex = Sex::kUnknown;
  double age_years = 0.0;
  std::map<Label, double> volumes_ml;
};

struct QcConfig {
  QcThresholds thresholds;
  stats::ModelConfig model;
};

struct QcRunResult {
  std::vector<QcOutcome> outcomes;  // input order
  std::map<Label, stats::VolumeModel> models;
  std::vector<std::string> warnings;
};

/// Stages 1-5: age, symmetry, zero-volume fraction, cohort models plus
/// statistical check, then pending_review. Output does not depend on `jobs`.
QcRunResult run_qc_pipeline(const std::vector<CohortScan>& cohort, const Taxonomy& taxonomy,
                            const QcConfig& config, int jobs = 1);

/// Applies a verdict to a pending outcome. Throws Error(kInvalidState) when the
/// outcome is not pending and Error(kInvalidArgument) for ratings outside
/// [rating_min, rating_max].
void apply_review(QcOutcome& outcome, const ReviewRecord& review, int rating_min = 1,
                  int rating_max = 5);

/// Stage 6 for every patient: among accepted and superseded scans the one with
/// the lowest mean p_out stays accepted, the rest become superseded_duplicate.
void apply_dedup(std::vector<QcOutcome>& outcomes);

FunnelReport funnel_from_outcomes(const std::vector<QcOutcome>& outcomes);

}  // namespace phantomforge
