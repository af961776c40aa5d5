// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/qc.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "phantomforge/error.hpp"
#include "phantomforge/parallel.hpp"
#include "phantomforge/volumetry.hpp"

namespace phantomforge {
namespace {

using nlohmann::json;

constexpr std::pair<FinalStatus, std::string_view> kStatusNames[] = {
    {FinalStatus::kAccepted, "accepted"},
    {FinalStatus::kRejectedAge, "rejected_age"},
    {FinalStatus::kRejectedSymmetry, "rejected_symmetry"},
    {FinalStatus::kRejectedZeroVolume, "rejected_zero_volume"},
    {FinalStatus::kRejectedStatistical, "rejected_statistical"},
    {FinalStatus::kRejectedReview, "rejected_review"},
    {FinalStatus::kPendingReview, "pending_review"},
    {FinalStatus::kSupersededDuplicate, "superseded_duplicate"},
};

constexpr std::pair<Verdict, std::string_view> kVerdictNames[] = {
    {Verdict::kApproved, "approved"},
    {Verdict::kFlagged, "flagged"},
    {Verdict::kRejected, "rejected"},
};

json id_map_to_json(const std::map<Label, double>& m) {
  json out = json::object();
  for (const auto& [id, v] : m) out[std::to_string(id)] = v;
  return out;
}

std::map<Label, double> id_map_from_json(const json& doc) {
  std::map<Label, double> out;
  for (const auto& [key, v] : doc.items()) out[static_cast<Label>(std::stoul(key))] = v.get<double>();
  return out;
}

double volume_of(const std::map<Label, double>& volumes, Label id) {
  const auto it = volumes.find(id);
  return it == volumes.end() ? 0.0 : it->second;
}

bool reviewed_in(FinalStatus s) {
  return s == FinalStatus::kAccepted || s == FinalStatus::kSupersededDuplicate;
}

}  // namespace

std::string_view to_string(FinalStatus status) {
  for (const auto& [s, name] : kStatusNames) {
    if (s == status) return name;
  }
  return "unknown";
}

FinalStatus parse_final_status(std::string_view text) {
  for (const auto& [s, name] : kStatusNames) {
    if (name == text) return s;
  }
  throw Error(ErrorCode::kFormat, "unknown final status \"" + std::string(text) + "\"");
}

std::string_view to_string(Verdict verdict) {
  for (const auto& [v, name] : kVerdictNames) {
    if (v == verdict) return name;
  }
  return "unknown";
}

Verdict parse_verdict(std::string_view text) {
  for (const auto& [v, name] : kVerdictNames) {
    if (name == text) return v;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "verdict must be approved, flagged or rejected (got \"" + std::string(text) + "\")");
}

json ReviewRecord::to_json() const {
  return {{"scan_id", scan_id},   {"verdict", phantomforge::to_string(verdict)},
          {"rating", rating},     {"reviewer", reviewer},
          {"timestamp", timestamp}, {"notes", notes}};
}

ReviewRecord ReviewRecord::from_json(const json& doc) {
  try {
    ReviewRecord r;
    r.scan_id = doc.at("scan_id").get<std::string>();
    r.verdict = parse_verdict(doc.at("verdict").get<std::string>());
    r.rating = doc.at("rating").get<int>();
    r.reviewer = doc.value("reviewer", std::string());
    r.timestamp = doc.value("timestamp", std::string());
    r.notes = doc.value("notes", std::string());
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed review record: ") + e.what());
  }
}

json QcOutcome::to_json() const {
  json doc = {{"scan_id", scan_id},
              {"patient_id", patient_id},
              {"age_pass", age_pass},
              {"final_status", phantomforge::to_string(final_status)}};
  if (symmetry) {
    json pairs = json::array();
    for (const auto& [l, r] : symmetry->discrepant_pairs) pairs.push_back({l, r});
    doc["symmetry"] = {{"discrepant_pairs", pairs}, {"pass", symmetry->pass}};
  } else {
    doc["symmetry"] = nullptr;
  }
  doc["zero_volume"] = zero_volume ? json{{"fraction", zero_volume->fraction},
                                          {"pass", zero_volume->pass}}
                                   : json(nullptr);
  if (statistical) {
    doc["statistical"] = {{"p_out", id_map_to_json(statistical->p_out)},
                          {"flagged_ids", statistical->flagged_ids},
                          {"skull_flag", statistical->skull_flag},
                          {"pass", statistical->pass}};
  } else {
    doc["statistical"] = nullptr;
  }
  doc["mean_p_out"] = mean_p_out ? json(*mean_p_out) : json(nullptr);
  doc["review"] = review ? review->to_json() : json(nullptr);
  return doc;
}

QcOutcome QcOutcome::from_json(const json& doc) {
  try {
    QcOutcome o;
    o.scan_id = doc.at("scan_id").get<std::string>();
    o.patient_id = doc.at("patient_id").get<std::string>();
    o.age_pass = doc.at("age_pass").get<bool>();
    o.final_status = parse_final_status(doc.at("final_status").get<std::string>());
    if (const json& s = doc.at("symmetry"); !s.is_null()) {
      SymmetryResult r;
      for (const auto& p : s.at("discrepant_pairs")) {
        r.discrepant_pairs.emplace_back(p.at(0).get<Label>(), p.at(1).get<Label>());
      }
      r.pass = s.at("pass").get<bool>();
      o.symmetry = r;
    }
    if (const json& z = doc.at("zero_volume"); !z.is_null()) {
      o.zero_volume = ZeroVolumeResult{z.at("fraction").get<double>(), z.at("pass").get<bool>()};
    }
    if (const json& s = doc.at("statistical"); !s.is_null()) {
      StatisticalResult r;
      r.p_out = id_map_from_json(s.at("p_out"));
      r.flagged_ids = s.at("flagged_ids").get<std::vector<Label>>();
      r.skull_flag = s.at("skull_flag").get<bool>();
      r.pass = s.at("pass").get<bool>();
      o.statistical = std::move(r);
    }
    if (!doc.at("mean_p_out").is_null()) o.mean_p_out = doc["mean_p_out"].get<double>();
    if (!doc.at("review").is_null()) o.review = ReviewRecord::from_json(doc["review"]);
    return o;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed QC outcome: ") + e.what());
  }
}

bool QcOutcome::operator==(const QcOutcome& other) const { return to_json() == other.to_json(); }

SymmetryResult symmetry_check(const std::map<Label, double>& volumes_ml,
                              const std::vector<StructurePair>& pairs, double rel_diff,
                              int max_discrepancies) {
  SymmetryResult result;
  for (const auto& pair : pairs) {
    const double l = volume_of(volumes_ml, pair.first);
    const double r = volume_of(volumes_ml, pair.second);
    if (l == 0.0 && r == 0.0) continue;
    if (std::abs(l - r) / std::max(l, r) > rel_diff) result.discrepant_pairs.push_back(pair);
  }
  result.pass = static_cast<int>(result.discrepant_pairs.size()) <= max_discrepancies;
  return result;
}

StatisticalResult statistical_check(const std::map<Label, double>& p_out,
                                    const std::array<Label, 3>& skull_trio, double threshold,
                                    int max_flagged) {
  StatisticalResult result;
  result.p_out = p_out;
  for (const auto& [id, p] : p_out) {
    if (p > threshold) result.flagged_ids.push_back(id);
  }
  int trio_hits = 0;
  for (Label id : skull_trio) {
    const auto it = p_out.find(id);
    if (it != p_out.end() && it->second > threshold) ++trio_hits;
  }
  result.skull_flag = trio_hits >= 2;
  result.pass = static_cast<int>(result.flagged_ids.size()) <= max_flagged;
  return result;
}

std::string select_unique_scan(const std::vector<DedupCandidate>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "no scans to choose from");
  const auto best = std::min_element(
      candidates.begin(), candidates.end(), [](const DedupCandidate& a, const DedupCandidate& b) {
        if (a.mean_p_out != b.mean_p_out) return a.mean_p_out < b.mean_p_out;
        return a.scan_id < b.scan_id;
      });
  return best->scan_id;
}

double mean_outlier_probability(const std::map<Label, double>& p_out,
                                const std::map<Label, double>& volumes_ml) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [id, p] : p_out) {
    if (volume_of(volumes_ml, id) > 0.0) {
      sum += p;
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

QcRunResult run_qc_pipeline(const std::vector<CohortScan>& cohort, const Taxonomy& taxonomy,
                            const QcConfig& config, int jobs) {
  const QcThresholds& th = config.thresholds;
  QcRunResult run;
  run.outcomes.resize(cohort.size());
  const auto pairs = taxonomy.symmetry_set();

  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const CohortScan& scan = cohort[i];
    QcOutcome& o = run.outcomes[i];
    o.scan_id = scan.scan_id;
    o.patient_id = scan.patient_id;
    o.age_pass = !(scan.age_years < th.min_age_years);
    if (!o.age_pass) {
      o.final_status = FinalStatus::kRejectedAge;
      continue;
    }
    o.symmetry = symmetry_check(scan.volumes_ml, pairs, th.symmetry_rel_diff,
                                th.max_symmetry_discrepancies);
    if (!o.symmetry->pass) {
      o.final_status = FinalStatus::kRejectedSymmetry;
      continue;
    }
    const double frac =
        zero_volume_fraction(scan.volumes_ml, expected_structures(taxonomy, scan.sex));
    o.zero_volume = ZeroVolumeResult{frac, !(frac > th.zero_volume_max)};
    if (!o.zero_volume->pass) {
      o.final_status = FinalStatus::kRejectedZeroVolume;
      continue;
    }
    o.final_status = FinalStatus::kPendingReview;
    survivors.push_back(i);
  }

  if (survivors.size() < th.min_cohort_scans) {
    run.warnings.push_back("statistical stage disabled: " + std::to_string(survivors.size()) +
                           " scans reached it, at least " + std::to_string(th.min_cohort_scans) +
                           " are needed to fit volume models");
    return run;
  }

  // Each structure is modeled on the survivors that are expected to have it.
  std::vector<std::set<Label>> expected(cohort.size());
  for (std::size_t i : survivors) expected[i] = expected_structures(taxonomy, cohort[i].sex);
  std::vector<Label> ids;
  for (const auto& def : taxonomy.structures()) {
    if (def.expected) ids.push_back(def.id);
  }
  std::vector<stats::VolumeModel> fitted(ids.size());
  parallel_for(ids.size(), jobs, [&](std::size_t s) {
    std::vector<double> samples;
    for (std::size_t i : survivors) {
      if (expected[i].count(ids[s])) samples.push_back(volume_of(cohort[i].volumes_ml, ids[s]));
    }
    fitted[s] = stats::fit_volume_model(samples, ids[s], config.model);
  });
  for (std::size_t s = 0; s < ids.size(); ++s) run.models.emplace(ids[s], std::move(fitted[s]));

  parallel_for(survivors.size(), jobs, [&](std::size_t n) {
    const std::size_t i = survivors[n];
    std::map<Label, double> p_out;
    for (Label id : expected[i]) {
      p_out[id] = stats::outlier_probability(run.models.at(id), volume_of(cohort[i].volumes_ml, id));
    }
    QcOutcome& o = run.outcomes[i];
    o.mean_p_out = mean_outlier_probability(p_out, cohort[i].volumes_ml);
    o.statistical = statistical_check(p_out, taxonomy.skull_trio(), th.outlier_threshold,
                                      th.max_flagged_organs);
    if (!o.statistical->pass) o.final_status = FinalStatus::kRejectedStatistical;
  });
  return run;
}

void apply_review(QcOutcome& outcome, const ReviewRecord& review, int rating_min, int rating_max) {
  if (outcome.final_status != FinalStatus::kPendingReview) {
    throw Error(ErrorCode::kInvalidState, "scan " + outcome.scan_id + " is not pending review (" +
                                              std::string(to_string(outcome.final_status)) + ")");
  }
  if (review.rating < rating_min || review.rating > rating_max) {
    throw Error(ErrorCode::kInvalidArgument, "rating must be in [" + std::to_string(rating_min) +
                                                 ", " + std::to_string(rating_max) + "]");
  }
  outcome.review = review;
  outcome.final_status =
      review.verdict == Verdict::kRejected ? FinalStatus::kRejectedReview : FinalStatus::kAccepted;
}

void apply_dedup(std::vector<QcOutcome>& outcomes) {
  std::map<std::string, std::vector<std::size_t>> by_patient;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (reviewed_in(outcomes[i].final_status)) by_patient[outcomes[i].patient_id].push_back(i);
  }
  for (const auto& [patient, members] : by_patient) {
    std::vector<DedupCandidate> candidates;
    for (std::size_t i : members) {
      candidates.push_back({outcomes[i].scan_id, outcomes[i].mean_p_out.value_or(0.0)});
    }
    const std::string winner = select_unique_scan(candidates);
    for (std::size_t i : members) {
      outcomes[i].final_status = outcomes[i].scan_id == winner ? FinalStatus::kAccepted
                                                               : FinalStatus::kSupersededDuplicate;
    }
  }
}

FunnelReport funnel_from_outcomes(const std::vector<QcOutcome>& outcomes) {
  FunnelReport report;
  report.total_scans = outcomes.size();
  std::vector<const QcOutcome*> sorted;
  for (const auto& o : outcomes) sorted.push_back(&o);
  std::sort(sorted.begin(), sorted.end(),
            [](const QcOutcome* a, const QcOutcome* b) { return a->scan_id < b->scan_id; });

  auto stage = [&](std::string name, auto entered, FinalStatus reject) {
    StageCount c;
    c.stage = std::move(name);
    for (const QcOutcome* o : sorted) {
      if (!entered(*o)) continue;
      ++c.entrants;
      if (o->final_status == reject) {
        ++c.rejected;
        c.rejected_ids.push_back(o->scan_id);
      }
    }
    c.passed = c.entrants - c.rejected;
    report.stages.push_back(std::move(c));
  };
  auto status_is_not = [](std::initializer_list<FinalStatus> excluded) {
    return [excluded](const QcOutcome& o) {
      return std::find(excluded.begin(), excluded.end(), o.final_status) == excluded.end();
    };
  };
  using S = FinalStatus;
  stage("age", [](const QcOutcome&) { return true; }, S::kRejectedAge);
  stage("symmetry", status_is_not({S::kRejectedAge}), S::kRejectedSymmetry);
  stage("zero_volume", status_is_not({S::kRejectedAge, S::kRejectedSymmetry}),
        S::kRejectedZeroVolume);
  stage("statistical",
        status_is_not({S::kRejectedAge, S::kRejectedSymmetry, S::kRejectedZeroVolume}),
        S::kRejectedStatistical);
  stage("review",
        status_is_not({S::kRejectedAge, S::kRejectedSymmetry, S::kRejectedZeroVolume,
                       S::kRejectedStatistical}),
        S::kRejectedReview);
  stage("dedup", [](const QcOutcome& o) { return reviewed_in(o.final_status); },
        S::kSupersededDuplicate);

  bool any_scored = false;
  bool any_statistical_entrant = false;
  for (const auto& o : outcomes) {
    if (o.final_status == S::kPendingReview) ++report.pending_review;
    if (o.final_status == S::kAccepted) ++report.accepted;
    if (o.statistical) any_scored = true;
    if (o.zero_volume && o.zero_volume->pass) any_statistical_entrant = true;
  }
  // The review stage only counts verdicts; pending scans have not passed yet.
  report.stages[4].passed -= report.pending_review;
  report.statistical_enabled = any_scored || !any_statistical_entrant;
  return report;
}

json FunnelReport::to_json() const {
  json stage_list = json::array();
  for (const auto& s : stages) {
    stage_list.push_back({{"stage", s.stage},
                          {"entrants", s.entrants},
                          {"passed", s.passed},
                          {"rejected", s.rejected},
                          {"rejected_ids", s.rejected_ids}});
  }
  return {{"total_scans", total_scans},
          {"stages", stage_list},
          {"pending_review", pending_review},
          {"accepted", accepted},
          {"statistical_enabled", statistical_enabled},
          {"warnings", warnings}};
}

FunnelReport FunnelReport::from_json(const json& doc) {
  try {
    FunnelReport r;
    r.total_scans = doc.at("total_scans").get<std::size_t>();
    r.pending_review = doc.at("pending_review").get<std::size_t>();
    r.accepted = doc.at("accepted").get<std::size_t>();
    r.statistical_enabled = doc.at("statistical_enabled").get<bool>();
    r.warnings = doc.at("warnings").get<std::vector<std::string>>();
    for (const auto& s : doc.at("stages")) {
      r.stages.push_back({s.at("stage").get<std::string>(), s.at("entrants").get<std::size_t>(),
                          s.at("passed").get<std::size_t>(), s.at("rejected").get<std::size_t>(),
                          s.at("rejected_ids").get<std::vector<std::string>>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed funnel report: ") + e.what());
  }
}

std::string FunnelReport::to_table() const {
  std::ostringstream out;
  out << std::left << std::setw(14) << "stage" << std::right << std::setw(10) << "entrants"
      << std::setw(10) << "passed" << std::setw(10) << "rejected" << std::setw(9) << "pass%"
      << '\n';
  for (const auto& s : stages) {
    const double pct =
        s.entrants == 0 ? 100.0 : 100.0 * static_cast<double>(s.passed) / static_cast<double>(s.entrants);
    out << std::left << std::setw(14) << s.stage << std::right << std::setw(10) << s.entrants
        << std::setw(10) << s.passed << std::setw(10) << s.rejected << std::setw(8) << std::fixed
        << std::setprecision(1) << pct << "%\n";
  }
  out << "total " << total_scans << ", pending_review " << pending_review << ", accepted "
      << accepted << '\n';
  if (!statistical_enabled) out << "statistical stage disabled\n";
  for (const auto& w : warnings) out << "warning: " << w << '\n';
  return out.str();
}

}  // namespace phantomforge
