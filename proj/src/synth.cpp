// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "phantomforge/catalog/catalog.hpp"
#include "phantomforge/error.hpp"
#include "phantomforge/grid_io.hpp"
#include "phantomforge/stats/sample.hpp"

namespace phantomforge::synth {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<const char*, double>, 5> kRaces = {
    {{"White", 0.60}, {"Black", 0.20}, {"Asian", 0.10}, {"Hispanic", 0.07}, {"Other", 0.03}}};

std::uint32_t nominal_voxels(Label id) { return 250 + (static_cast<std::uint32_t>(id) * 37u) % 300u; }

// Evenly spaced normal quantiles standardized to exact mean and sd, shuffled.
std::vector<double> stratified_normal(std::size_t n, double mean, double sd, std::mt19937_64& rng) {
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
  if (n > 1) {
    const double m = stats::mean(z);
    const double s = stats::sample_stddev(z);
    for (double& v : z) v = (v - m) / s;
  } else if (n == 1) {
    z[0] = 0.0;
  }
  std::shuffle(z.begin(), z.end(), rng);
  for (double& v : z) v = mean + sd * v;
  return z;
}

template <typename T>
std::vector<T> take(std::vector<T>& pool, std::size_t n, const char* what) {
  if (pool.size() < n) throw Error(ErrorCode::kInvalidArgument, std::string("cohort too small for ") + what);
  std::vector<T> out(pool.end() - static_cast<std::ptrdiff_t>(n), pool.end());
  pool.resize(pool.size() - n);
  return out;
}

std::string scan_name(std::size_t i) {
  std::ostringstream s;
  s << "scan" << std::setw(4) << std::setfill('0') << i;
  return s.str();
}

std::string patient_name(std::size_t i) {
  std::ostringstream s;
  s << "pat" << std::setw(4) << std::setfill('0') << i;
  return s.str();
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::kInvalidArgument, "quantile level must be in (0, 1)");
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (stats::normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string_view to_string(Planted p) {
  switch (p) {
    case Planted::kHealthy: return "healthy";
    case Planted::kSymmetry: return "symmetry";
    case Planted::kTruncation: return "truncation";
    case Planted::kOutlier: return "outlier";
  }
  return "healthy";
}

std::map<Label, double> SynthScan::volumes_ml(const Vec3& spacing_mm) const {
  const double voxel = spacing_mm[0] * spacing_mm[1] * spacing_mm[2];
  std::map<Label, double> out;
  for (const auto& [id, c] : counts) out[id] = static_cast<double>(c) * voxel / 1000.0;
  return out;
}

SynthCohort synth_cohort(const Taxonomy& taxonomy, const SynthOptions& opt) {
  SynthCohort cohort;
  cohort.options = opt;
  const std::size_t n = opt.scans;
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "cohort needs at least one scan");
  if (!(opt.spread >= 0.0 && opt.spread < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "spread must be in [0, 1)");
  }
  std::mt19937_64 rng(opt.seed);

  // Scan roles.
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  std::shuffle(pool.begin(), pool.end(), rng);
  const auto sym = take(pool, opt.symmetry_defects, "symmetry defects");
  const auto trunc = take(pool, opt.truncations, "truncations");
  const auto outl = take(pool, opt.triple_outliers, "outliers");
  const auto dups = take(pool, 2 * opt.duplicate_pairs, "duplicate pairs");

  // Patients: duplicate pairs share one patient.
  std::vector<std::size_t> patient_of(n);
  std::iota(patient_of.begin(), patient_of.end(), 0);
  for (std::size_t p = 0; p < opt.duplicate_pairs; ++p) {
    const std::size_t a = std::min(dups[2 * p], dups[2 * p + 1]);
    const std::size_t b = std::max(dups[2 * p], dups[2 * p + 1]);
    patient_of[b] = patient_of[a];
  }
  std::set<std::size_t> patient_set(patient_of.begin(), patient_of.end());
  std::vector<std::size_t> patient_list(patient_set.begin(), patient_set.end());

  // Demographics per patient.
  std::vector<std::size_t> order = patient_list;
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_male = static_cast<std::size_t>(std::llround(opt.male_fraction * static_cast<double>(order.size())));
  std::map<std::size_t, Sex> sex;
  for (std::size_t i = 0; i < order.size(); ++i) sex[order[i]] = i < n_male ? Sex::kMale : Sex::kFemale;
  const auto male_ages = stratified_normal(n_male, opt.male_age_mean, opt.male_age_sd, rng);
  const auto female_ages = stratified_normal(order.size() - n_male, opt.female_age_mean, opt.female_age_sd, rng);
  std::map<std::size_t, double> age;
  std::size_t mi = 0, fi = 0;
  std::normal_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::map<std::size_t, catalog::ScanMetadata> demo;
  for (std::size_t p : patient_list) {
    catalog::ScanMetadata m;
    m.patient_id = patient_name(p);
    m.sex = sex[p];
    m.age_years = std::max(14.0, std::round((m.sex == Sex::kMale ? male_ages[mi++] : female_ages[fi++]) * 10.0) / 10.0);
    double r = uniform(rng);
    m.race = kRaces.back().first;
    for (const auto& [name, w] : kRaces) {
      if (r < w) {
        m.race = name;
        break;
      }
      r -= w;
    }
    if (uniform(rng) >= opt.missing_habitus) {
      const double h = (m.sex == Sex::kMale ? 1.76 : 1.62) + (m.sex == Sex::kMale ? 0.07 : 0.065) * unit(rng);
      const double bmi = std::clamp(27.0 + 4.5 * unit(rng), 16.0, 45.0);
      m.height_m = std::round(h * 100.0) / 100.0;
      m.weight_kg = std::round(bmi * *m.height_m * *m.height_m * 10.0) / 10.0;
    }
    demo[p] = m;
  }

  // Stratified healthy volumes.
  std::vector<Label> ids;
  for (const auto& def : taxonomy.structures()) ids.push_back(def.id);
  cohort.scans.resize(n);
  std::vector<std::size_t> rank(n);
  for (Label id : ids) {
    std::iota(rank.begin(), rank.end(), 0);
    std::shuffle(rank.begin(), rank.end(), rng);
    const double nominal = nominal_voxels(id);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (static_cast<double>(rank[i]) + 0.5) / static_cast<double>(n);
      cohort.scans[i].counts[id] =
          static_cast<std::uint32_t>(std::llround(nominal * (1.0 + opt.spread * (2.0 * u - 1.0))));
    }
  }

  std::map<std::size_t, int> visits;
  for (std::size_t i = 0; i < n; ++i) {
    SynthScan& s = cohort.scans[i];
    s.meta = demo[patient_of[i]];
    s.meta.scan_id = scan_name(i);
    s.meta.age_years += 2.0 * visits[patient_of[i]]++;
    // Structures the scan's sex cannot have are absent.
    for (const auto& def : taxonomy.structures()) {
      if (def.sex_specific && *def.sex_specific != s.meta.sex) s.counts[def.id] = 0;
    }
  }
  for (std::size_t p = 0; p < opt.duplicate_pairs; ++p) {
    const std::size_t a = std::min(dups[2 * p], dups[2 * p + 1]);
    const std::size_t b = std::max(dups[2 * p], dups[2 * p + 1]);
    cohort.duplicate_patients[patient_name(patient_of[a])] = {scan_name(a), scan_name(b)};
  }

  // Gallbladder absence over all scans.
  if (const StructureDef* gb = taxonomy.find(std::string_view("gallbladder"))) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    const auto missing = static_cast<std::size_t>(std::llround(opt.gallbladder_missing * static_cast<double>(n)));
    for (std::size_t m = 0; m < missing && m < n; ++m) {
      cohort.scans[all[m]].counts[gb->id] = 0;
      cohort.gallbladder_missing_ids.push_back(scan_name(all[m]));
    }
    std::sort(cohort.gallbladder_missing_ids.begin(), cohort.gallbladder_missing_ids.end());
  }

  // Candidate structures for planted defects.
  std::vector<Label> unpaired;  // neither paired, sex-specific, nor gallbladder
  std::vector<Label> general;
  for (const auto& def : taxonomy.structures()) {
    if (def.pair_id || def.sex_specific || def.name == "gallbladder") continue;
    unpaired.push_back(def.id);
    if (def.group == StructureGroup::kGeneral) general.push_back(def.id);
  }
  const auto pairs = taxonomy.symmetry_set();

  for (std::size_t i : sym) {
    SynthScan& s = cohort.scans[i];
    s.planted = Planted::kSymmetry;
    std::vector<StructurePair> chosen = pairs;
    std::shuffle(chosen.begin(), chosen.end(), rng);
    for (std::size_t c = 0; c < 3 && c < chosen.size(); ++c) {
      s.counts[chosen[c].second] =
          static_cast<std::uint32_t>(std::llround(0.3 * s.counts[chosen[c].first]));
    }
    cohort.symmetry_ids.push_back(s.meta.scan_id);
  }
  for (std::size_t i : trunc) {
    SynthScan& s = cohort.scans[i];
    s.planted = Planted::kTruncation;
    const std::size_t expected = expected_structures(taxonomy, s.meta.sex).size();
    const std::size_t zeros = static_cast<std::size_t>(std::ceil(0.28 * static_cast<double>(expected)));
    std::vector<Label> chosen = general;
    std::shuffle(chosen.begin(), chosen.end(), rng);
    if (chosen.size() < zeros) throw Error(ErrorCode::kInvalidArgument, "taxonomy too small to truncate");
    for (std::size_t c = 0; c < zeros; ++c) s.counts[chosen[c]] = 0;
    cohort.truncation_ids.push_back(s.meta.scan_id);
  }
  for (std::size_t i : outl) {
    SynthScan& s = cohort.scans[i];
    s.planted = Planted::kOutlier;
    std::vector<Label> chosen = unpaired;
    std::shuffle(chosen.begin(), chosen.end(), rng);
    for (std::size_t c = 0; c < 3 && c < chosen.size(); ++c) s.counts[chosen[c]] = 3 * nominal_voxels(chosen[c]);
    cohort.outlier_ids.push_back(s.meta.scan_id);
  }
  for (auto* v : {&cohort.symmetry_ids, &cohort.truncation_ids, &cohort.outlier_ids}) {
    std::sort(v->begin(), v->end());
  }
  return cohort;
}

std::vector<CohortScan> SynthCohort::cohort() const {
  std::vector<CohortScan> out;
  for (const auto& s : scans) {
    out.push_back({s.meta.scan_id, s.meta.patient_id, s.meta.sex, s.meta.age_years,
                   s.volumes_ml(options.spacing_mm)});
  }
  return out;
}

json SynthCohort::truth_json() const {
  return {{"scans", scans.size()},
          {"seed", options.seed},
          {"symmetry", symmetry_ids},
          {"truncation", truncation_ids},
          {"outlier", outlier_ids},
          {"duplicate_patients", duplicate_patients},
          {"gallbladder_missing", gallbladder_missing_ids}};
}

VoxelGrid synth_grid(const SynthScan& scan, const Vec3& spacing_mm) {
  std::size_t total = 0;
  for (const auto& [id, c] : scan.counts) total += c;
  GridTemplate tpl;
  tpl.dims.nx = 32;
  tpl.dims.ny = 32;
  tpl.dims.nz = (total + 1023) / 1024 + 2;
  tpl.spacing_mm = spacing_mm;
  VoxelGrid grid(tpl);
  auto labels = grid.labels();
  // One empty slice below; structures laid out in id order.
  std::size_t pos = 1024;
  for (const auto& [id, c] : scan.counts) {
    std::fill_n(labels.begin() + static_cast<std::ptrdiff_t>(pos), c, id);
    pos += c;
  }
  return grid;
}

void write_fixture(const SynthCohort& cohort, const std::filesystem::path& dir, bool compress) {
  std::filesystem::create_directories(dir / "volumes");
  std::ostringstream csv;
  csv << "scan_id,patient_id,sex,age_years,height_m,weight_kg,race\n";
  for (const auto& s : cohort.scans) {
    write_label_grid(synth_grid(s, cohort.options.spacing_mm), dir / "volumes" / (s.meta.scan_id + ".lvol"),
                     compress);
    const auto& m = s.meta;
    csv << m.scan_id << ',' << m.patient_id << ',' << to_string(m.sex) << ',' << m.age_years << ',';
    if (m.height_m) csv << *m.height_m;
    csv << ',';
    if (m.weight_kg) csv << *m.weight_kg;
    csv << ',' << m.race << '\n';
  }
  catalog::write_file_atomic(dir / "meta.csv", csv.str());
  catalog::write_file_atomic(dir / "truth.json", cohort.truth_json().dump(2) + "\n");
}

}  // namespace phantomforge::synth
