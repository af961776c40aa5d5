// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/catalog/summary.hpp"

#include <cmath>

#include "phantomforge/error.hpp"

namespace phantomforge::catalog {
namespace {

using nlohmann::json;

int bin_of(double value, double width) { return static_cast<int>(std::floor(value / width + 1e-9)); }

json moments_json(const MomentStats& m) {
  json doc = {{"n", m.n}, {"mean", m.mean}, {"std", m.std}};
  if (m.n == 1) doc["note"] = "single sample, std reported as 0";
  return doc;
}

void require_nonempty(const std::vector<PhantomManifest>& manifests) {
  if (manifests.empty()) {
    throw Error(ErrorCode::kInsufficientData, "no accepted phantoms to summarize");
  }
}

}  // namespace

MomentStats moments(const std::vector<double>& values) {
  MomentStats m;
  m.n = values.size();
  if (m.n == 0) return m;
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(m.n);
  if (m.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(m.n - 1));
  }
  return m;
}

DemographicsSummary demographics_summary(const std::vector<PhantomManifest>& manifests) {
  require_nonempty(manifests);
  DemographicsSummary s;
  s.phantoms = manifests.size();
  std::map<std::string, std::vector<double>> ages;
  for (const char* sex : {"male", "female", "unknown"}) s.sex_counts[sex] = 0;
  for (const auto& m : manifests) {
    const std::string sex(to_string(m.patient.sex));
    ++s.sex_counts[sex];
    ages[sex].push_back(m.patient.age_years);
    const int bin = bin_of(m.patient.age_years, s.age_bin_years) * static_cast<int>(s.age_bin_years);
    ++s.age_histogram[m.patient.race][bin];
    if (m.patient.height_m && m.patient.weight_kg) {
      ++s.height_weight[{bin_of(*m.patient.height_m, s.height_bin_m),
                         bin_of(*m.patient.weight_kg, s.weight_bin_kg)}];
    } else {
      ++s.missing_height_weight;
    }
  }
  for (const auto& [sex, values] : ages) s.age_by_sex[sex] = moments(values);
  return s;
}

json DemographicsSummary::to_json() const {
  json age_hist = json::object();
  for (const auto& [race, bins] : age_histogram) {
    json list = json::array();
    for (const auto& [start, count] : bins) {
      list.push_back({{"age_min", start}, {"age_max", start + age_bin_years}, {"count", count}});
    }
    age_hist[race] = list;
  }
  json by_sex = json::object();
  for (const auto& [sex, m] : age_by_sex) by_sex[sex] = moments_json(m);
  json cells = json::array();
  for (const auto& [bins, count] : height_weight) {
    cells.push_back({{"height_min_m", bins.first * height_bin_m},
                     {"height_max_m", (bins.first + 1) * height_bin_m},
                     {"weight_min_kg", bins.second * weight_bin_kg},
                     {"weight_max_kg", (bins.second + 1) * weight_bin_kg},
                     {"count", count}});
  }
  return {{"phantoms", phantoms},
          {"sex_counts", sex_counts},
          {"age_histogram", {{"bin_years", age_bin_years}, {"by_race", age_hist}}},
          {"age_by_sex", by_sex},
          {"height_weight_histogram",
           {{"height_bin_m", height_bin_m},
            {"weight_bin_kg", weight_bin_kg},
            {"cells", cells},
            {"missing", missing_height_weight}}}};
}

std::vector<StructureVolumeStats> volume_summary(const std::vector<PhantomManifest>& manifests,
                                                 const Taxonomy& taxonomy) {
  require_nonempty(manifests);
  std::map<Label, std::vector<double>> nonzero;
  for (const auto& m : manifests) {
    for (const auto& s : m.structures) {
      if (s.volume_ml > 0.0) nonzero[s.id].push_back(s.volume_ml);
    }
  }
  std::vector<StructureVolumeStats> out;
  for (const auto& def : taxonomy.structures()) {
    StructureVolumeStats st;
    st.id = def.id;
    st.name = def.name;
    // Sex-specific structures are judged only against phantoms expected to have them.
    for (const auto& m : manifests) {
      if (def.sex_specific && m.patient.sex != Sex::kUnknown && m.patient.sex != *def.sex_specific) {
        continue;
      }
      ++st.phantoms;
    }
    const auto it = nonzero.find(def.id);
    st.volume_ml = moments(it == nonzero.end() ? std::vector<double>{} : it->second);
    st.missing_fraction =
        st.phantoms == 0 ? 0.0
                         : 1.0 - static_cast<double>(st.volume_ml.n) / static_cast<double>(st.phantoms);
    out.push_back(st);
  }
  return out;
}

json to_json(const std::vector<StructureVolumeStats>& stats) {
  json list = json::array();
  for (const auto& s : stats) {
    list.push_back({{"id", s.id},
                    {"name", s.name},
                    {"phantoms", s.phantoms},
                    {"volume_ml", moments_json(s.volume_ml)},
                    {"missing_fraction", s.missing_fraction}});
  }
  return {{"structures", list}};
}

}  // namespace phantomforge::catalog
