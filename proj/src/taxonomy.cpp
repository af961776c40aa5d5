// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <json.hpp>

#include "phantomforge/error.hpp"

namespace phantomforge {

namespace detail {
extern const std::string_view kDefaultTaxonomyJson;
}

namespace {

using nlohmann::json;

StructureGroup parse_group(const std::string& text) {
  if (text == "composition") return StructureGroup::kComposition;
  if (text == "skeletal") return StructureGroup::kSkeletal;
  if (text == "abdominal") return StructureGroup::kAbdominal;
  if (text == "general") return StructureGroup::kGeneral;
  throw Error(ErrorCode::kValidation, "unknown structure group \"" + text + "\"");
}

Label checked_label(long long v, const char* what) {
  if (v < 1 || v > 65535) {
    throw Error(ErrorCode::kValidation, std::string(what) + " must be in 1..65535");
  }
  return static_cast<Label>(v);
}

}  // namespace

std::string_view to_string(StructureGroup group) {
  switch (group) {
    case StructureGroup::kComposition: return "composition";
    case StructureGroup::kSkeletal: return "skeletal";
    case StructureGroup::kAbdominal: return "abdominal";
    case StructureGroup::kGeneral: return "general";
  }
  return "general";
}

std::string_view to_string(Sex sex) {
  switch (sex) {
    case Sex::kMale: return "male";
    case Sex::kFemale: return "female";
    case Sex::kUnknown: return "unknown";
  }
  return "unknown";
}

Sex parse_sex(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "male" || lower == "m") return Sex::kMale;
  if (lower == "female" || lower == "f") return Sex::kFemale;
  if (lower == "unknown" || lower == "u" || lower.empty()) return Sex::kUnknown;
  throw Error(ErrorCode::kValidation, "unrecognized sex \"" + std::string(text) + "\"");
}

Taxonomy::Taxonomy(std::vector<StructureDef> structures,
                   std::optional<std::vector<StructurePair>> symmetry_set,
                   std::array<Label, 3> skull_trio)
    : structures_(std::move(structures)), skull_trio_(skull_trio) {
  std::sort(structures_.begin(), structures_.end(),
            [](const StructureDef& a, const StructureDef& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < structures_.size(); ++i) {
    const StructureDef& s = structures_[i];
    if (s.id == 0) throw Error(ErrorCode::kValidation, "structure id 0 is reserved for background");
    if (s.name.empty()) throw Error(ErrorCode::kValidation, "structure names must be non-empty");
    if (!by_id_.emplace(s.id, i).second) {
      throw Error(ErrorCode::kValidation, "duplicate structure id " + std::to_string(s.id));
    }
    if (!by_name_.emplace(s.name, i).second) {
      throw Error(ErrorCode::kValidation, "duplicate structure name \"" + s.name + "\"");
    }
  }
  for (const StructureDef& s : structures_) {
    if (!s.pair_id) continue;
    if (*s.pair_id == s.id) {
      throw Error(ErrorCode::kValidation, "structure " + s.name + " is paired with itself");
    }
    const StructureDef* partner = find(*s.pair_id);
    if (partner == nullptr) {
      throw Error(ErrorCode::kValidation,
                  "structure " + s.name + " pairs with unknown id " + std::to_string(*s.pair_id));
    }
    if (partner->pair_id != s.id) {
      throw Error(ErrorCode::kValidation, "asymmetric pair: " + s.name + " -> " + partner->name +
                                              " but not the reverse");
    }
    if (partner->group != s.group) {
      throw Error(ErrorCode::kValidation,
                  "paired structures " + s.name + " and " + partner->name + " differ in group");
    }
  }

  if (symmetry_set) {
    std::set<Label> seen;
    for (auto [a, b] : *symmetry_set) {
      const StructureDef* sa = find(a);
      if (sa == nullptr || !contains(b) || sa->pair_id != b) {
        throw Error(ErrorCode::kValidation, "symmetry_set entry [" + std::to_string(a) + "," +
                                                std::to_string(b) +
                                                "] is not a declared structure pair");
      }
      if (!seen.insert(a).second || !seen.insert(b).second) {
        throw Error(ErrorCode::kValidation, "symmetry_set repeats structure ids");
      }
      symmetry_set_.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(symmetry_set_.begin(), symmetry_set_.end());
  } else {
    symmetry_set_ = symmetric_pairs(*this);
  }

  std::set<Label> trio(skull_trio_.begin(), skull_trio_.end());
  if (trio.size() != 3) throw Error(ErrorCode::kValidation, "skull_trio must hold 3 distinct ids");
  for (Label id : skull_trio_) {
    if (!contains(id)) {
      throw Error(ErrorCode::kValidation, "skull_trio references unknown id " + std::to_string(id));
    }
  }
}

const StructureDef* Taxonomy::find(Label id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &structures_[it->second];
}

const StructureDef* Taxonomy::find(std::string_view name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : &structures_[it->second];
}

Taxonomy Taxonomy::from_json(const json& doc) {
  try {
    std::vector<StructureDef> defs;
    for (const json& item : doc.at("structures")) {
      StructureDef s;
      s.id = checked_label(item.at("id").get<long long>(), "structure id");
      s.name = item.at("name").get<std::string>();
      s.group = parse_group(item.at("group").get<std::string>());
      if (item.contains("pair_id") && !item["pair_id"].is_null()) {
        s.pair_id = checked_label(item["pair_id"].get<long long>(), "pair_id");
      }
      if (item.contains("sex_specific") && !item["sex_specific"].is_null()) {
        const Sex sex = parse_sex(item["sex_specific"].get<std::string>());
        if (sex == Sex::kUnknown) {
          throw Error(ErrorCode::kValidation, "sex_specific must be male or female");
        }
        s.sex_specific = sex;
      }
      s.expected = item.value("expected", true);
      defs.push_back(std::move(s));
    }
    std::optional<std::vector<StructurePair>> symmetry;
    if (doc.contains("symmetry_set")) {
      symmetry.emplace();
      for (const json& pair : doc["symmetry_set"]) {
        if (pair.size() != 2) throw Error(ErrorCode::kValidation, "symmetry_set entries are [a,b]");
        symmetry->emplace_back(checked_label(pair[0].get<long long>(), "symmetry id"),
                               checked_label(pair[1].get<long long>(), "symmetry id"));
      }
    }
    const auto trio = doc.at("skull_trio").get<std::vector<long long>>();
    if (trio.size() != 3) throw Error(ErrorCode::kValidation, "skull_trio must hold 3 ids");
    return Taxonomy(std::move(defs), std::move(symmetry),
                    {checked_label(trio[0], "skull_trio id"), checked_label(trio[1], "skull_trio id"),
                     checked_label(trio[2], "skull_trio id")});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kValidation, std::string("malformed taxonomy: ") + e.what());
  }
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open taxonomy " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, "taxonomy is not valid JSON: " + std::string(e.what()));
  }
  return from_json(doc);
}

const Taxonomy& Taxonomy::default_taxonomy() {
  static const Taxonomy instance = from_json(json::parse(detail::kDefaultTaxonomyJson));
  return instance;
}

json Taxonomy::to_json() const {
  json structures = json::array();
  for (const StructureDef& s : structures_) {
    json item = {{"id", s.id}, {"name", s.name}, {"group", to_string(s.group)},
                 {"expected", s.expected}};
    if (s.pair_id) item["pair_id"] = *s.pair_id;
    if (s.sex_specific) item["sex_specific"] = to_string(*s.sex_specific);
    structures.push_back(std::move(item));
  }
  json symmetry = json::array();
  for (auto [a, b] : symmetry_set_) symmetry.push_back({a, b});
  return {{"structures", std::move(structures)},
          {"symmetry_set", std::move(symmetry)},
          {"skull_trio", {skull_trio_[0], skull_trio_[1], skull_trio_[2]}}};
}

std::vector<StructurePair> symmetric_pairs(const Taxonomy& taxonomy) {
  std::vector<StructurePair> pairs;
  for (const StructureDef& s : taxonomy.structures()) {
    if (s.pair_id && s.id < *s.pair_id) pairs.emplace_back(s.id, *s.pair_id);
  }
  return pairs;  // structures() is id-sorted
}

std::set<Label> expected_structures(const Taxonomy& taxonomy, Sex sex) {
  std::set<Label> out;
  for (const StructureDef& s : taxonomy.structures()) {
    if (!s.expected) continue;
    if (sex != Sex::kUnknown && s.sex_specific && *s.sex_specific != sex) continue;
    out.insert(s.id);
  }
  return out;
}

}  // namespace phantomforge
