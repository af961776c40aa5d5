// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <json.hpp>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phantomforge/grid.hpp"

namespace phantomforge {

enum class StructureGroup { kComposition, kSkeletal, kAbdominal, kGeneral };
enum class Sex { kMale, kFemale, kUnknown };

std::string_view to_string(StructureGroup group);
std::string_view to_string(Sex sex);
/// Accepts "male"/"m", "female"/"f", "unknown"/"" (case-insensitive).
Sex parse_sex(std::string_view text);

struct StructureDef {
  Label id = 0;
  std::string name;
  StructureGroup group = StructureGroup::kGeneral;
  std::optional<Label> pair_id;
  std::optional<Sex> sex_specific;
  bool expected = true;
};

using StructurePair = std::pair<Label, Label>;

/// Registry of segmented structures. Immutable after construction.
class Taxonomy {
 public:
  /// Validates ids/names, pair symmetry, the symmetry set and the skull trio.
  /// An absent symmetry set defaults to all declared pairs.
  Taxonomy(std::vector<StructureDef> structures, std::optional<std::vector<StructurePair>> symmetry_set,
           std::array<Label, 3> skull_trio);

  static Taxonomy from_json(const nlohmann::json& doc);
  static Taxonomy load(const std::filesystem::path& path);
  /// The bundled 140-structure registry.
  static const Taxonomy& default_taxonomy();

  nlohmann::json to_json() const;

  const std::vector<StructureDef>& structures() const { return structures_; }
  const std::vector<StructurePair>& symmetry_set() const { return symmetry_set_; }
  const std::array<Label, 3>& skull_trio() const { return skull_trio_; }

  const StructureDef* find(Label id) const;
  const StructureDef* find(std::string_view name) const;
  bool contains(Label id) const { return find(id) != nullptr; }
  std::size_t size() const { return structures_.size(); }

 private:
  std::vector<StructureDef> structures_;  // sorted by id
  std::map<Label, std::size_t> by_id_;
  std::map<std::string, std::size_t, std::less<>> by_name_;
  std::vector<StructurePair> symmetry_set_;
  std::array<Label, 3> skull_trio_{};
};

/// Contralateral pairs declared through pair_id, as (smaller id, larger id),
/// ascending by the first id.
std::vector<StructurePair> symmetric_pairs(const Taxonomy& taxonomy);

/// Structures flagged `expected`, minus those specific to the other sex.
/// Unknown sex excludes nothing.
std::set<Label> expected_structures(const Taxonomy& taxonomy, Sex sex);

}  // namespace phantomforge
