// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/catalog/records.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "phantomforge/error.hpp"

namespace phantomforge::catalog {
namespace {

using nlohmann::json;

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_double(const json& doc, const char* key) {
  if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
  return doc[key].get<double>();
}

json vec3(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Vec3 vec3_from(const json& doc) {
  return {doc.at(0).get<double>(), doc.at(1).get<double>(), doc.at(2).get<double>()};
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kFormat, "metadata " + what + " is not a number: \"" + text + "\"");
  }
}

}  // namespace

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ScanMetadata::validate() const {
  if (scan_id.empty()) throw Error(ErrorCode::kValidation, "metadata row without scan_id");
  if (scan_id.find_first_of("/\\") != std::string::npos || scan_id == "." || scan_id == "..") {
    throw Error(ErrorCode::kValidation, "scan_id \"" + scan_id + "\" is not a valid file name");
  }
  if (patient_id.empty()) throw Error(ErrorCode::kValidation, "scan " + scan_id + " has no patient_id");
  if (!(age_years >= 0.0)) throw Error(ErrorCode::kValidation, "scan " + scan_id + " has a negative age");
  if (height_m && !(*height_m > 0.0)) {
    throw Error(ErrorCode::kValidation, "scan " + scan_id + " has a non-positive height");
  }
  if (weight_kg && !(*weight_kg > 0.0)) {
    throw Error(ErrorCode::kValidation, "scan " + scan_id + " has a non-positive weight");
  }
}

json ScanMetadata::to_json() const {
  return {{"scan_id", scan_id},         {"patient_id", patient_id}, {"sex", to_string(sex)},
          {"age_years", age_years},     {"height_m", opt(height_m)}, {"weight_kg", opt(weight_kg)},
          {"race", race}};
}

ScanMetadata ScanMetadata::from_json(const json& doc) {
  try {
    ScanMetadata m;
    m.scan_id = doc.at("scan_id").get<std::string>();
    m.patient_id = doc.at("patient_id").get<std::string>();
    m.sex = parse_sex(doc.value("sex", std::string("unknown")));
    m.age_years = doc.at("age_years").get<double>();
    m.height_m = opt_double(doc, "height_m");
    m.weight_kg = opt_double(doc, "weight_kg");
    m.race = doc.value("race", std::string("unknown"));
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed scan metadata: ") + e.what());
  }
}

std::vector<ScanMetadata> load_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open metadata " + path.string());
  std::vector<ScanMetadata> rows;
  if (path.extension() == ".json") {
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormat, "invalid metadata JSON " + path.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw Error(ErrorCode::kFormat, "metadata JSON must be an array");
    for (const auto& row : doc) rows.push_back(ScanMetadata::from_json(row));
    return rows;
  }
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kFormat, "metadata CSV is empty");
  const std::vector<std::string> header = split_csv(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required : {"scan_id", "patient_id", "age_years"}) {
    if (!col.count(required)) {
      throw Error(ErrorCode::kFormat, std::string("metadata CSV lacks column ") + required);
    }
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    auto cell = [&](const char* name) -> std::string {
      const auto it = col.find(name);
      if (it == col.end() || it->second >= cells.size()) return "";
      return cells[it->second];
    };
    ScanMetadata m;
    m.scan_id = cell("scan_id");
    m.patient_id = cell("patient_id");
    const std::string where = "(line " + std::to_string(line_no) + ")";
    m.sex = cell("sex").empty() ? Sex::kUnknown : parse_sex(cell("sex"));
    m.age_years = parse_number(cell("age_years"), "age_years " + where);
    if (!cell("height_m").empty()) m.height_m = parse_number(cell("height_m"), "height_m " + where);
    if (!cell("weight_kg").empty()) m.weight_kg = parse_number(cell("weight_kg"), "weight_kg " + where);
    if (!cell("race").empty()) m.race = cell("race");
    m.validate();
    rows.push_back(std::move(m));
  }
  return rows;
}

std::optional<double> PatientRecord::bmi() const {
  if (!height_m || !weight_kg) return std::nullopt;
  return *weight_kg / (*height_m * *height_m);
}

json PatientRecord::to_json() const {
  const auto b = bmi();
  return {{"patient_id", patient_id}, {"sex", to_string(sex)},         {"age_years", age_years},
          {"height_m", opt(height_m)}, {"weight_kg", opt(weight_kg)},   {"race", race},
          {"bmi", opt(b)},             {"scans", scans}};
}

PatientRecord PatientRecord::from_json(const json& doc) {
  try {
    PatientRecord p;
    p.patient_id = doc.at("patient_id").get<std::string>();
    p.sex = parse_sex(doc.at("sex").get<std::string>());
    p.age_years = doc.at("age_years").get<double>();
    p.height_m = opt_double(doc, "height_m");
    p.weight_kg = opt_double(doc, "weight_kg");
    p.race = doc.at("race").get<std::string>();
    p.scans = doc.at("scans").get<std::vector<std::string>>();
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed patient record: ") + e.what());
  }
}

json ScanRecord::to_json() const {
  return {{"scan_id", scan_id},
          {"patient_id", patient_id},
          {"age_years", age_years},
          {"source", source},
          {"grid_file", grid_file},
          {"dims", {geometry.dims.nx, geometry.dims.ny, geometry.dims.nz}},
          {"spacing_mm", vec3(geometry.spacing_mm)},
          {"origin_mm", vec3(geometry.origin_mm)},
          {"volumes", volumes.to_json()},
          {"ingested_at", ingested_at}};
}

ScanRecord ScanRecord::from_json(const json& doc) {
  try {
    ScanRecord s;
    s.scan_id = doc.at("scan_id").get<std::string>();
    s.patient_id = doc.at("patient_id").get<std::string>();
    s.age_years = doc.at("age_years").get<double>();
    s.source = doc.at("source").get<std::string>();
    s.grid_file = doc.at("grid_file").get<std::string>();
    const auto dims = doc.at("dims").get<std::vector<std::size_t>>();
    if (dims.size() != 3) throw Error(ErrorCode::kFormat, "scan dims must have 3 entries");
    s.geometry.dims = {dims[0], dims[1], dims[2]};
    s.geometry.spacing_mm = vec3_from(doc.at("spacing_mm"));
    s.geometry.origin_mm = vec3_from(doc.at("origin_mm"));
    s.volumes = VolumeTable::from_json(doc.at("volumes"));
    s.ingested_at = doc.at("ingested_at").get<std::string>();
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed scan record: ") + e.what());
  }
}

json PhantomManifest::to_json() const {
  json list = json::array();
  for (const auto& s : structures) {
    list.push_back({{"id", s.id},
                    {"name", s.name},
                    {"volume_ml", s.volume_ml},
                    {"mesh_path", s.mesh_path ? json(*s.mesh_path) : json(nullptr)},
                    {"voxel_source", s.voxel_source}});
  }
  return {{"phantom_id", phantom_id},
          {"patient", patient.to_json()},
          {"structures", list},
          {"qc", qc.to_json()},
          {"review_rating", review_rating ? json(*review_rating) : json(nullptr)},
          {"pipeline_version", pipeline_version},
          {"created_at", created_at}};
}

PhantomManifest PhantomManifest::from_json(const json& doc) {
  try {
    PhantomManifest m;
    m.phantom_id = doc.at("phantom_id").get<std::string>();
    m.patient = PatientRecord::from_json(doc.at("patient"));
    for (const auto& s : doc.at("structures")) {
      ManifestStructure ms;
      ms.id = s.at("id").get<Label>();
      ms.name = s.at("name").get<std::string>();
      ms.volume_ml = s.at("volume_ml").get<double>();
      if (!s.at("mesh_path").is_null()) ms.mesh_path = s["mesh_path"].get<std::string>();
      ms.voxel_source = s.at("voxel_source").get<std::string>();
      m.structures.push_back(std::move(ms));
    }
    m.qc = QcOutcome::from_json(doc.at("qc"));
    if (!doc.at("review_rating").is_null()) m.review_rating = doc["review_rating"].get<int>();
    m.pipeline_version = doc.at("pipeline_version").get<std::string>();
    m.created_at = doc.at("created_at").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed phantom manifest: ") + e.what());
  }
}

void PhantomQuery::validate() const {
  if (age_min && age_max && *age_min > *age_max) {
    throw Error(ErrorCode::kInvalidArgument, "age_min is greater than age_max");
  }
  if (bmi_min && bmi_max && *bmi_min > *bmi_max) {
    throw Error(ErrorCode::kInvalidArgument, "bmi_min is greater than bmi_max");
  }
}

bool PhantomQuery::matches(const PhantomManifest& m, const Taxonomy& taxonomy) const {
  if (!include_all && m.qc.final_status != FinalStatus::kAccepted) return false;
  if (sex && m.patient.sex != *sex) return false;
  if (age_min && m.patient.age_years < *age_min) return false;
  if (age_max && m.patient.age_years > *age_max) return false;
  if (race && m.patient.race != *race) return false;
  if (bmi_min || bmi_max) {
    const auto b = m.patient.bmi();
    if (!b) return false;
    if (bmi_min && *b < *bmi_min) return false;
    if (bmi_max && *b > *bmi_max) return false;
  }
  if (structure) {
    Label id = 0;
    if (const StructureDef* def = taxonomy.find(std::string_view(*structure))) {
      id = def->id;
    } else {
      try {
        id = static_cast<Label>(std::stoul(*structure));
      } catch (const std::exception&) {
        throw Error(ErrorCode::kInvalidArgument, "unknown structure \"" + *structure + "\"");
      }
    }
    bool present = false;
    for (const auto& s : m.structures) present = present || (s.id == id && s.volume_ml > 0.0);
    if (!present) return false;
  }
  return true;
}

}  // namespace phantomforge::catalog
