// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/catalog/catalog.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "phantomforge/error.hpp"
#include "phantomforge/mesh/mesh_io.hpp"
#include "phantomforge/parallel.hpp"
#include "phantomforge/version.hpp"
#include "phantomforge/voxelize.hpp"

namespace phantomforge::catalog {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kGridFile = "volume.lvol";

class FileLock {
 public:
  explicit FileLock(const fs::path& root) {
    const fs::path path = root / ".lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::kIo, "cannot open catalog lock " + path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::kIo, "cannot lock catalog " + root.string());
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, "invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& doc) { write_file_atomic(path, doc.dump(2) + "\n"); }

std::string temp_suffix() {
  static thread_local std::mt19937_64 rng(std::random_device{}());
  std::ostringstream s;
  s << ".tmp-" << ::getpid() << '-' << std::hex << rng();
  return s.str();
}

std::string format_spacing(double mm) {
  std::ostringstream s;
  s << mm;
  return s.str();
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += temp_suffix();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot replace " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json PendingItem::to_json() const {
  return {{"scan_id", scan_id}, {"patient_id", patient_id}, {"previews", previews}, {"qc", qc.to_json()}};
}

Catalog::Catalog(fs::path root, PipelineConfig config, Taxonomy taxonomy)
    : root_(std::move(root)), config_(std::move(config)), taxonomy_(std::move(taxonomy)) {}

Catalog Catalog::init(const fs::path& root, const PipelineConfig& config) {
  if (fs::exists(root / "config.json")) return open(root);
  config.validate();
  Taxonomy taxonomy = config.taxonomy_path ? Taxonomy::load(*config.taxonomy_path)
                                           : Taxonomy::default_taxonomy();
  std::error_code ec;
  fs::create_directories(root / "scans", ec);
  fs::create_directories(root / "phantoms", ec);
  fs::create_directories(root / "qc", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create catalog at " + root.string());
  FileLock lock(root);
  write_json(root / "taxonomy.json", taxonomy.to_json());
  write_json(root / "patients.json", json::array());
  if (!fs::exists(root / "reviews.log")) write_file_atomic(root / "reviews.log", "");
  write_json(root / "config.json", config.to_json());
  return Catalog(root, config, std::move(taxonomy));
}

Catalog Catalog::open(const fs::path& root) {
  if (!fs::exists(root / "config.json")) {
    throw Error(ErrorCode::kNotFound, "no catalog at " + root.string() + " (missing config.json)");
  }
  PipelineConfig config = PipelineConfig::from_json(read_json(root / "config.json"));
  Taxonomy taxonomy = Taxonomy::from_json(read_json(root / "taxonomy.json"));
  return Catalog(root, std::move(config), std::move(taxonomy));
}

fs::path Catalog::scan_dir(const std::string& scan_id) const { return root_ / "scans" / scan_id; }
fs::path Catalog::phantom_dir(const std::string& phantom_id) const {
  return root_ / "phantoms" / phantom_id;
}

std::map<std::string, PatientRecord> Catalog::patient_map() const {
  std::map<std::string, PatientRecord> out;
  for (const auto& doc : read_json(root_ / "patients.json")) {
    PatientRecord p = PatientRecord::from_json(doc);
    out.emplace(p.patient_id, std::move(p));
  }
  return out;
}

std::vector<PatientRecord> Catalog::patients() const {
  std::vector<PatientRecord> out;
  for (auto& [id, p] : patient_map()) out.push_back(std::move(p));
  return out;
}

ScanRecord Catalog::ingest_scan(const VoxelGrid& grid, const ScanMetadata& meta,
                                const std::string& source) {
  meta.validate();
  grid.geometry().validate();
  FileLock lock(root_);
  const fs::path dir = scan_dir(meta.scan_id);
  if (fs::exists(dir)) {
    throw Error(ErrorCode::kConflict, "scan " + meta.scan_id + " is already in the catalog");
  }
  auto patients = patient_map();
  if (auto it = patients.find(meta.patient_id); it != patients.end()) {
    const PatientRecord& p = it->second;
    if (p.sex != meta.sex && p.sex != Sex::kUnknown && meta.sex != Sex::kUnknown) {
      throw Error(ErrorCode::kConflict, "scan " + meta.scan_id + " gives patient " + meta.patient_id +
                                            " a different sex than earlier scans");
    }
  }

  ScanRecord record;
  record.scan_id = meta.scan_id;
  record.patient_id = meta.patient_id;
  record.age_years = meta.age_years;
  record.source = source;
  record.grid_file = kGridFile;
  record.geometry = grid.geometry();
  record.volumes = structure_volumes(grid, taxonomy_);
  record.ingested_at = utc_timestamp();

  // Stage everything in a sibling directory so a failed ingest leaves no trace.
  fs::path staging = dir;
  staging += temp_suffix();
  try {
    fs::create_directories(staging);
    write_label_grid(grid, staging / kGridFile, true);
    write_file_atomic(staging / "volumes.csv", record.volumes.to_csv(taxonomy_));
    write_json(staging / "volumes.json", record.volumes.to_json());
    write_json(staging / "scan.json", record.to_json());
    write_json(staging / "metadata.json", meta.to_json());
    for (ProjectionAxis axis : kProjectionAxes) {
      write_file_atomic(staging / ("preview_" + std::string(to_string(axis)) + ".png"),
                        encode_png(max_label_projection(grid, axis)));
    }
    fs::rename(staging, dir);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }

  PatientRecord& p = patients[meta.patient_id];
  const bool newest = p.scans.empty() || meta.age_years >= p.age_years;
  p.patient_id = meta.patient_id;
  if (p.sex == Sex::kUnknown) p.sex = meta.sex;
  if (newest) {
    p.age_years = meta.age_years;
    p.race = meta.race;
    if (meta.height_m) p.height_m = meta.height_m;
    if (meta.weight_kg) p.weight_kg = meta.weight_kg;
  }
  p.scans.push_back(meta.scan_id);
  json list = json::array();
  for (const auto& [id, rec] : patients) list.push_back(rec.to_json());
  write_json(root_ / "patients.json", list);
  return record;
}

ScanRecord Catalog::ingest_file(const fs::path& path, const ScanMetadata& meta) {
  return ingest_scan(read_label_grid(path), meta, fs::absolute(path).lexically_normal().string());
}

std::vector<ScanRecord> Catalog::scans() const {
  std::vector<ScanRecord> out;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root_ / "scans")) {
    if (entry.is_directory() && fs::exists(entry.path() / "scan.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) out.push_back(ScanRecord::from_json(read_json(d / "scan.json")));
  return out;
}

ScanRecord Catalog::scan(const std::string& scan_id) const {
  const fs::path path = scan_dir(scan_id) / "scan.json";
  if (scan_id.find('/') != std::string::npos || !fs::exists(path)) {
    throw Error(ErrorCode::kNotFound, "unknown scan " + scan_id);
  }
  return ScanRecord::from_json(read_json(path));
}

VoxelGrid Catalog::load_grid(const std::string& scan_id) const {
  const ScanRecord record = scan(scan_id);
  return read_label_grid(scan_dir(scan_id) / record.grid_file, GridFormat::kRawSidecar);
}

bool Catalog::has_qc() const { return fs::exists(root_ / "qc" / "base_outcomes.json"); }

std::vector<QcOutcome> Catalog::base_outcomes() const {
  if (!has_qc()) throw Error(ErrorCode::kInvalidState, "QC has not been run on this catalog");
  std::vector<QcOutcome> out;
  const json stored = read_json(root_ / "qc" / "base_outcomes.json");
  for (const auto& doc : stored.at("outcomes")) {
    out.push_back(QcOutcome::from_json(doc));
  }
  return out;
}

std::vector<ReviewRecord> Catalog::review_log() const {
  std::vector<ReviewRecord> out;
  std::ifstream in(root_ / "reviews.log");
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(ReviewRecord::from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormat, "reviews.log line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::vector<QcOutcome> Catalog::replay(std::vector<QcOutcome> base,
                                       const std::vector<ReviewRecord>& log) const {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < base.size(); ++i) index[base[i].scan_id] = i;
  for (const ReviewRecord& r : log) {
    const auto it = index.find(r.scan_id);
    // Verdicts for scans that are no longer pending (after a QC re-run) lapse.
    if (it == index.end() || base[it->second].final_status != FinalStatus::kPendingReview) continue;
    if (r.rating < config_.review.rating_min || r.rating > config_.review.rating_max) continue;
    apply_review(base[it->second], r, config_.review.rating_min, config_.review.rating_max);
  }
  apply_dedup(base);
  return base;
}

std::map<std::string, FinalStatus> Catalog::replay_reviews() const {
  std::map<std::string, FinalStatus> out;
  for (const auto& o : replay(base_outcomes(), review_log())) out[o.scan_id] = o.final_status;
  return out;
}

void Catalog::write_manifest(const ScanRecord& scan, const QcOutcome& outcome,
                             const std::map<std::string, PatientRecord>& patients) {
  PhantomManifest m;
  m.phantom_id = scan.scan_id;
  if (auto it = patients.find(scan.patient_id); it != patients.end()) m.patient = it->second;
  m.patient.patient_id = scan.patient_id;
  m.patient.age_years = scan.age_years;
  for (const auto& [id, volume] : scan.volumes.volumes_ml()) {
    if (volume <= 0.0) continue;
    ManifestStructure s;
    s.id = id;
    s.name = taxonomy_.find(id) ? taxonomy_.find(id)->name : "";
    s.volume_ml = volume;
    if (fs::exists(mesh_path(scan.scan_id, id))) {
      s.mesh_path = fs::relative(mesh_path(scan.scan_id, id), root_).generic_string();
    }
    s.voxel_source = (fs::path("scans") / scan.scan_id / scan.grid_file).generic_string();
    m.structures.push_back(std::move(s));
  }
  m.qc = outcome;
  if (outcome.review) m.review_rating = outcome.review->rating;
  m.pipeline_version = std::string(kVersion);
  m.created_at = scan.ingested_at;
  write_json(phantom_dir(scan.scan_id) / "manifest.json", m.to_json());
}

void Catalog::store_outcomes(const std::vector<QcOutcome>& current,
                             const std::vector<std::string>& warnings,
                             const std::vector<QcOutcome>* previous) {
  std::map<std::string, const QcOutcome*> unchanged;
  if (previous) {
    for (const auto& o : *previous) unchanged[o.scan_id] = &o;
  }
  json list = json::array();
  for (const auto& o : current) list.push_back(o.to_json());
  write_json(root_ / "qc" / "outcomes.json", {{"outcomes", list}});
  FunnelReport funnel = funnel_from_outcomes(current);
  funnel.warnings = warnings;
  write_json(root_ / "qc" / "funnel.json", funnel.to_json());
  const auto patients = patient_map();
  for (const QcOutcome& o : current) {
    if (auto prev = unchanged.find(o.scan_id); prev != unchanged.end() && *prev->second == o) continue;
    if (!fs::exists(scan_dir(o.scan_id) / "scan.json")) continue;
    write_json(scan_dir(o.scan_id) / "qc.json", o.to_json());
    write_manifest(scan(o.scan_id), o, patients);
  }
}

FunnelReport Catalog::run_qc(int jobs, const std::optional<PipelineConfig>& override_config) {
  FileLock lock(root_);
  if (override_config) {
    override_config->validate();
    config_ = *override_config;
    write_json(root_ / "config.json", config_.to_json());
  }
  const auto patients = patient_map();
  std::vector<CohortScan> cohort;
  for (const ScanRecord& s : scans()) {
    CohortScan c;
    c.scan_id = s.scan_id;
    c.patient_id = s.patient_id;
    if (auto it = patients.find(s.patient_id); it != patients.end()) c.sex = it->second.sex;
    c.age_years = s.age_years;
    c.volumes_ml = s.volumes.volumes_ml();
    cohort.push_back(std::move(c));
  }
  const QcRunResult run = run_qc_pipeline(cohort, taxonomy_, config_.qc(), jobs);

  json base = json::array();
  for (const auto& o : run.outcomes) base.push_back(o.to_json());
  write_json(root_ / "qc" / "base_outcomes.json", {{"outcomes", base}, {"warnings", run.warnings}});
  json models = json::array();
  for (const auto& [id, m] : run.models) models.push_back(m.to_json());
  write_json(root_ / "qc" / "models.json", {{"models", models}});

  store_outcomes(replay(run.outcomes, review_log()), run.warnings);
  return funnel();
}

FunnelReport Catalog::funnel() const {
  if (!has_qc()) throw Error(ErrorCode::kInvalidState, "QC has not been run on this catalog");
  return FunnelReport::from_json(read_json(root_ / "qc" / "funnel.json"));
}

std::vector<QcOutcome> Catalog::outcomes() const {
  if (!has_qc()) return {};
  std::vector<QcOutcome> out;
  const json stored = read_json(root_ / "qc" / "outcomes.json");
  for (const auto& doc : stored.at("outcomes")) {
    out.push_back(QcOutcome::from_json(doc));
  }
  return out;
}

QcOutcome Catalog::outcome(const std::string& scan_id) const {
  for (auto& o : outcomes()) {
    if (o.scan_id == scan_id) return o;
  }
  scan(scan_id);  // distinguishes unknown scans from scans without QC
  throw Error(ErrorCode::kInvalidState, "QC has not been run for scan " + scan_id);
}

QcOutcome Catalog::submit_review(const std::string& scan_id, Verdict verdict, int rating,
                                 const std::string& reviewer, const std::string& notes) {
  FileLock lock(root_);
  std::vector<ReviewRecord> log = review_log();
  std::vector<QcOutcome> current = replay(base_outcomes(), log);
  const auto it = std::find_if(current.begin(), current.end(),
                               [&](const QcOutcome& o) { return o.scan_id == scan_id; });
  if (it == current.end()) throw Error(ErrorCode::kNotFound, "unknown scan " + scan_id);

  ReviewRecord record;
  record.scan_id = scan_id;
  record.verdict = verdict;
  record.rating = rating;
  record.reviewer = reviewer;
  record.notes = notes;
  record.timestamp = utc_timestamp();
  QcOutcome probe = *it;
  apply_review(probe, record, config_.review.rating_min, config_.review.rating_max);

  {
    const std::string line = record.to_json().dump() + "\n";
    const int fd = ::open((root_ / "reviews.log").c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0) throw Error(ErrorCode::kIo, "cannot append to reviews.log");
    const ssize_t n = ::write(fd, line.data(), line.size());
    const bool ok = n == static_cast<ssize_t>(line.size()) && ::fsync(fd) == 0;
    ::close(fd);
    if (!ok) throw Error(ErrorCode::kIo, "failed to append to reviews.log");
  }
  log.push_back(record);
  const std::vector<QcOutcome> before = std::move(current);
  current = replay(base_outcomes(), log);
  const auto base = read_json(root_ / "qc" / "base_outcomes.json");
  store_outcomes(current, base.value("warnings", std::vector<std::string>{}), &before);
  for (auto& o : current) {
    if (o.scan_id == scan_id) return o;
  }
  throw Error(ErrorCode::kInvalidState, "review vanished during replay");
}

std::vector<PendingItem> Catalog::pending_reviews() const {
  std::vector<PendingItem> out;
  for (auto& o : outcomes()) {
    if (o.final_status != FinalStatus::kPendingReview) continue;
    PendingItem item;
    item.scan_id = o.scan_id;
    item.patient_id = o.patient_id;
    for (ProjectionAxis axis : kProjectionAxes) {
      item.previews[std::string(to_string(axis))] =
          fs::relative(preview_path(o.scan_id, axis), root_).generic_string();
    }
    item.qc = std::move(o);
    out.push_back(std::move(item));
  }
  std::sort(out.begin(), out.end(),
            [](const PendingItem& a, const PendingItem& b) { return a.scan_id < b.scan_id; });
  return out;
}

PhantomManifest Catalog::manifest(const std::string& phantom_id) const {
  const fs::path path = phantom_dir(phantom_id) / "manifest.json";
  if (phantom_id.find('/') != std::string::npos || !fs::exists(path)) {
    throw Error(ErrorCode::kNotFound, "unknown phantom " + phantom_id);
  }
  return PhantomManifest::from_json(read_json(path));
}

std::vector<PhantomManifest> Catalog::query_phantoms(const PhantomQuery& query) const {
  query.validate();
  std::vector<fs::path> dirs;
  if (fs::exists(root_ / "phantoms")) {
    for (const auto& entry : fs::directory_iterator(root_ / "phantoms")) {
      if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<PhantomManifest> out;
  for (const auto& d : dirs) {
    PhantomManifest m = PhantomManifest::from_json(read_json(d / "manifest.json"));
    if (query.matches(m, taxonomy_)) out.push_back(std::move(m));
  }
  return out;
}

fs::path Catalog::preview_path(const std::string& phantom_id, ProjectionAxis axis) const {
  return scan_dir(phantom_id) / ("preview_" + std::string(to_string(axis)) + ".png");
}

fs::path Catalog::mesh_path(const std::string& phantom_id, Label structure) const {
  return phantom_dir(phantom_id) / (std::to_string(structure) + ".ply");
}

std::vector<MeshArtifact> Catalog::extract_meshes(const MeshJob& job, int jobs) {
  FileLock lock(root_);
  const double lambda = job.lambda.value_or(config_.smoothing.lambda);
  const int iterations = job.iterations.value_or(config_.smoothing.iterations);
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "smoothing lambda must be in [0, 1]");
  }
  if (iterations < 0) throw Error(ErrorCode::kInvalidArgument, "smoothing iterations must be >= 0");
  if (job.structure && !taxonomy_.contains(*job.structure)) {
    throw Error(ErrorCode::kInvalidArgument,
                "structure " + std::to_string(*job.structure) + " is not in the taxonomy");
  }

  std::vector<std::string> targets;
  if (job.phantom_id) {
    scan(*job.phantom_id);
    targets.push_back(*job.phantom_id);
  } else {
    for (const auto& o : outcomes()) {
      if (o.final_status == FinalStatus::kAccepted) targets.push_back(o.scan_id);
    }
  }

  std::vector<MeshArtifact> artifacts;
  for (const std::string& id : targets) {
    const VoxelGrid grid = load_grid(id);
    const Dims d = grid.dims();
    // Bounding box of every label in one pass.
    std::map<Label, VoxelBox> boxes;
    for (std::size_t k = 0; k < d.nz; ++k) {
      for (std::size_t j = 0; j < d.ny; ++j) {
        for (std::size_t i = 0; i < d.nx; ++i) {
          const Label v = grid.at(i, j, k);
          if (v == 0) continue;
          auto [it, inserted] = boxes.try_emplace(v, VoxelBox{{i, j, k}, {i, j, k}});
          if (!inserted) {
            const std::size_t p[3] = {i, j, k};
            for (int a = 0; a < 3; ++a) {
              it->second.lo[a] = std::min(it->second.lo[a], p[a]);
              it->second.hi[a] = std::max(it->second.hi[a], p[a]);
            }
          }
        }
      }
    }
    std::vector<std::pair<Label, VoxelBox>> work;
    for (const auto& [label, box] : boxes) {
      if (!taxonomy_.contains(label)) continue;
      if (job.structure && label != *job.structure) continue;
      work.emplace_back(label, box);
    }
    std::vector<MeshArtifact> produced(work.size());
    parallel_for(work.size(), jobs, [&](std::size_t w) {
      const auto& [label, box] = work[w];
      GridTemplate crop;
      crop.dims = {box.hi[0] - box.lo[0] + 1, box.hi[1] - box.lo[1] + 1, box.hi[2] - box.lo[2] + 1};
      crop.spacing_mm = grid.spacing();
      crop.origin_mm = grid.geometry().voxel_center(box.lo[0], box.lo[1], box.lo[2]);
      VoxelGrid mask(crop);
      for (std::size_t k = 0; k < crop.dims.nz; ++k) {
        for (std::size_t j = 0; j < crop.dims.ny; ++j) {
          for (std::size_t i = 0; i < crop.dims.nx; ++i) {
            if (grid.at(box.lo[0] + i, box.lo[1] + j, box.lo[2] + k) == label) mask.set(i, j, k, 1);
          }
        }
      }
      const mesh::TriangleMesh surface =
          mesh::laplacian_smooth(mesh::marching_cubes(mask), lambda, iterations);
      const fs::path out = mesh_path(id, label);
      fs::path tmp = out;
      tmp += temp_suffix();
      mesh::export_mesh(surface, mesh::MeshFormat::kPlyBinary, tmp);
      fs::rename(tmp, out);
      produced[w] = {id, label, fs::relative(out, root_).generic_string(), surface.vertices.size(),
                     surface.triangles.size(), mesh::mesh_volume(surface)};
    });
    artifacts.insert(artifacts.end(), produced.begin(), produced.end());
  }

  if (has_qc()) {
    const auto patients = patient_map();
    const auto current = outcomes();
    for (const std::string& id : targets) {
      for (const auto& o : current) {
        if (o.scan_id == id) write_manifest(scan(id), o, patients);
      }
    }
  }
  return artifacts;
}

fs::path Catalog::voxelize_phantom(const std::string& phantom_id, double spacing_mm, int jobs) {
  if (!(spacing_mm > 0.0) || !std::isfinite(spacing_mm)) {
    throw Error(ErrorCode::kInvalidArgument, "spacing must be a positive number of millimetres");
  }
  const ScanRecord record = scan(phantom_id);
  std::vector<std::pair<Label, mesh::TriangleMesh>> meshes;
  if (fs::exists(phantom_dir(phantom_id))) {
    for (const auto& entry : fs::directory_iterator(phantom_dir(phantom_id))) {
      if (entry.path().extension() != ".ply") continue;
      const std::string stem = entry.path().stem().string();
      if (stem.empty() || !std::all_of(stem.begin(), stem.end(), ::isdigit)) continue;
      meshes.emplace_back(static_cast<Label>(std::stoul(stem)), mesh::read_ply(entry.path()));
    }
  }
  if (meshes.empty()) {
    throw Error(ErrorCode::kNotFound,
                "phantom " + phantom_id + " has no meshes; run `mesh extract` first");
  }
  std::sort(meshes.begin(), meshes.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const GridTemplate& src = record.geometry;
  GridTemplate tpl;
  tpl.spacing_mm = {spacing_mm, spacing_mm, spacing_mm};
  tpl.origin_mm = src.origin_mm;
  const std::size_t n[3] = {src.dims.nx, src.dims.ny, src.dims.nz};
  std::size_t out_dims[3];
  for (int a = 0; a < 3; ++a) {
    const double extent = static_cast<double>(n[a] - 1) * src.spacing_mm[a];
    out_dims[a] = static_cast<std::size_t>(std::floor(extent / spacing_mm + 1e-9)) + 1;
  }
  tpl.dims = {out_dims[0], out_dims[1], out_dims[2]};

  std::vector<std::pair<Label, VoxelGrid>> masks;
  std::vector<std::pair<std::uint64_t, Label>> sizes;
  for (const auto& [id, surface] : meshes) {
    VoxelGrid mask = voxelize_mesh(surface, tpl, jobs);
    std::uint64_t count = 0;
    for (Label v : mask.labels()) count += v != 0;
    sizes.emplace_back(count, id);
    masks.emplace_back(id, std::move(mask));
  }
  // Larger structures first so contained ones paint over them.
  std::sort(sizes.begin(), sizes.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<Label> priority;
  for (const auto& [count, id] : sizes) priority.push_back(id);
  const VoxelGrid phantom = assemble_phantom(masks, priority);

  const fs::path out = phantom_dir(phantom_id) / ("voxel_" + format_spacing(spacing_mm) + "mm.lvol");
  FileLock lock(root_);
  write_label_grid(phantom, out, true);
  return out;
}

DemographicsSummary Catalog::demographics() const { return demographics_summary(query_phantoms({})); }

std::vector<StructureVolumeStats> Catalog::volume_stats() const {
  return volume_summary(query_phantoms({}), taxonomy_);
}

}  // namespace phantomforge::catalog
