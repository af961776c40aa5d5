// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phantomforge/catalog/catalog.hpp"
#include "phantomforge/catalog/server.hpp"
#include "phantomforge/error.hpp"
#include "phantomforge/synth.hpp"
#include "phantomforge/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace phantomforge;

namespace {

std::string scan_id_from_path(const fs::path& p) {
  std::string name = p.filename().string();
  for (const char* ext : {".nii.gz", ".nii", ".lvol", ".raw"}) {
    const std::string e = ext;
    if (name.size() > e.size() && name.compare(name.size() - e.size(), e.size(), e) == 0) {
      return name.substr(0, name.size() - e.size());
    }
  }
  return p.stem().string();
}

fs::path require_catalog(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("PHANTOMFORGE_CATALOG"); env && *env) return env;
  throw Error(ErrorCode::kInvalidArgument, "no catalog given (use --catalog or PHANTOMFORGE_CATALOG)");
}

void print_json(const json& doc) { std::cout << doc.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PhantomForge: phantom cohort pipeline"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string catalog_dir;
  int jobs = 1;
  app.add_option("--catalog", catalog_dir, "Catalog directory (default: $PHANTOMFORGE_CATALOG)");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Add label volumes to the catalog");
  std::vector<std::string> volumes;
  std::string meta_path, ingest_config;
  ingest->add_option("volumes", volumes, "Label volumes (.lvol, .nii, .nii.gz)")->required();
  ingest->add_option("--meta", meta_path, "Metadata CSV or JSON")->required();
  ingest->add_option("--config", ingest_config, "Pipeline config used when creating the catalog");

  // qc
  auto* qc = app.add_subcommand("qc", "Quality control");
  qc->require_subcommand(1);
  auto* qc_run = qc->add_subcommand("run", "Run the QC cascade");
  std::string qc_config;
  qc_run->add_option("--config", qc_config, "Pipeline config (TOML or JSON)");
  auto* qc_report = qc->add_subcommand("report", "Print the funnel report");
  bool report_json_only = false;
  qc_report->add_flag("--json", report_json_only, "JSON only");

  // mesh
  auto* mesh = app.add_subcommand("mesh", "Surface meshes");
  mesh->require_subcommand(1);
  auto* mesh_extract = mesh->add_subcommand("extract", "Extract smoothed surface meshes");
  std::optional<std::string> mesh_phantom;
  std::optional<int> mesh_structure;
  std::optional<double> mesh_lambda;
  std::optional<int> mesh_iters;
  mesh_extract->add_option("--phantom", mesh_phantom, "Phantom id (default: all accepted)");
  mesh_extract->add_option("--structure", mesh_structure, "Structure id (default: all present)");
  mesh_extract->add_option("--lambda", mesh_lambda, "Smoothing factor in [0, 1]");
  mesh_extract->add_option("--iters", mesh_iters, "Smoothing iterations");

  // voxelize
  auto* vox = app.add_subcommand("voxelize", "Rasterize a phantom's meshes");
  std::string vox_phantom;
  double vox_spacing = 1.0;
  vox->add_option("--phantom", vox_phantom, "Phantom id")->required();
  vox->add_option("--spacing", vox_spacing, "Isotropic spacing in mm")->required()->check(CLI::PositiveNumber);

  // stats
  auto* stats = app.add_subcommand("stats", "Demographic and volume summaries");

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string ui_dir;
  serve->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--ui", ui_dir, "Static UI bundle directory");

  // review
  auto* review = app.add_subcommand("review", "Reviewer verdicts");
  review->require_subcommand(1);
  auto* review_pending = review->add_subcommand("pending", "List scans awaiting review");
  auto* review_submit = review->add_subcommand("submit", "Record a verdict");
  std::string rv_scan, rv_verdict, rv_reviewer = "cli", rv_notes;
  int rv_rating = 0;
  review_submit->add_option("scan_id", rv_scan)->required();
  review_submit->add_option("--verdict", rv_verdict, "approved | flagged | rejected")->required();
  review_submit->add_option("--rating", rv_rating, "Quality rating")->required();
  review_submit->add_option("--reviewer", rv_reviewer);
  review_submit->add_option("--notes", rv_notes);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write a seeded synthetic cohort fixture");
  std::string synth_out;
  synth::SynthOptions synth_opts;
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--scans", synth_opts.scans, "Number of scans");
  synth_cmd->add_option("--seed", synth_opts.seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) {
      const fs::path root = require_catalog(catalog_dir);
      PipelineConfig cfg = ingest_config.empty() ? PipelineConfig{} : PipelineConfig::load(ingest_config);
      catalog::Catalog cat = catalog::Catalog::init(root, cfg);
      std::map<std::string, catalog::ScanMetadata> meta;
      for (auto& m : catalog::load_metadata(meta_path)) meta[m.scan_id] = m;
      json added = json::array();
      for (const auto& v : volumes) {
        const std::string id = scan_id_from_path(v);
        auto it = meta.find(id);
        if (it == meta.end()) throw Error(ErrorCode::kNotFound, "no metadata row for scan " + id);
        const auto rec = cat.ingest_file(v, it->second);
        added.push_back(rec.scan_id);
      }
      print_json({{"ingested", added.size()}, {"scans", added}});
    } else if (qc_run->parsed()) {
      catalog::Catalog cat = catalog::Catalog::open(require_catalog(catalog_dir));
      std::optional<PipelineConfig> cfg;
      if (!qc_config.empty()) cfg = PipelineConfig::load(qc_config);
      const FunnelReport report = cat.run_qc(jobs, cfg);
      std::cout << report.to_table();
    } else if (qc_report->parsed()) {
      catalog::Catalog cat = catalog::Catalog::open(require_catalog(catalog_dir));
      const FunnelReport report = cat.funnel();
      if (!report_json_only) std::cout << report.to_table() << "\n";
      print_json(report.to_json());
    } else if (mesh_extract->parsed()) {
      catalog::Catalog cat = catalog::Catalog::open(require_catalog(catalog_dir));
      catalog::MeshJob job;
      job.phantom_id = mesh_phantom;
      if (mesh_structure) {
        if (*mesh_structure <= 0 || *mesh_structure > 0xFFFF) {
          throw Error(ErrorCode::kInvalidArgument, "structure id out of range");
        }
        job.structure = static_cast<Label>(*mesh_structure);
      }
      job.lambda = mesh_lambda;
      job.iterations = mesh_iters;
      json out = json::array();
      for (const auto& a : cat.extract_meshes(job, jobs)) {
        out.push_back({{"phantom_id", a.phantom_id},
                       {"structure", a.structure},
                       {"path", a.path},
                       {"vertices", a.vertices},
                       {"triangles", a.triangles},
                       {"volume_mm3", a.volume_mm3}});
      }
      print_json({{"meshes", out.size()}, {"artifacts", out}});
    } else if (vox->parsed()) {
      catalog::Catalog cat = catalog::Catalog::open(require_catalog(catalog_dir));
      const fs::path out = cat.voxelize_phantom(vox_phantom, vox_spacing, jobs);
      print_json({{"phantom_id", vox_phantom}, {"spacing_mm", vox_spacing}, {"path", out.string()}});
    } else if (stats->parsed()) {
      catalog::Catalog cat = catalog::Catalog::open(require_catalog(catalog_dir));
      print_json({{"demographics", cat.demographics().to_json()},
                  {"volumes", catalog::to_json(cat.volume_stats())}});
    } else if (serve->parsed()) {
      catalog::Catalog cat = catalog::Catalog::open(require_catalog(catalog_dir));
      std::optional<fs::path> ui;
      if (!ui_dir.empty()) ui = fs::path(ui_dir);
      catalog::ApiServer server(std::move(cat), ui);
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      server.listen(host, port);
    } else if (review_pending->parsed()) {
      catalog::Catalog cat = catalog::Catalog::open(require_catalog(catalog_dir));
      json items = json::array();
      for (const auto& p : cat.pending_reviews()) items.push_back(p.to_json());
      print_json({{"count", items.size()}, {"items", items}});
    } else if (review_submit->parsed()) {
      catalog::Catalog cat = catalog::Catalog::open(require_catalog(catalog_dir));
      const QcOutcome o = cat.submit_review(rv_scan, parse_verdict(rv_verdict), rv_rating, rv_reviewer, rv_notes);
      print_json(o.to_json());
    } else if (synth_cmd->parsed()) {
      const Taxonomy tax = catalog_dir.empty() && !std::getenv("PHANTOMFORGE_CATALOG")
                               ? Taxonomy::default_taxonomy()
                               : catalog::Catalog::open(require_catalog(catalog_dir)).taxonomy();
      const auto cohort = synth::synth_cohort(tax, synth_opts);
      synth::write_fixture(cohort, synth_out);
      print_json(cohort.truth_json());
    }
  } catch (const Error& e) {
    std::cerr << json{{"error", to_string(e.code())}, {"message", e.what()}}.dump() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
