// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <httplib.h>

#include <json.hpp>
#include <thread>

#include "fixtures.hpp"
#include "phantomforge/catalog/server.hpp"
#include "phantomforge/synth.hpp"

using namespace phantomforge;
using namespace phantomforge::catalog;
using nlohmann::json;

namespace {

struct Running {
  ApiServer server;
  int port;
  std::thread thread;

  explicit Running(Catalog cat) : server(std::move(cat)), port(server.bind_any_port("127.0.0.1")) {
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~Running() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

Catalog reviewed_catalog(const std::filesystem::path& root, std::string& pending_id) {
  synth::SynthOptions o;
  o.scans = 30;
  o.symmetry_defects = 1;
  o.truncations = 1;
  o.triple_outliers = 1;
  o.duplicate_pairs = 1;
  const auto cohort = synth::synth_cohort(Taxonomy::default_taxonomy(), o);
  PipelineConfig cfg;
  cfg.model.bootstrap_b = 200;
  cfg.smoothing.iterations = 3;
  Catalog cat = Catalog::init(root, cfg);
  for (const auto& s : cohort.scans) cat.ingest_scan(synth::synth_grid(s, o.spacing_mm), s.meta);
  cat.run_qc(1);
  const auto pending = cat.pending_reviews();
  // Leave one scan pending for the HTTP review test.
  for (std::size_t i = 1; i < pending.size(); ++i) {
    cat.submit_review(pending[i].scan_id, Verdict::kApproved, 3, "setup", "");
  }
  pending_id = pending[0].scan_id;
  return cat;
}

json body_of(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

}  // namespace

TEST_CASE("status mapping") {
  CHECK(http_status(ErrorCode::kNotFound) == 404);
  CHECK(http_status(ErrorCode::kInsufficientData) == 404);
  CHECK(http_status(ErrorCode::kConflict) == 409);
  CHECK(http_status(ErrorCode::kInvalidState) == 409);
  CHECK(http_status(ErrorCode::kInvalidArgument) == 400);
  CHECK(http_status(ErrorCode::kIo) == 500);
}

TEST_CASE("empty catalog") {
  pf_test::TempDir dir;
  Running srv(Catalog::init(dir / "cat"));
  auto cli = srv.client();
  auto r = cli.Get("/api/phantoms");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(body_of(r)["count"] == 0);
  r = cli.Get("/api/qc/funnel");
  CHECK(r->status == 409);
  CHECK(body_of(r)["error"] == "invalid_state");
  r = cli.Get("/api/stats/demographics");
  CHECK(r->status == 404);
  CHECK(body_of(r)["error"] == "insufficient_data");
  r = cli.Get("/api/nothing/here");
  CHECK(r->status == 404);
  CHECK(body_of(r).contains("message"));
}

TEST_CASE("full API round trip") {
  pf_test::TempDir dir;
  std::string pending_id;
  Catalog cat = reviewed_catalog(dir / "cat", pending_id);
  MeshJob job;
  job.structure = 5;
  cat.extract_meshes(job);
  const std::string some_accepted = cat.query_phantoms({}).front().phantom_id;
  Running srv(std::move(cat));
  auto cli = srv.client();

  SUBCASE("phantom listing and filters") {
    const json all = body_of(cli.Get("/api/phantoms"));
    CHECK(all["count"].get<int>() > 0);
    CHECK(all["phantoms"].size() == all["count"].get<std::size_t>());
    const json women = body_of(cli.Get("/api/phantoms?sex=female"));
    for (const auto& p : women["phantoms"]) CHECK(p["patient"]["sex"] == "female");
    const json old = body_of(cli.Get("/api/phantoms?age_min=70"));
    for (const auto& p : old["phantoms"]) CHECK(p["patient"]["age_years"].get<double>() >= 70.0);
    CHECK(body_of(cli.Get("/api/phantoms?include_all=1"))["count"] == 30);
    auto r = cli.Get("/api/phantoms?age_min=abc");
    CHECK(r->status == 400);
    CHECK(body_of(r)["error"] == "invalid_argument");
    CHECK(cli.Get("/api/phantoms?sex=robot")->status == 400);
    CHECK(cli.Get("/api/phantoms?age_min=50&age_max=10")->status == 400);
  }

  SUBCASE("single phantom, mesh and previews") {
    auto r = cli.Get("/api/phantoms/" + some_accepted);
    CHECK(r->status == 200);
    CHECK(body_of(r)["phantom_id"] == some_accepted);
    CHECK(cli.Get("/api/phantoms/missing")->status == 404);

    r = cli.Get("/api/phantoms/" + some_accepted + "/structures/5/mesh");
    CHECK(r->status == 200);
    CHECK(r->body.rfind("ply", 0) == 0);
    CHECK(cli.Get("/api/phantoms/" + some_accepted + "/structures/6/mesh")->status == 404);

    r = cli.Get("/api/phantoms/" + some_accepted + "/preview/coronal.png");
    CHECK(r->status == 200);
    CHECK(r->get_header_value("Content-Type") == "image/png");
    CHECK(r->body.substr(1, 3) == "PNG");
    CHECK(cli.Get("/api/phantoms/" + some_accepted + "/preview/oblique.png")->status == 400);
  }

  SUBCASE("review queue and submission") {
    json pending = body_of(cli.Get("/api/reviews/pending"));
    REQUIRE(pending["count"] == 1);
    CHECK(pending["items"][0]["scan_id"] == pending_id);

    const std::string url = "/api/reviews/" + pending_id;
    CHECK(cli.Post(url, "not json", "application/json")->status == 400);
    CHECK(cli.Post(url, R"({"verdict":"approved"})", "application/json")->status == 400);
    CHECK(cli.Post(url, R"({"verdict":"approved","rating":9})", "application/json")->status == 400);
    CHECK(cli.Post(url, R"({"verdict":"maybe","rating":3})", "application/json")->status == 400);
    CHECK(cli.Post("/api/reviews/ghost", R"({"verdict":"approved","rating":3})", "application/json")->status ==
          404);

    auto r = cli.Post(url, R"({"verdict":"rejected","rating":2,"reviewer":"web","notes":"blurry"})",
                      "application/json");
    CHECK(r->status == 200);
    CHECK(body_of(r)["final_status"] == "rejected_review");
    r = cli.Post(url, R"({"verdict":"approved","rating":3})", "application/json");
    CHECK(r->status == 409);
    CHECK(body_of(r)["error"] == "invalid_state");
    CHECK(body_of(cli.Get("/api/reviews/pending"))["count"] == 0);
  }

  SUBCASE("statistics and funnel") {
    const json demo = body_of(cli.Get("/api/stats/demographics"));
    CHECK(demo["phantoms"].get<int>() > 0);
    CHECK(demo.contains("age_histogram"));
    const json vols = body_of(cli.Get("/api/stats/volumes"));
    CHECK(vols["structures"].size() == 140);
    const json funnel = body_of(cli.Get("/api/qc/funnel"));
    CHECK(funnel["total_scans"] == 30);
  }

  SUBCASE("CORS preflight") {
    auto r = cli.Options("/api/phantoms");
    REQUIRE(r);
    CHECK(r->status == 204);
    CHECK(r->get_header_value("Access-Control-Allow-Origin") == "*");
  }
}
