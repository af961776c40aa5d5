// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/catalog/server.hpp"

#include <httplib.h>

#include <mutex>

#include "phantomforge/error.hpp"

namespace phantomforge::catalog {
namespace {

using nlohmann::json;

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, {{"error", std::string(to_string(code))}, {"message", message}}, http_status(code));
}

std::optional<double> number_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name) || req.get_param_value(name).empty()) return std::nullopt;
  const std::string text = req.get_param_value(name);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidArgument, std::string("query parameter ") + name + " is not a number");
}

std::optional<std::string> text_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name) || req.get_param_value(name).empty()) return std::nullopt;
  return req.get_param_value(name);
}

PhantomQuery parse_query(const httplib::Request& req) {
  PhantomQuery q;
  if (auto sex = text_param(req, "sex")) q.sex = parse_sex(*sex);
  q.age_min = number_param(req, "age_min");
  q.age_max = number_param(req, "age_max");
  q.race = text_param(req, "race");
  q.bmi_min = number_param(req, "bmi_min");
  q.bmi_max = number_param(req, "bmi_max");
  q.structure = text_param(req, "structure");
  if (auto all = text_param(req, "include_all")) q.include_all = *all == "1" || *all == "true";
  q.validate();
  return q;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
    case ErrorCode::kInsufficientData:
      return 404;
    case ErrorCode::kConflict:
    case ErrorCode::kInvalidState:
      return 409;
    case ErrorCode::kIo:
      return 500;
    default:
      return 400;
  }
}

struct ApiServer::Impl {
  Catalog catalog;
  httplib::Server server;
  std::mutex write_mutex;

  explicit Impl(Catalog c) : catalog(std::move(c)) {}

  // Wraps a handler so library errors become JSON error bodies.
  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const Error& e) {
        send_error(res, e.code(), e.what());
      } catch (const json::exception& e) {
        send_error(res, ErrorCode::kInvalidArgument, std::string("bad JSON: ") + e.what());
      } catch (const std::exception& e) {
        send_json(res, {{"error", "internal"}, {"message", e.what()}}, 500);
      }
    };
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    server.Get("/api/phantoms", guarded([this](const httplib::Request& req, httplib::Response& res) {
      json list = json::array();
      for (const auto& m : catalog.query_phantoms(parse_query(req))) list.push_back(m.to_json());
      send_json(res, {{"count", list.size()}, {"phantoms", list}});
    }));
    server.Get(R"(/api/phantoms/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, catalog.manifest(req.matches[1]).to_json());
               }));
    server.Get(R"(/api/phantoms/([^/]+)/structures/(\d+)/mesh)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 catalog.manifest(id);
                 const auto sid = static_cast<Label>(std::stoul(req.matches[2]));
                 const auto path = catalog.mesh_path(id, sid);
                 if (!std::filesystem::exists(path)) {
                   throw Error(ErrorCode::kNotFound, "no mesh for structure " + std::to_string(sid) +
                                                         " of phantom " + id);
                 }
                 res.set_content(read_file(path), "application/octet-stream");
               }));
    server.Get(R"(/api/phantoms/([^/]+)/preview/([a-z]+)\.png)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 const ProjectionAxis axis = parse_projection_axis(std::string(req.matches[2]));
                 catalog.scan(id);
                 res.set_content(read_file(catalog.preview_path(id, axis)), "image/png");
               }));
    server.Get("/api/reviews/pending",
               guarded([this](const httplib::Request&, httplib::Response& res) {
                 json items = json::array();
                 for (const auto& p : catalog.pending_reviews()) items.push_back(p.to_json());
                 send_json(res, {{"count", items.size()}, {"items", items}});
               }));
    server.Post(R"(/api/reviews/([^/]+))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const json body = json::parse(req.body);
                  if (!body.is_object()) throw Error(ErrorCode::kInvalidArgument, "body must be a JSON object");
                  if (!body.contains("verdict") || !body.contains("rating")) {
                    throw Error(ErrorCode::kInvalidArgument, "verdict and rating are required");
                  }
                  if (!body["rating"].is_number_integer()) {
                    throw Error(ErrorCode::kInvalidArgument, "rating must be an integer");
                  }
                  std::lock_guard guard(write_mutex);
                  const QcOutcome o = catalog.submit_review(
                      req.matches[1], parse_verdict(body["verdict"].get<std::string>()),
                      body["rating"].get<int>(), body.value("reviewer", std::string()),
                      body.value("notes", std::string()));
                  send_json(res, o.to_json());
                }));
    server.Get("/api/stats/demographics",
               guarded([this](const httplib::Request&, httplib::Response& res) {
                 send_json(res, catalog.demographics().to_json());
               }));
    server.Get("/api/stats/volumes", guarded([this](const httplib::Request&, httplib::Response& res) {
                 send_json(res, to_json(catalog.volume_stats()));
               }));
    server.Get("/api/qc/funnel", guarded([this](const httplib::Request&, httplib::Response& res) {
                 send_json(res, catalog.funnel().to_json());
               }));
    server.Get(R"(/api/.*)", [](const httplib::Request& req, httplib::Response& res) {
      send_error(res, ErrorCode::kNotFound, "no route for " + req.path);
    });
  }
};

ApiServer::ApiServer(Catalog catalog, std::optional<std::filesystem::path> ui_dir)
    : impl_(std::make_unique<Impl>(std::move(catalog))) {
  impl_->routes();
  if (ui_dir) {
    if (!impl_->server.set_mount_point("/", ui_dir->string())) {
      throw Error(ErrorCode::kNotFound, "UI directory " + ui_dir->string() + " does not exist");
    }
  }
}

ApiServer::~ApiServer() { stop(); }

void ApiServer::listen(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

int ApiServer::bind_any_port(const std::string& host) {
  const int port = impl_->server.bind_to_any_port(host);
  if (port < 0) throw Error(ErrorCode::kIo, "cannot bind " + host);
  return port;
}

void ApiServer::listen_after_bind() { impl_->server.listen_after_bind(); }

void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void ApiServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace phantomforge::catalog
