// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "phantomforge/catalog/catalog.hpp"
#include "phantomforge/error.hpp"

namespace phantomforge::catalog {

/// HTTP/JSON front end of a catalog. Errors are {"error": code, "message"}.
class ApiServer {
 public:
  explicit ApiServer(Catalog catalog, std::optional<std::filesystem::path> ui_dir = {});
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Blocks until stop().
  void listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it; serve with listen_after_bind().
  int bind_any_port(const std::string& host);
  void listen_after_bind();
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

int http_status(ErrorCode code);

}  // namespace phantomforge::catalog
