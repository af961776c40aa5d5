// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <zlib.h>

#include <cstddef>
#include <filesystem>
#include <string>

#include "phantomforge/error.hpp"

namespace phantomforge::detail {

/// Sequential reader over a plain or gzip-compressed file.
class ByteSource {
 public:
  explicit ByteSource(const std::filesystem::path& path) : path_(path.string()) {
    file_ = gzopen(path_.c_str(), "rb");
    if (file_ == nullptr) throw Error(ErrorCode::kIo, "cannot open " + path_);
    gzbuffer(file_, 1 << 20);
  }
  ~ByteSource() {
    if (file_ != nullptr) gzclose(file_);
  }
  ByteSource(const ByteSource&) = delete;
  ByteSource& operator=(const ByteSource&) = delete;

  /// Reads up to n bytes; returns the count actually read.
  std::size_t read_some(void* dst, std::size_t n) {
    auto* out = static_cast<unsigned char*>(dst);
    std::size_t total = 0;
    while (total < n) {
      const std::size_t chunk = std::min<std::size_t>(n - total, 1u << 30);
      const int got = gzread(file_, out + total, static_cast<unsigned>(chunk));
      if (got < 0) {
        int errnum = 0;
        const char* msg = gzerror(file_, &errnum);
        throw Error(ErrorCode::kFormat, "read error in " + path_ + ": " + msg);
      }
      if (got == 0) break;
      total += static_cast<std::size_t>(got);
    }
    return total;
  }

  void read_exact(void* dst, std::size_t n, const char* what) {
    const std::size_t got = read_some(dst, n);
    if (got != n) {
      throw Error(ErrorCode::kFormat, std::string(what) + ": expected " + std::to_string(n) +
                                          " bytes, got " + std::to_string(got) + " in " +
                                          path_);
    }
  }

  void skip(std::size_t n) {
    unsigned char buf[4096];
    while (n > 0) {
      const std::size_t chunk = std::min(n, sizeof(buf));
      read_exact(buf, chunk, "skip");
      n -= chunk;
    }
  }

  bool at_end() {
    unsigned char probe;
    return read_some(&probe, 1) == 0;
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  gzFile file_ = nullptr;
};

}  // namespace phantomforge::detail
