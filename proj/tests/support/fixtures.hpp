// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

// Shared geometry and filesystem helpers for the test binaries.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "phantomforge/grid.hpp"

namespace pf_test {

using phantomforge::GridTemplate;
using phantomforge::Label;
using phantomforge::VoxelGrid;

/// Removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "pf") {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline GridTemplate cube_template(std::size_t n, double spacing = 1.0) {
  GridTemplate t;
  t.dims = {n, n, n};
  t.spacing_mm = {spacing, spacing, spacing};
  return t;
}

/// Voxels whose centers lie within `radius` mm of the grid center.
inline VoxelGrid sphere_grid(std::size_t n, double radius, double spacing = 1.0, Label label = 1) {
  VoxelGrid g(cube_template(n, spacing));
  const double c = 0.5 * static_cast<double>(n - 1) * spacing;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) * spacing - c;
        const double y = static_cast<double>(j) * spacing - c;
        const double z = static_cast<double>(k) * spacing - c;
        if (x * x + y * y + z * z <= radius * radius) g.set(i, j, k, label);
      }
    }
  }
  return g;
}

/// Union of a few random balls inside an n^3 grid, kept off the border.
inline VoxelGrid random_blob(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> center(0.3 * static_cast<double>(n), 0.7 * static_cast<double>(n));
  std::uniform_real_distribution<double> radius(0.12 * static_cast<double>(n), 0.25 * static_cast<double>(n));
  std::uniform_int_distribution<int> count(2, 5);
  VoxelGrid g(cube_template(n));
  const int balls = count(rng);
  for (int b = 0; b < balls; ++b) {
    const double cx = center(rng), cy = center(rng), cz = center(rng), r = radius(rng);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
          const double dx = static_cast<double>(i) - cx;
          const double dy = static_cast<double>(j) - cy;
          const double dz = static_cast<double>(k) - cz;
          if (dx * dx + dy * dy + dz * dz <= r * r) g.set(i, j, k, 1);
        }
      }
    }
  }
  return g;
}

}  // namespace pf_test
