// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace phantomforge::mesh::detail {

// Corner c sits at (c & 1, (c >> 1) & 1, (c >> 2) & 1) in the unit cube.
struct CubeEdge {
  int c0;
  int c1;
  int axis;
};
extern const std::array<CubeEdge, 12> kCubeEdges;

// Local vertex ids below 12 are cube edges; 12 + j is the centroid of
// centroid_loops[j].
struct CaseEntry {
  std::vector<std::array<std::uint8_t, 3>> triangles;
  std::vector<std::vector<std::uint8_t>> centroid_loops;
};

/// Case table indexed by the inside-corner bit mask. Built once.
const std::array<CaseEntry, 256>& case_table();

/// Number of loops that needed a centroid vertex (for tests).
int centroid_fallback_count();

}  // namespace phantomforge::mesh::detail
