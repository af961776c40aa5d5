// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "phantomforge/grid.hpp"

namespace phantomforge::mesh {

using Triangle = std::array<std::uint32_t, 3>;

/// Triangles are counter-clockwise seen from outside.
struct TriangleMesh {
  std::vector<Vec3> vertices;  // mm
  std::vector<Triangle> triangles;

  bool empty() const { return triangles.empty(); }
  bool operator==(const TriangleMesh&) const = default;
};

/// Throws Error(kValidation) on out-of-range indices or repeated indices.
void validate_mesh(const TriangleMesh& mesh);

struct WatertightReport {
  bool watertight = false;
  std::size_t boundary_edges = 0;      // used by one triangle
  std::size_t non_manifold_edges = 0;  // used by three or more
  std::size_t inconsistent_edges = 0;  // used twice in the same direction
};

WatertightReport check_watertight(const TriangleMesh& mesh);

/// Signed, positive for outward orientation.
double mesh_volume(const TriangleMesh& mesh);
double mesh_surface_area(const TriangleMesh& mesh);
std::size_t unique_edge_count(const TriangleMesh& mesh);
/// V - E + F
long euler_characteristic(const TriangleMesh& mesh);

struct BoundingBox {
  Vec3 lo;
  Vec3 hi;
};
BoundingBox bounding_box(const TriangleMesh& mesh);

/// Symmetric vertex adjacency in CSR form with unit edge weights.
struct AdjacencyMatrix {
  std::vector<std::uint32_t> row_offsets;  // size n + 1
  std::vector<std::uint32_t> columns;      // sorted within each row
  std::vector<double> row_sums;            // degree of each vertex

  std::size_t size() const { return row_sums.size(); }
  std::size_t degree(std::size_t v) const { return row_offsets[v + 1] - row_offsets[v]; }
};

AdjacencyMatrix build_adjacency(const TriangleMesh& mesh);

/// Simultaneous update v <- (1 - lambda) v + lambda * mean(neighbors), repeated
/// `iterations` times. Isolated vertices stay put. Result does not depend on
/// `jobs`.
TriangleMesh laplacian_smooth(const TriangleMesh& mesh, double lambda, int iterations, int jobs = 1);

/// Isosurface of the field "voxel != 0" sampled at voxel centers, with an
/// implicit one-voxel zero border so the surface is always closed.
TriangleMesh marching_cubes(const VoxelGrid& mask, double iso = 0.5);

}  // namespace phantomforge::mesh
