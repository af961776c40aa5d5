// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/mesh/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "phantomforge/error.hpp"
#include "phantomforge/parallel.hpp"
#include "phantomforge/simd/kernels.hpp"

namespace phantomforge::mesh {
namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

void validate_mesh(const TriangleMesh& mesh) {
  const std::size_t n = mesh.vertices.size();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    for (std::uint32_t v : tri) {
      if (v >= n) {
        throw Error(ErrorCode::kValidation,
                    "triangle " + std::to_string(t) + " references vertex " + std::to_string(v) +
                        " of " + std::to_string(n));
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw Error(ErrorCode::kValidation, "triangle " + std::to_string(t) + " is degenerate");
    }
  }
}

WatertightReport check_watertight(const TriangleMesh& mesh) {
  // Directed edge multiplicities; an undirected edge is fine iff it appears
  // exactly once in each direction.
  std::map<std::uint64_t, int> directed;
  for (const Triangle& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) ++directed[edge_key(t[e], t[(e + 1) % 3])];
  }
  WatertightReport r;
  for (const auto& [key, count] : directed) {
    const auto a = static_cast<std::uint32_t>(key >> 32);
    const auto b = static_cast<std::uint32_t>(key & 0xffffffffu);
    if (a > b) {
      if (!directed.count(edge_key(b, a))) {
        count == 1 ? ++r.boundary_edges : count == 2 ? ++r.inconsistent_edges : ++r.non_manifold_edges;
      }
      continue;
    }
    const auto rev = directed.find(edge_key(b, a));
    const int back = rev == directed.end() ? 0 : rev->second;
    const int total = count + back;
    if (total == 1) {
      ++r.boundary_edges;
    } else if (total > 2) {
      ++r.non_manifold_edges;
    } else if (count != 1 || back != 1) {
      ++r.inconsistent_edges;
    }
  }
  r.watertight = !mesh.triangles.empty() && r.boundary_edges == 0 && r.non_manifold_edges == 0 &&
                 r.inconsistent_edges == 0;
  return r;
}

double mesh_volume(const TriangleMesh& mesh) {
  double six_v = 0.0;
  for (const Triangle& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    const Vec3 bc = cross(b, c);
    six_v += a[0] * bc[0] + a[1] * bc[1] + a[2] * bc[2];
  }
  return six_v / 6.0;
}

double mesh_surface_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (const Triangle& t : mesh.triangles) {
    const Vec3 n = cross(sub(mesh.vertices[t[1]], mesh.vertices[t[0]]),
                         sub(mesh.vertices[t[2]], mesh.vertices[t[0]]));
    area += 0.5 * std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  }
  return area;
}

std::size_t unique_edge_count(const TriangleMesh& mesh) {
  std::vector<std::uint64_t> edges;
  edges.reserve(mesh.triangles.size() * 3);
  for (const Triangle& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const std::uint32_t a = t[e];
      const std::uint32_t b = t[(e + 1) % 3];
      edges.push_back(edge_key(std::min(a, b), std::max(a, b)));
    }
  }
  std::sort(edges.begin(), edges.end());
  return static_cast<std::size_t>(std::unique(edges.begin(), edges.end()) - edges.begin());
}

long euler_characteristic(const TriangleMesh& mesh) {
  return static_cast<long>(mesh.vertices.size()) - static_cast<long>(unique_edge_count(mesh)) +
         static_cast<long>(mesh.triangles.size());
}

BoundingBox bounding_box(const TriangleMesh& mesh) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoundingBox box{{inf, inf, inf}, {-inf, -inf, -inf}};
  for (const Vec3& v : mesh.vertices) {
    for (int a = 0; a < 3; ++a) {
      box.lo[a] = std::min(box.lo[a], v[a]);
      box.hi[a] = std::max(box.hi[a], v[a]);
    }
  }
  return box;
}

AdjacencyMatrix build_adjacency(const TriangleMesh& mesh) {
  validate_mesh(mesh);
  const std::size_t n = mesh.vertices.size();
  std::vector<std::vector<std::uint32_t>> rows(n);
  for (const Triangle& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      rows[t[e]].push_back(t[(e + 1) % 3]);
      rows[t[(e + 1) % 3]].push_back(t[e]);
    }
  }
  AdjacencyMatrix adj;
  adj.row_offsets.reserve(n + 1);
  adj.row_offsets.push_back(0);
  adj.row_sums.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto& row = rows[v];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    adj.columns.insert(adj.columns.end(), row.begin(), row.end());
    adj.row_offsets.push_back(static_cast<std::uint32_t>(adj.columns.size()));
    adj.row_sums[v] = static_cast<double>(row.size());
  }
  return adj;
}

TriangleMesh laplacian_smooth(const TriangleMesh& mesh, double lambda, int iterations, int jobs) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "smoothing lambda must be in [0, 1]");
  }
  if (iterations < 0) throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 0");
  const AdjacencyMatrix adj = build_adjacency(mesh);
  const std::size_t n = mesh.vertices.size();

  std::vector<double> cur(3 * n);
  for (std::size_t v = 0; v < n; ++v) {
    for (int a = 0; a < 3; ++a) cur[3 * v + a] = mesh.vertices[v][a];
  }
  std::vector<double> avg(3 * n);
  std::vector<double> next(3 * n);
  const auto& k = simd::kernels();
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;

  for (int it = 0; it < iterations; ++it) {
    parallel_for(blocks, jobs, [&](std::size_t b) {
      const std::size_t lo = b * kBlock;
      const std::size_t hi = std::min(n, lo + kBlock);
      for (std::size_t v = lo; v < hi; ++v) {
        const std::uint32_t begin = adj.row_offsets[v];
        const std::uint32_t end = adj.row_offsets[v + 1];
        if (begin == end) {
          for (int a = 0; a < 3; ++a) avg[3 * v + a] = cur[3 * v + a];
          continue;
        }
        double s[3] = {0.0, 0.0, 0.0};
        for (std::uint32_t e = begin; e < end; ++e) {
          const std::size_t u = adj.columns[e];
          for (int a = 0; a < 3; ++a) s[a] += cur[3 * u + a];
        }
        for (int a = 0; a < 3; ++a) avg[3 * v + a] = s[a] / adj.row_sums[v];
      }
      k.blend_f64(cur.data() + 3 * lo, avg.data() + 3 * lo, lambda, next.data() + 3 * lo,
                  3 * (hi - lo));
    });
    cur.swap(next);
  }

  TriangleMesh out;
  out.triangles = mesh.triangles;
  out.vertices.resize(n);
  for (std::size_t v = 0; v < n; ++v) out.vertices[v] = {cur[3 * v], cur[3 * v + 1], cur[3 * v + 2]};
  return out;
}

}  // namespace phantomforge::mesh
