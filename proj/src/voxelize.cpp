// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/voxelize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "phantomforge/error.hpp"
#include "phantomforge/parallel.hpp"

namespace phantomforge {
namespace {

using mesh::Triangle;
using mesh::TriangleMesh;

constexpr int kMaxAttempts = 8;
constexpr double kOffsetRel = 1e-6;
// Irrational ratios keep retried rays off any rational lattice of vertices.
constexpr double kOffsetY = 0.7548776662466927;
constexpr double kOffsetZ = 0.5698402909980532;

struct Hit {
  bool degenerate = false;
  bool crosses = false;
  double x = 0.0;
};

// Intersects the line {y = py, z = pz} with a triangle.
Hit intersect(const Vec3& a, const Vec3& b, const Vec3& c, double py, double pz) {
  auto orient = [&](const Vec3& u, const Vec3& v) {
    return (v[1] - u[1]) * (pz - u[2]) - (v[2] - u[2]) * (py - u[1]);
  };
  const double w0 = orient(b, c);
  const double w1 = orient(c, a);
  const double w2 = orient(a, b);
  Hit hit;
  const bool has_neg = w0 < 0 || w1 < 0 || w2 < 0;
  const bool has_pos = w0 > 0 || w1 > 0 || w2 > 0;
  if (has_neg && has_pos) return hit;
  const double sum = w0 + w1 + w2;
  if (w0 == 0 || w1 == 0 || w2 == 0) {
    // On an edge, a vertex, or in the plane of an edge-on triangle.
    hit.degenerate = true;
    return hit;
  }
  hit.crosses = true;
  hit.x = (w0 * a[0] + w1 * b[0] + w2 * c[0]) / sum;
  return hit;
}

}  // namespace

VoxelGrid voxelize_mesh(const TriangleMesh& mesh, const GridTemplate& tpl, int jobs) {
  tpl.validate();
  VoxelGrid out(tpl);
  if (mesh.triangles.empty()) return out;
  mesh::validate_mesh(mesh);
  const mesh::WatertightReport report = mesh::check_watertight(mesh);
  if (!report.watertight) {
    throw Error(ErrorCode::kValidation,
                "cannot voxelize a mesh that is not watertight (" +
                    std::to_string(report.boundary_edges) + " boundary, " +
                    std::to_string(report.non_manifold_edges) + " non-manifold, " +
                    std::to_string(report.inconsistent_edges) + " inconsistent edges)");
  }
  const Dims d = tpl.dims;
  const double sy = tpl.spacing_mm[1];
  const double sz = tpl.spacing_mm[2];

  // Bucket triangles by the rows their (y, z) footprint can reach, with
  // enough margin for every retry offset.
  const double margin_y = kOffsetRel * sy * kMaxAttempts;
  const double margin_z = kOffsetRel * sz * kMaxAttempts;
  const std::size_t rows = d.ny * d.nz;
  std::vector<std::uint32_t> bucket_count(rows + 1, 0);
  std::vector<std::array<long, 4>> reach(mesh.triangles.size());
  auto row_range = [](double lo, double hi, double origin, double spacing, std::size_t n) {
    const double a = std::ceil((lo - origin) / spacing);
    const double b = std::floor((hi - origin) / spacing);
    const long first = static_cast<long>(std::max(a, 0.0));
    const long last = static_cast<long>(std::min(b, static_cast<double>(n) - 1.0));
    return std::pair<long, long>{first, last};
  };
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    double ylo = mesh.vertices[tri[0]][1], yhi = ylo;
    double zlo = mesh.vertices[tri[0]][2], zhi = zlo;
    for (int c = 1; c < 3; ++c) {
      ylo = std::min(ylo, mesh.vertices[tri[c]][1]);
      yhi = std::max(yhi, mesh.vertices[tri[c]][1]);
      zlo = std::min(zlo, mesh.vertices[tri[c]][2]);
      zhi = std::max(zhi, mesh.vertices[tri[c]][2]);
    }
    const auto [j0, j1] = row_range(ylo - margin_y, yhi, tpl.origin_mm[1], sy, d.ny);
    const auto [k0, k1] = row_range(zlo - margin_z, zhi, tpl.origin_mm[2], sz, d.nz);
    reach[t] = {j0, j1, k0, k1};
    for (long k = k0; k <= k1; ++k) {
      for (long j = j0; j <= j1; ++j) ++bucket_count[static_cast<std::size_t>(k) * d.ny + j + 1];
    }
  }
  for (std::size_t r = 0; r < rows; ++r) bucket_count[r + 1] += bucket_count[r];
  std::vector<std::uint32_t> bucket(bucket_count.back());
  {
    std::vector<std::uint32_t> fill(bucket_count.begin(), bucket_count.end() - 1);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const auto& [j0, j1, k0, k1] = reach[t];
      for (long k = k0; k <= k1; ++k) {
        for (long j = j0; j <= j1; ++j) {
          bucket[fill[static_cast<std::size_t>(k) * d.ny + j]++] = static_cast<std::uint32_t>(t);
        }
      }
    }
  }

  auto labels = out.labels();
  parallel_for(d.nz, jobs, [&](std::size_t k) {
    std::vector<double> xs;
    for (std::size_t j = 0; j < d.ny; ++j) {
      const std::size_t row = k * d.ny + j;
      const double y0 = tpl.origin_mm[1] + static_cast<double>(j) * sy;
      const double z0 = tpl.origin_mm[2] + static_cast<double>(k) * sz;
      bool resolved = false;
      for (int attempt = 0; attempt < kMaxAttempts && !resolved; ++attempt) {
        const double py = y0 + attempt * kOffsetRel * sy * kOffsetY;
        const double pz = z0 + attempt * kOffsetRel * sz * kOffsetZ;
        xs.clear();
        resolved = true;
        for (std::uint32_t e = bucket_count[row]; e < bucket_count[row + 1]; ++e) {
          const Triangle& tri = mesh.triangles[bucket[e]];
          const Hit hit = intersect(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                    mesh.vertices[tri[2]], py, pz);
          if (hit.degenerate) {
            resolved = false;
            break;
          }
          if (hit.crosses) xs.push_back(hit.x);
        }
      }
      if (!resolved) {
        throw Error(ErrorCode::kInvalidState,
                    "voxelization ray kept hitting mesh edges at row (y=" + std::to_string(j) +
                        ", z=" + std::to_string(k) + ")");
      }
      if (xs.empty()) continue;
      std::sort(xs.begin(), xs.end());
      std::size_t passed = 0;
      for (std::size_t i = 0; i < d.nx; ++i) {
        const double x = tpl.origin_mm[0] + static_cast<double>(i) * tpl.spacing_mm[0];
        while (passed < xs.size() && xs[passed] < x) ++passed;
        if (passed % 2 == 1) labels[row * d.nx + i] = 1;
      }
    }
  });
  return out;
}

VoxelGrid assemble_phantom(const std::vector<std::pair<Label, VoxelGrid>>& masks,
                           const std::vector<Label>& priority) {
  if (masks.empty()) throw Error(ErrorCode::kInvalidArgument, "no masks to assemble");
  std::map<Label, std::size_t> rank;
  for (std::size_t r = 0; r < priority.size(); ++r) rank[priority[r]] = r;
  std::vector<std::pair<std::size_t, std::size_t>> order;  // (rank, mask index)
  const GridTemplate& tpl = masks.front().second.geometry();
  for (std::size_t m = 0; m < masks.size(); ++m) {
    const auto& [id, grid] = masks[m];
    if (id == 0) throw Error(ErrorCode::kInvalidArgument, "structure id 0 is background");
    if (!(grid.geometry() == tpl)) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "mask for structure " + std::to_string(id) + " uses a different grid template");
    }
    const auto it = rank.find(id);
    if (it == rank.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "structure " + std::to_string(id) + " is missing from the priority list");
    }
    order.emplace_back(it->second, m);
  }
  std::sort(order.begin(), order.end());
  VoxelGrid out(tpl);
  auto dst = out.labels();
  for (const auto& [r, m] : order) {
    const Label id = masks[m].first;
    const auto src = masks[m].second.labels();
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src[i] != 0) dst[i] = id;
    }
  }
  return out;
}

}  // namespace phantomforge
