// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <unordered_map>

#include "mc_table.hpp"
#include "phantomforge/error.hpp"
#include "phantomforge/mesh/mesh.hpp"

namespace phantomforge::mesh {
namespace {

using detail::kCubeEdges;

class Field {
 public:
  Field(const VoxelGrid& grid) : grid_(grid), d_(grid.dims()) {}

  // Zero outside the grid: the implicit padding layer.
  double at(long i, long j, long k) const {
    if (i < 0 || j < 0 || k < 0 || i >= static_cast<long>(d_.nx) || j >= static_cast<long>(d_.ny) ||
        k >= static_cast<long>(d_.nz)) {
      return 0.0;
    }
    return grid_.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                    static_cast<std::size_t>(k)) != 0
               ? 1.0
               : 0.0;
  }

 private:
  const VoxelGrid& grid_;
  Dims d_;
};

}  // namespace

TriangleMesh marching_cubes(const VoxelGrid& mask, double iso) {
  TriangleMesh mesh;
  const auto box = nonzero_bounds(mask);
  if (!box) return mesh;
  if (!(iso > 0.0 && iso < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "iso level must lie strictly between 0 and 1");
  }
  const Field field(mask);
  const GridTemplate& g = mask.geometry();
  const auto& table = detail::case_table();

  // Cubes whose min corner spans [lo - 1, hi] cover the foreground plus the
  // zero border around it.
  const long lo[3] = {static_cast<long>(box->lo[0]) - 1, static_cast<long>(box->lo[1]) - 1,
                      static_cast<long>(box->lo[2]) - 1};
  const long hi[3] = {static_cast<long>(box->hi[0]), static_cast<long>(box->hi[1]),
                      static_cast<long>(box->hi[2])};
  const long span_x = hi[0] - lo[0] + 2;
  const long span_y = hi[1] - lo[1] + 2;

  // One vertex per grid edge, keyed by its lower corner and axis.
  std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;
  auto key = [&](long i, long j, long k, int axis) {
    const auto li = static_cast<std::uint64_t>(i - lo[0]);
    const auto lj = static_cast<std::uint64_t>(j - lo[1]);
    const auto lk = static_cast<std::uint64_t>(k - lo[2]);
    return ((lk * static_cast<std::uint64_t>(span_y) + lj) * static_cast<std::uint64_t>(span_x) + li) *
               3 + static_cast<std::uint64_t>(axis);
  };
  auto position = [&](double i, double j, double k) -> Vec3 {
    return {g.origin_mm[0] + i * g.spacing_mm[0], g.origin_mm[1] + j * g.spacing_mm[1],
            g.origin_mm[2] + k * g.spacing_mm[2]};
  };

  double values[8];
  std::uint32_t local[12 + 4];
  for (long k = lo[2]; k <= hi[2]; ++k) {
    for (long j = lo[1]; j <= hi[1]; ++j) {
      for (long i = lo[0]; i <= hi[0]; ++i) {
        int mask_bits = 0;
        for (int c = 0; c < 8; ++c) {
          values[c] = field.at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
          if (values[c] > iso) mask_bits |= 1 << c;
        }
        if (mask_bits == 0 || mask_bits == 255) continue;
        const detail::CaseEntry& entry = table[mask_bits];
        for (int e = 0; e < 12; ++e) {
          const auto& ce = kCubeEdges[e];
          if (((mask_bits >> ce.c0) & 1) == ((mask_bits >> ce.c1) & 1)) continue;
          const long ci = i + (ce.c0 & 1);
          const long cj = j + ((ce.c0 >> 1) & 1);
          const long ck = k + ((ce.c0 >> 2) & 1);
          const auto [it, inserted] =
              edge_vertex.try_emplace(key(ci, cj, ck, ce.axis),
                                      static_cast<std::uint32_t>(mesh.vertices.size()));
          if (inserted) {
            const double t = (iso - values[ce.c0]) / (values[ce.c1] - values[ce.c0]);
            double p[3] = {static_cast<double>(ci), static_cast<double>(cj),
                           static_cast<double>(ck)};
            p[ce.axis] += t;
            mesh.vertices.push_back(position(p[0], p[1], p[2]));
          }
          local[e] = it->second;
        }
        for (std::size_t c = 0; c < entry.centroid_loops.size(); ++c) {
          Vec3 centroid{0.0, 0.0, 0.0};
          for (std::uint8_t e : entry.centroid_loops[c]) {
            for (int a = 0; a < 3; ++a) centroid[a] += mesh.vertices[local[e]][a];
          }
          const double n = static_cast<double>(entry.centroid_loops[c].size());
          for (int a = 0; a < 3; ++a) centroid[a] /= n;
          local[12 + c] = static_cast<std::uint32_t>(mesh.vertices.size());
          mesh.vertices.push_back(centroid);
        }
        for (const auto& t : entry.triangles) {
          mesh.triangles.push_back({local[t[0]], local[t[1]], local[t[2]]});
        }
      }
    }
  }
  return mesh;
}

}  // namespace phantomforge::mesh
