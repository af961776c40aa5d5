// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "mc_table.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "phantomforge/grid.hpp"

namespace phantomforge::mesh::detail {
namespace {

constexpr std::array<CubeEdge, 12> make_edges() {
  std::array<CubeEdge, 12> edges{};
  int n = 0;
  for (int axis = 0; axis < 3; ++axis) {
    for (int c = 0; c < 8; ++c) {
      if ((c >> axis) & 1) continue;
      edges[n++] = {c, c | (1 << axis), axis};
    }
  }
  return edges;
}

struct Face {
  std::array<int, 4> corners;  // cyclic
  int axis;
  int side;
};

std::array<Face, 6> make_faces() {
  std::array<Face, 6> faces{};
  int n = 0;
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      const int base = side << axis;
      faces[n++] = {{base, base | (1 << u), base | (1 << u) | (1 << v), base | (1 << v)}, axis, side};
    }
  }
  return faces;
}

int edge_between(int a, int b) {
  for (int e = 0; e < 12; ++e) {
    const CubeEdge& ce = kCubeEdges[e];
    if ((ce.c0 == a && ce.c1 == b) || (ce.c0 == b && ce.c1 == a)) return e;
  }
  throw std::logic_error("corners are not adjacent");
}

Vec3 corner_pos(int c) {
  return {static_cast<double>(c & 1), static_cast<double>((c >> 1) & 1),
          static_cast<double>((c >> 2) & 1)};
}

Vec3 edge_mid(int e) {
  const Vec3 a = corner_pos(kCubeEdges[e].c0);
  const Vec3 b = corner_pos(kCubeEdges[e].c1);
  return {(a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2};
}

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

struct Segment {
  int from;
  int to;
};

// Orient a segment so the inside corner p lies where (d x (p - a)) . n < 0,
// n being the outward face normal. That makes loops run counter-clockwise
// around the outward surface normal.
Segment oriented(int ea, int eb, int inside_corner, const Face& f) {
  Vec3 n{0, 0, 0};
  n[f.axis] = f.side ? 1.0 : -1.0;
  const Vec3 a = edge_mid(ea);
  const Vec3 d = sub(edge_mid(eb), a);
  const Vec3 c = cross(d, sub(corner_pos(inside_corner), a));
  const double s = c[0] * n[0] + c[1] * n[1] + c[2] * n[2];
  return s < 0 ? Segment{ea, eb} : Segment{eb, ea};
}

std::vector<Segment> face_segments(const Face& f, int mask) {
  std::array<bool, 4> in{};
  int count = 0;
  for (int i = 0; i < 4; ++i) count += in[i] = (mask >> f.corners[i]) & 1;
  std::vector<Segment> out;
  if (count == 0 || count == 4) return out;
  auto edge = [&](int i, int j) { return edge_between(f.corners[i % 4], f.corners[j % 4]); };
  if (count == 1 || count == 3) {
    // Cut off the odd corner.
    int odd = 0;
    for (int i = 0; i < 4; ++i) {
      if (in[i] == (count == 1)) odd = i;
    }
    const int inside = count == 1 ? f.corners[odd] : f.corners[(odd + 2) % 4];
    out.push_back(oriented(edge(odd + 3, odd + 4), edge(odd, odd + 1), inside, f));
    return out;
  }
  for (int i = 0; i < 4; ++i) {
    if (in[i] && in[(i + 1) % 4]) {
      // Adjacent pair i, i+1: the crossing edges are (i+1, i+2) and (i+3, i).
      out.push_back(oriented(edge(i + 1, i + 2), edge(i + 3, i + 4), f.corners[i], f));
      return out;
    }
  }
  // Diagonal pair: keep the inside corners apart.
  for (int i = 0; i < 4; ++i) {
    if (in[i]) out.push_back(oriented(edge(i + 3, i + 4), edge(i, i + 1), f.corners[i], f));
  }
  return out;
}

bool share_face(int ea, int eb) {
  const CubeEdge& a = kCubeEdges[ea];
  const CubeEdge& b = kCubeEdges[eb];
  // A face fixes one axis bit; both edges lie on it iff that bit agrees on
  // every corner of both edges.
  for (int axis = 0; axis < 3; ++axis) {
    if (a.axis == axis || b.axis == axis) continue;
    if (((a.c0 >> axis) & 1) == ((b.c0 >> axis) & 1)) return true;
  }
  return false;
}

double tri_area(int a, int b, int c) {
  return 0.5 * norm(cross(sub(edge_mid(b), edge_mid(a)), sub(edge_mid(c), edge_mid(a))));
}

// Minimum-area triangulation that never adds a chord between two vertices on
// a common cube face. Returns false when no such triangulation exists.
bool triangulate(const std::vector<int>& loop, std::vector<std::array<std::uint8_t, 3>>& out) {
  const int n = static_cast<int>(loop.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto allowed = [&](int i, int j) {
    if (j - i == 1 || (i == 0 && j == n - 1)) return true;  // polygon side
    return !share_face(loop[i], loop[j]);
  };
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, inf));
  std::vector<std::vector<int>> split(n, std::vector<int>(n, -1));
  for (int i = 0; i + 1 < n; ++i) cost[i][i + 1] = 0.0;
  for (int len = 2; len < n; ++len) {
    for (int i = 0; i + len < n; ++i) {
      const int j = i + len;
      if (!allowed(i, j)) continue;
      for (int k = i + 1; k < j; ++k) {
        if (cost[i][k] == inf || cost[k][j] == inf) continue;
        const double area = tri_area(loop[i], loop[k], loop[j]);
        if (area < 1e-9) continue;
        const double c = cost[i][k] + cost[k][j] + area;
        if (c < cost[i][j]) {
          cost[i][j] = c;
          split[i][j] = k;
        }
      }
    }
  }
  if (cost[0][n - 1] == inf) return false;
  std::vector<std::pair<int, int>> stack{{0, n - 1}};
  while (!stack.empty()) {
    const auto [i, j] = stack.back();
    stack.pop_back();
    if (j - i < 2) continue;
    const int k = split[i][j];
    out.push_back({static_cast<std::uint8_t>(loop[i]), static_cast<std::uint8_t>(loop[k]),
                   static_cast<std::uint8_t>(loop[j])});
    stack.push_back({i, k});
    stack.push_back({k, j});
  }
  return true;
}

int g_fallbacks = 0;

std::array<CaseEntry, 256> build_table() {
  const auto faces = make_faces();
  std::array<CaseEntry, 256> table{};
  for (int mask = 1; mask < 255; ++mask) {
    std::array<int, 12> next;
    next.fill(-1);
    for (const Face& f : faces) {
      for (const Segment& s : face_segments(f, mask)) {
        if (next[s.from] != -1) throw std::logic_error("inconsistent face segments");
        next[s.from] = s.to;
      }
    }
    std::array<bool, 12> used{};
    CaseEntry& entry = table[mask];
    for (int start = 0; start < 12; ++start) {
      if (next[start] == -1 || used[start]) continue;
      std::vector<int> loop;
      for (int e = start; !used[e]; e = next[e]) {
        if (next[e] == -1) throw std::logic_error("open loop in case table");
        used[e] = true;
        loop.push_back(e);
      }
      if (!triangulate(loop, entry.triangles)) {
        ++g_fallbacks;
        const auto c = static_cast<std::uint8_t>(12 + entry.centroid_loops.size());
        std::vector<std::uint8_t> members(loop.begin(), loop.end());
        for (std::size_t i = 0; i < loop.size(); ++i) {
          entry.triangles.push_back(
              {members[i], members[(i + 1) % loop.size()], c});
        }
        entry.centroid_loops.push_back(std::move(members));
      }
    }
  }
  return table;
}

}  // namespace

const std::array<CubeEdge, 12> kCubeEdges = make_edges();

const std::array<CaseEntry, 256>& case_table() {
  static const std::array<CaseEntry, 256> table = build_table();
  return table;
}

int centroid_fallback_count() {
  case_table();
  return g_fallbacks;
}

}  // namespace phantomforge::mesh::detail
