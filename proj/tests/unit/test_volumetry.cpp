// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "phantomforge/error.hpp"
#include "phantomforge/grid_io.hpp"
#include "phantomforge/volumetry.hpp"

using namespace phantomforge;

namespace {

VoxelGrid random_labels(std::size_t nx, std::size_t ny, std::size_t nz, std::uint64_t seed) {
  GridTemplate t;
  t.dims = {nx, ny, nz};
  t.spacing_mm = {0.8, 0.8, 2.5};
  VoxelGrid g(t);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> label(0, 150);  // includes ids outside the taxonomy
  for (Label& v : g.labels()) v = static_cast<Label>(label(rng));
  return g;
}

}  // namespace

TEST_CASE("counts match a direct tally") {
  const Taxonomy& tax = Taxonomy::default_taxonomy();
  const VoxelGrid g = random_labels(33, 17, 9, 1);
  std::map<Label, std::uint64_t> direct;
  for (Label v : g.labels()) ++direct[v];
  const VolumeTable t = structure_volumes(g, tax);
  CHECK(t.counts.size() == 140);
  CHECK(t.total_voxels == g.labels().size());
  for (const auto& s : tax.structures()) CHECK(t.count(s.id) == direct[s.id]);
  for (Label u = 141; u <= 150; ++u) CHECK(t.unknown_counts.at(u) == direct[u]);
  CHECK(t.volume_ml(5) == doctest::Approx(static_cast<double>(direct[5]) * 0.8 * 0.8 * 2.5 / 1000.0));
}

TEST_CASE("streaming, parallel and in-memory agree") {
  const Taxonomy& tax = Taxonomy::default_taxonomy();
  pf_test::TempDir dir;
  const VoxelGrid g = random_labels(40, 31, 12, 2);
  write_label_grid(g, dir / "g.lvol", true);
  const VolumeTable mem = structure_volumes(g, tax);
  CHECK(structure_volumes(dir / "g.lvol", GridFormat::kRawSidecar, tax) == mem);
  for (int jobs : {1, 2, 5}) CHECK(structure_volumes_parallel(g, tax, jobs) == mem);
}

TEST_CASE("table serialization") {
  const Taxonomy& tax = Taxonomy::default_taxonomy();
  const VolumeTable t = structure_volumes(random_labels(8, 8, 8, 3), tax);
  CHECK(VolumeTable::from_json(t.to_json()) == t);
  const std::string csv = t.to_csv(tax);
  CHECK(csv.rfind("structure_id,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 141);
}

TEST_CASE("zero-volume fraction counts missing ids as zero") {
  std::map<Label, double> v{{1, 2.0}, {2, 0.0}, {3, 1.0}};
  CHECK(zero_volume_fraction(v, {1, 2, 3, 4}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(zero_volume_fraction(v, {}), Error);
}

TEST_CASE("dice") {
  VoxelGrid a(pf_test::cube_template(4)), b(pf_test::cube_template(4));
  CHECK(dice(a, b) == 1.0);  // both empty
  a.set(0, 0, 0, 1);
  a.set(1, 0, 0, 1);
  b.set(1, 0, 0, 3);
  CHECK(dice(a, b) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(dice(a, VoxelGrid(pf_test::cube_template(3))), Error);
}
