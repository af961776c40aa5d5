// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "phantomforge/error.hpp"
#include "phantomforge/stats/dip.hpp"
#include "phantomforge/stats/sample.hpp"

using namespace phantomforge::stats;

namespace {

struct DipCase {
  std::vector<double> x;
  double dip;
};

// Produced by tests/oracles/dip_oracle.py (linear-programming search over
// unimodal piecewise-linear CDFs).
const std::vector<DipCase> kOracle = {
    {{0.25, 0.5, 0.75, 1.0}, 0.125000000000},  // equally spaced
    {{0.2, 0.4, 0.6, 0.8, 1.0}, 0.100000000000},  // equally spaced
    {{0.16666666666666666, 0.3333333333333333, 0.5, 0.6666666666666666, 0.8333333333333334, 1.0}, 0.083333333333},  // equally spaced
    {{0.14285714285714285, 0.2857142857142857, 0.42857142857142855, 0.5714285714285714, 0.7142857142857143, 0.8571428571428571, 1.0}, 0.071428571429},  // equally spaced
    {{0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0}, 0.062500000000},  // equally spaced
    {{0.1111111111111111, 0.2222222222222222, 0.3333333333333333, 0.4444444444444444, 0.5555555555555556, 0.6666666666666666, 0.7777777777777778, 0.8888888888888888, 1.0}, 0.055555555556},  // equally spaced
    {{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}, 0.050000000000},  // equally spaced
    {{0.09090909090909091, 0.18181818181818182, 0.2727272727272727, 0.36363636363636365, 0.45454545454545453, 0.5454545454545454, 0.6363636363636364, 0.7272727272727273, 0.8181818181818182, 0.9090909090909091, 1.0}, 0.045454545455},  // equally spaced
    {{0.08333333333333333, 0.16666666666666666, 0.25, 0.3333333333333333, 0.4166666666666667, 0.5, 0.5833333333333334, 0.6666666666666666, 0.75, 0.8333333333333334, 0.9166666666666666, 1.0}, 0.041666666667},  // equally spaced
    {{-2.1848, -0.5201, 0.0844, 0.2782, 0.7773}, 0.100000000000},  // normal
    {{-1.043, -0.0934, -0.0416, 0.1226, 0.5587, 0.6289, 1.1963}, 0.123049575351},  // normal
    {{-1.2994, -1.2816, 0.0939, 0.1036, 0.3307, 0.6777, 0.9091, 0.9143, 1.2875}, 0.109691619417},  // normal
    {{-1.2596, -1.1566, -0.8056, -0.4889, -0.2651, -0.0546, 0.2153, 0.2444, 0.3622, 0.4534, 0.5248, 0.5923}, 0.066627741015},  // normal
    {{-0.556, -0.4288, 0.2445, 4.8408, 5.0063, 5.3464}, 0.212917840202},  // two clusters
    {{-0.1334, -0.0999, -0.0385, 0.1552, 0.3658, 4.5279, 4.9901, 5.0401, 5.1937, 5.5829}, 0.199445094018},  // two clusters
    {{-0.4174, -0.3159, -0.2019, -0.0533, 0.0088, 0.1491, 4.3953, 4.6103, 4.9079, 4.9433, 5.1051, 5.1927}, 0.210474660956},  // two clusters
    {{0.2633, 0.379, 0.4214, 0.4916, 0.6657, 0.6765, 0.7504, 0.8072}, 0.113860306941},  // uniform
    {{0.1299, 0.1545, 0.167, 0.4326, 0.466, 0.5694, 0.578, 0.5952, 0.7201, 0.7748, 0.795}, 0.119650418957},  // uniform
};

}  // namespace

TEST_CASE("dip statistic matches the LP oracle") {
  for (const auto& c : kOracle) {
    CAPTURE(c.x.size());
    std::vector<double> s = c.x;
    std::sort(s.begin(), s.end());
    CHECK(dip_statistic(s) == doctest::Approx(c.dip).epsilon(1e-9));
  }
}

TEST_CASE("dip input requirements") {
  CHECK_THROWS_AS(dip_statistic(std::vector<double>{1.0, 2.0, 3.0}), phantomforge::Error);
  CHECK_THROWS_AS(dip_statistic(std::vector<double>{1.0, 3.0, 2.0, 4.0}), phantomforge::Error);
  CHECK(dip_statistic(std::vector<double>{1.0, 1.0, 1.0, 1.0}) >= 0.0);
}

TEST_CASE("dip is location and scale invariant") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> x(60);
  for (auto& v : x) v = d(rng);
  std::sort(x.begin(), x.end());
  std::vector<double> y = x;
  for (auto& v : y) v = 3.5 * v + 100.0;
  CHECK(dip_statistic(y) == doctest::Approx(dip_statistic(x)).epsilon(1e-12));
}

TEST_CASE("bootstrap p-value") {
  const double p1 = dip_pvalue(0.05, 50, 500, 11);
  CHECK(p1 == dip_pvalue(0.05, 50, 500, 11));  // seeded
  CHECK(p1 >= 0.0);
  CHECK(p1 <= 1.0);
  CHECK(dip_pvalue(0.0, 50, 200, 1) == 1.0);
  CHECK(dip_pvalue(1.0, 50, 200, 1) < 0.01);
  CHECK(dip_pvalue(0.03, 50, 500, 3) >= dip_pvalue(0.08, 50, 500, 3));
  CHECK(dip_pvalue(0.08, 50, 500, 3, DipReference::kUniform) <= 1.0);
  CHECK_THROWS_AS(dip_pvalue(0.05, 50, 199, 1), phantomforge::Error);
  CHECK_THROWS_AS(dip_pvalue(0.05, 3, 500, 1), phantomforge::Error);
}

TEST_CASE("two well-separated clusters are detected") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> x;
  for (int i = 0; i < 60; ++i) x.push_back(d(rng));
  for (int i = 0; i < 60; ++i) x.push_back(8.0 + d(rng));
  const DipResult r = dip_test(x, 500, 2);
  CHECK(r.p_value < 0.01);
}

TEST_CASE("reference names") {
  CHECK(parse_dip_reference("normal") == DipReference::kNormal);
  CHECK(parse_dip_reference("uniform") == DipReference::kUniform);
  CHECK(to_string(DipReference::kUniform) == "uniform");
  CHECK_THROWS_AS(parse_dip_reference("gamma"), phantomforge::Error);
}
