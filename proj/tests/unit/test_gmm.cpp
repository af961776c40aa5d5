// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "phantomforge/error.hpp"
#include "phantomforge/stats/gmm.hpp"
#include "phantomforge/stats/sample.hpp"

using namespace phantomforge::stats;

namespace {

std::vector<double> two_component(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> a(100.0, 15.0), b(300.0, 15.0);
  std::bernoulli_distribution pick(0.5);
  std::vector<double> x(n);
  for (auto& v : x) v = pick(rng) ? a(rng) : b(rng);
  return x;
}

bool non_decreasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] < trace[i - 1] - 1e-9 * std::abs(trace[i - 1])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("recovers a well-separated two-component mixture") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CAPTURE(seed);
    const auto x = two_component(500, seed);
    std::vector<double> trace;
    const GmmParams g = gmm_fit_em(x, 2, seed, {}, &trace);
    REQUIRE(g.k() == 2);
    const std::size_t lo = g.means[0] < g.means[1] ? 0 : 1;
    CHECK(std::abs(g.means[lo] - 100.0) <= 5.0);
    CHECK(std::abs(g.means[1 - lo] - 300.0) <= 5.0);
    CHECK(std::abs(g.weights[lo] - 0.5) <= 0.05);
    CHECK(g.weights[0] + g.weights[1] == doctest::Approx(1.0));
    CHECK(g.converged);
    CHECK(non_decreasing(trace));
    CHECK(g.log_likelihood == doctest::Approx(gmm_log_likelihood(g, x)).epsilon(1e-9));
  }
}

TEST_CASE("BIC prefers two components over one on bimodal data") {
  const auto x = two_component(400, 3);
  const GmmParams g1 = gmm_fit_em(x, 1, 3);
  const GmmParams g2 = gmm_fit_em(x, 2, 3);
  CHECK(bic(g2, x.size()) < bic(g1, x.size()));
  CHECK(g1.parameter_count() == 2);
  CHECK(g2.parameter_count() == 5);
  CHECK(bic(-100.0, 5, 100) == doctest::Approx(200.0 + 5.0 * std::log(100.0)));
}

TEST_CASE("density integrates to one") {
  GmmParams g;
  g.weights = {0.3, 0.7};
  g.means = {0.0, 5.0};
  g.variances = {1.0, 4.0};
  double sum = 0.0;
  const double h = 0.001;
  for (double x = -20.0; x <= 30.0; x += h) sum += gmm_density(g, x) * h;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fit is deterministic and serializable") {
  const auto x = two_component(200, 8);
  const GmmParams a = gmm_fit_em(x, 3, 42);
  const GmmParams b = gmm_fit_em(x, 3, 42);
  CHECK(a.means == b.means);
  const GmmParams c = GmmParams::from_json(a.to_json());
  CHECK(c.means == a.means);
  CHECK(c.variances == a.variances);
  CHECK(c.weights == a.weights);
}

TEST_CASE("input requirements") {
  CHECK_THROWS_AS(gmm_fit_em(std::vector<double>(20, 1.0), 2, 1), phantomforge::Error);
  CHECK_THROWS_AS(gmm_fit_em(std::vector<double>{1, 2, 3}, 2, 1), phantomforge::Error);
  CHECK_THROWS_AS(gmm_fit_em(two_component(50, 1), 4, 1), phantomforge::Error);
}

TEST_CASE("sample helpers") {
  const std::vector<double> s{1.0, 2.0, 3.0, 4.0};
  CHECK(quantile_sorted(s, 0.0) == 1.0);
  CHECK(quantile_sorted(s, 1.0) == 4.0);
  CHECK(quantile_sorted(s, 0.5) == doctest::Approx(2.5));
  CHECK(mean(s) == doctest::Approx(2.5));
  CHECK(sample_stddev(s) == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(mix_seed(1, 2) != mix_seed(1, 3));
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
}
