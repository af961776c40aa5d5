// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

namespace phantomforge::stats {

/// Linear-interpolation quantile (R type 7) of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double q);

double mean(std::span<const double> x);
/// Population variance (divides by n).
double variance(std::span<const double> x);
/// Sample standard deviation (divides by n - 1); 0 for n < 2.
double sample_stddev(std::span<const double> x);

/// Standard normal CDF.
double normal_cdf(double z);

/// Deterministic 64-bit mix of a base seed and a stream id (splitmix64).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace phantomforge::stats
