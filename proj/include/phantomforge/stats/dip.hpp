// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace phantomforge::stats {

/// Hartigan & Hartigan dip statistic of an ascending sample (n >= 4),
/// computed from the greatest convex minorant / least concave majorant of the
/// empirical CDF. Result lies in [1/(2n), 1/4].
/// Throws Error(kInsufficientData) for n < 4, Error(kInvalidArgument) if unsorted.
double dip_statistic(std::span<const double> sorted);

/// Null distribution the bootstrap p-value is calibrated against. The dip is
/// affine invariant, so one standard member of each family suffices.
enum class DipReference { kNormal, kUniform };

std::string_view to_string(DipReference ref);
DipReference parse_dip_reference(std::string_view text);

/// Fraction of `bootstrap_b` reference samples of size n whose dip is >= D.
/// Deterministic for a given (n, bootstrap_b, seed, reference); the sorted
/// reference dips are cached per key. Requires bootstrap_b >= 200.
double dip_pvalue(double dip, std::size_t n, int bootstrap_b, std::uint64_t seed,
                  DipReference reference = DipReference::kNormal);

struct DipResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Sorts a copy of `samples`, then computes the statistic and its p-value.
DipResult dip_test(std::span<const double> samples, int bootstrap_b, std::uint64_t seed,
                   DipReference reference = DipReference::kNormal);

}  // namespace phantomforge::stats
