// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/simd/kernels.hpp"

namespace phantomforge::simd {
namespace {

void tally_u16(const std::uint16_t* src, std::size_t n, std::uint64_t* counts) {
  for (std::size_t i = 0; i < n; ++i) ++counts[src[i]];
}

void mask_equal_u16(const std::uint16_t* src, std::size_t n, std::uint16_t value,
                    std::uint16_t* dst) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] == value ? 1 : 0;
}

std::uint64_t count_equal_u16(const std::uint16_t* src, std::size_t n,
                              std::uint16_t value) {
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += src[i] == value;
  return count;
}

OverlapCounts overlap_u16(const std::uint16_t* a, const std::uint16_t* b, std::size_t n) {
  OverlapCounts out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool in_a = a[i] != 0;
    const bool in_b = b[i] != 0;
    out.a += in_a;
    out.b += in_b;
    out.both += in_a && in_b;
  }
  return out;
}

void blend_f64(const double* cur, const double* avg, double lambda, double* out,
               std::size_t n) {
  const double keep = 1.0 - lambda;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = keep * cur[i];
    const double b = lambda * avg[i];
    out[i] = a + b;
  }
}

}  // namespace

namespace detail {
const Kernels kScalarKernels{Isa::kScalar, tally_u16, mask_equal_u16, count_equal_u16,
                             overlap_u16, blend_f64};
}  // namespace detail

}  // namespace phantomforge::simd
