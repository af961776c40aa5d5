// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <arm_neon.h>

#include "phantomforge/simd/kernels.hpp"

namespace phantomforge::simd {
namespace {

constexpr std::size_t kLanes16 = 8;

void tally_u16(const std::uint16_t* src, std::size_t n, std::uint64_t* counts) {
  std::size_t i = 0;
  for (; i + kLanes16 <= n; i += kLanes16) {
    const uint16x8_t v = vld1q_u16(src + i);
    const uint16x8_t eq = vceqq_u16(v, vdupq_n_u16(src[i]));
    if (vminvq_u16(eq) == 0xFFFF) {
      counts[src[i]] += kLanes16;
    } else {
      for (std::size_t j = 0; j < kLanes16; ++j) ++counts[src[i + j]];
    }
  }
  for (; i < n; ++i) ++counts[src[i]];
}

void mask_equal_u16(const std::uint16_t* src, std::size_t n, std::uint16_t value,
                    std::uint16_t* dst) {
  const uint16x8_t target = vdupq_n_u16(value);
  const uint16x8_t one = vdupq_n_u16(1);
  std::size_t i = 0;
  for (; i + kLanes16 <= n; i += kLanes16) {
    vst1q_u16(dst + i, vandq_u16(vceqq_u16(vld1q_u16(src + i), target), one));
  }
  for (; i < n; ++i) dst[i] = src[i] == value ? 1 : 0;
}

std::uint64_t count_equal_u16(const std::uint16_t* src, std::size_t n,
                              std::uint16_t value) {
  const uint16x8_t target = vdupq_n_u16(value);
  const uint16x8_t one = vdupq_n_u16(1);
  std::uint64_t count = 0;
  std::size_t i = 0;
  for (; i + kLanes16 <= n; i += kLanes16) {
    count += vaddvq_u16(vandq_u16(vceqq_u16(vld1q_u16(src + i), target), one));
  }
  for (; i < n; ++i) count += src[i] == value;
  return count;
}

OverlapCounts overlap_u16(const std::uint16_t* a, const std::uint16_t* b, std::size_t n) {
  const uint16x8_t one = vdupq_n_u16(1);
  OverlapCounts out;
  std::size_t i = 0;
  for (; i + kLanes16 <= n; i += kLanes16) {
    const uint16x8_t na = vtstq_u16(vld1q_u16(a + i), vdupq_n_u16(0xFFFF));
    const uint16x8_t nb = vtstq_u16(vld1q_u16(b + i), vdupq_n_u16(0xFFFF));
    out.a += vaddvq_u16(vandq_u16(na, one));
    out.b += vaddvq_u16(vandq_u16(nb, one));
    out.both += vaddvq_u16(vandq_u16(vandq_u16(na, nb), one));
  }
  for (; i < n; ++i) {
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
  const float64x2_t vkeep = vdupq_n_f64(keep);
  const float64x2_t vlambda = vdupq_n_f64(lambda);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t a = vmulq_f64(vkeep, vld1q_f64(cur + i));
    const float64x2_t b = vmulq_f64(vlambda, vld1q_f64(avg + i));
    vst1q_f64(out + i, vaddq_f64(a, b));
  }
  for (; i < n; ++i) {
    const double a = keep * cur[i];
    const double b = lambda * avg[i];
    out[i] = a + b;
  }
}

}  // namespace

namespace detail {
const Kernels kNeonKernels{Isa::kNeon, tally_u16, mask_equal_u16, count_equal_u16,
                           overlap_u16, blend_f64};
}  // namespace detail

}  // namespace phantomforge::simd
