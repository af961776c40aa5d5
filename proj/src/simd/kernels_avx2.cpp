// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0
//
// AVX2 variants. This translation unit is compiled with -mavx2 and is only
// reached after a runtime CPUID check.

#include <immintrin.h>

#include "phantomforge/simd/kernels.hpp"

namespace phantomforge::simd {
namespace {

constexpr std::size_t kLanes16 = 16;

// Label maps are dominated by long runs (mostly background). A block of 16
// identical labels is counted with one increment.
void tally_u16(const std::uint16_t* src, std::size_t n, std::uint64_t* counts) {
  std::size_t i = 0;
  for (; i + kLanes16 <= n; i += kLanes16) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    const __m256i first = _mm256_set1_epi16(static_cast<short>(src[i]));
    const __m256i eq = _mm256_cmpeq_epi16(v, first);
    if (_mm256_movemask_epi8(eq) == -1) {
      counts[src[i]] += kLanes16;
    } else {
      for (std::size_t j = 0; j < kLanes16; ++j) ++counts[src[i + j]];
    }
  }
  for (; i < n; ++i) ++counts[src[i]];
}

void mask_equal_u16(const std::uint16_t* src, std::size_t n, std::uint16_t value,
                    std::uint16_t* dst) {
  const __m256i target = _mm256_set1_epi16(static_cast<short>(value));
  const __m256i one = _mm256_set1_epi16(1);
  std::size_t i = 0;
  for (; i + kLanes16 <= n; i += kLanes16) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    const __m256i eq = _mm256_cmpeq_epi16(v, target);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_and_si256(eq, one));
  }
  for (; i < n; ++i) dst[i] = src[i] == value ? 1 : 0;
}

inline std::uint64_t popcount_mask(__m256i eq) {
  // Each 16-bit lane contributes two bits to the byte mask.
  return static_cast<std::uint64_t>(
             __builtin_popcount(static_cast<unsigned>(_mm256_movemask_epi8(eq)))) /
         2;
}

std::uint64_t count_equal_u16(const std::uint16_t* src, std::size_t n,
                              std::uint16_t value) {
  const __m256i target = _mm256_set1_epi16(static_cast<short>(value));
  std::uint64_t count = 0;
  std::size_t i = 0;
  for (; i + kLanes16 <= n; i += kLanes16) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    count += popcount_mask(_mm256_cmpeq_epi16(v, target));
  }
  for (; i < n; ++i) count += src[i] == value;
  return count;
}

OverlapCounts overlap_u16(const std::uint16_t* a, const std::uint16_t* b, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  OverlapCounts out;
  std::size_t i = 0;
  for (; i + kLanes16 <= n; i += kLanes16) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const __m256i za = _mm256_cmpeq_epi16(va, zero);
    const __m256i zb = _mm256_cmpeq_epi16(vb, zero);
    out.a += kLanes16 - popcount_mask(za);
    out.b += kLanes16 - popcount_mask(zb);
    out.both += kLanes16 - popcount_mask(_mm256_or_si256(za, zb));
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
  const __m256d vkeep = _mm256_set1_pd(keep);
  const __m256d vlambda = _mm256_set1_pd(lambda);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_mul_pd(vkeep, _mm256_loadu_pd(cur + i));
    const __m256d b = _mm256_mul_pd(vlambda, _mm256_loadu_pd(avg + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(a, b));
  }
  for (; i < n; ++i) {
    const double a = keep * cur[i];
    const double b = lambda * avg[i];
    out[i] = a + b;
  }
}

}  // namespace

namespace detail {
const Kernels kAvx2Kernels{Isa::kAvx2, tally_u16, mask_equal_u16, count_equal_u16,
                           overlap_u16, blend_f64};
}  // namespace detail

}  // namespace phantomforge::simd
