// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace phantomforge::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view to_string(Isa isa);

struct OverlapCounts {
  std::uint64_t a = 0;     // nonzero in a
  std::uint64_t b = 0;     // nonzero in b
  std::uint64_t both = 0;  // nonzero in both
};

/// Table of data-parallel inner loops. Every variant must produce results
/// bit-identical to the scalar reference.
struct Kernels {
  Isa isa;

  /// counts[v] += number of elements equal to v. `counts` has 65536 slots.
  void (*tally_u16)(const std::uint16_t* src, std::size_t n, std::uint64_t* counts);

  /// dst[i] = (src[i] == value) ? 1 : 0.
  void (*mask_equal_u16)(const std::uint16_t* src, std::size_t n, std::uint16_t value,
                         std::uint16_t* dst);

  std::uint64_t (*count_equal_u16)(const std::uint16_t* src, std::size_t n,
                                   std::uint16_t value);

  OverlapCounts (*overlap_u16)(const std::uint16_t* a, const std::uint16_t* b,
                               std::size_t n);

  /// out[i] = (1 - lambda) * cur[i] + lambda * avg[i], evaluated as two
  /// products and one sum (no fused multiply-add).
  void (*blend_f64)(const double* cur, const double* avg, double lambda, double* out,
                    std::size_t n);
};

/// Kernels for the best ISA supported by this CPU, unless overridden with
/// PHANTOMFORGE_ISA=scalar|avx2|neon or force_isa().
const Kernels& kernels();

/// Whether `isa` was compiled in and is supported by the running CPU.
bool isa_available(Isa isa);

/// Throws Error(kInvalidArgument) when the ISA is unavailable.
const Kernels& kernels_for(Isa isa);

void force_isa(Isa isa);

namespace detail {
extern const Kernels kScalarKernels;
#if defined(PF_BUILD_AVX2)
extern const Kernels kAvx2Kernels;
#endif
#if defined(PF_BUILD_NEON)
extern const Kernels kNeonKernels;
#endif
}  // namespace detail

}  // namespace phantomforge::simd
