// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "phantomforge/error.hpp"
#include "phantomforge/simd/kernels.hpp"

namespace phantomforge::simd {
namespace {

bool cpu_has_avx2() {
#if defined(PF_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Kernels* best_available() {
  if (const char* env = std::getenv("PHANTOMFORGE_ISA")) {
    const std::string want(env);
    if (want == "scalar") return &detail::kScalarKernels;
    if (want == "avx2" && isa_available(Isa::kAvx2)) return &kernels_for(Isa::kAvx2);
    if (want == "neon" && isa_available(Isa::kNeon)) return &kernels_for(Isa::kNeon);
  }
  if (isa_available(Isa::kAvx2)) return &kernels_for(Isa::kAvx2);
  if (isa_available(Isa::kNeon)) return &kernels_for(Isa::kNeon);
  return &detail::kScalarKernels;
}

std::atomic<const Kernels*>& active() {
  static std::atomic<const Kernels*> table{best_available()};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return true;
    case Isa::kAvx2: return cpu_has_avx2();
    case Isa::kNeon:
#if defined(PF_BUILD_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Kernels& kernels_for(Isa isa) {
  if (!isa_available(isa)) {
    throw Error(ErrorCode::kInvalidArgument,
                "SIMD variant not available on this CPU/build: " + std::string(to_string(isa)));
  }
  switch (isa) {
#if defined(PF_BUILD_AVX2)
    case Isa::kAvx2: return detail::kAvx2Kernels;
#endif
#if defined(PF_BUILD_NEON)
    case Isa::kNeon: return detail::kNeonKernels;
#endif
    default: return detail::kScalarKernels;
  }
}

const Kernels& kernels() { return *active().load(std::memory_order_acquire); }

void force_isa(Isa isa) { active().store(&kernels_for(isa), std::memory_order_release); }

}  // namespace phantomforge::simd
