// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dip statistic after Hartigan & Hartigan (1985) / Hartigan's AS 217, in the
// 1-based index formulation: mn[] and mj[] hold the convex-minorant and
// concave-majorant predecessor links of the ECDF, and the modal interval
// [low, high] shrinks until the distance between the two hulls stops growing.

#include "phantomforge/stats/dip.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "phantomforge/error.hpp"

namespace phantomforge::stats {
namespace {

// Returns the dip scaled by 2n (i.e. in units of one ECDF step counted twice).
double dip_scaled(const double* data, std::size_t count) {
  const int n = static_cast<int>(count);
  // 1-based views.
  std::vector<double> x(count + 1);
  std::copy(data, data + count, x.begin() + 1);
  std::vector<int> mn(count + 1), mj(count + 1), gcm(count + 1), lcm(count + 1);

  int low = 1;
  int high = n;
  double dip = 1.0;
  if (x[n] == x[1]) return dip;

  mn[1] = 1;
  for (int j = 2; j <= n; ++j) {
    mn[j] = j - 1;
    for (;;) {
      const int mnj = mn[j];
      const int mnmnj = mn[mnj];
      if (mnj == 1 || (x[j] - x[mnj]) * (mnj - mnmnj) < (x[mnj] - x[mnmnj]) * (j - mnj)) break;
      mn[j] = mnmnj;
    }
  }

  mj[n] = n;
  for (int k = n - 1; k >= 1; --k) {
    mj[k] = k + 1;
    for (;;) {
      const int mjk = mj[k];
      const int mjmjk = mj[mjk];
      if (mjk == n || (x[k] - x[mjk]) * (mjk - mjmjk) < (x[mjk] - x[mjmjk]) * (k - mjk)) break;
      mj[k] = mjmjk;
    }
  }

  for (;;) {
    // Change points of the GCM from high down to low.
    int ic = 1;
    gcm[1] = high;
    while (gcm[ic] > low) {
      const int i = gcm[ic];
      ++ic;
      gcm[ic] = mn[i];
    }
    const int l_gcm = ic;

    // Change points of the LCM from low up to high.
    ic = 1;
    lcm[1] = low;
    while (lcm[ic] < high) {
      const int i = lcm[ic];
      ++ic;
      lcm[ic] = mj[i];
    }
    const int l_lcm = ic;

    // Largest distance between GCM and LCM on [low, high].
    int ig = l_gcm;
    int ih = l_lcm;
    int ix = l_gcm - 1;
    int iv = 2;
    double d = 0.0;
    if (l_gcm != 2 || l_lcm != 2) {
      do {
        const int gcm_ix = gcm[ix];
        const int lcm_iv = lcm[iv];
        if (gcm_ix > lcm_iv) {
          const int gcm_i = gcm[ix + 1];
          const double dx = (lcm_iv - gcm_i + 1) -
                            (x[lcm_iv] - x[gcm_i]) * (gcm_ix - gcm_i) / (x[gcm_ix] - x[gcm_i]);
          ++iv;
          if (dx >= d) {
            d = dx;
            ig = ix + 1;
            ih = iv - 1;
          }
        } else {
          const int lcm_i = lcm[iv - 1];
          const double dx = (x[gcm_ix] - x[lcm_i]) * (lcm_iv - lcm_i) / (x[lcm_iv] - x[lcm_i]) -
                            (gcm_ix - lcm_i - 1);
          --ix;
          if (dx >= d) {
            d = dx;
            ig = ix + 1;
            ih = iv;
          }
        }
        ix = std::max(ix, 1);
        iv = std::min(iv, l_lcm);
      } while (gcm[ix] != lcm[iv]);
    } else {
      d = 1.0;
    }

    if (d < dip) break;

    // Dip of the convex minorant on its side of the modal interval.
    double dip_l = 0.0;
    for (int j = ig; j < l_gcm; ++j) {
      double max_t = 1.0;
      const int jb = gcm[j];
      const int ja = gcm[j + 1];
      if (jb - ja > 1 && x[jb] != x[ja]) {
        const double c = (jb - ja) / (x[jb] - x[ja]);
        for (int jj = ja; jj <= jb; ++jj) {
          max_t = std::max(max_t, (jj - ja + 1) - (x[jj] - x[ja]) * c);
        }
      }
      dip_l = std::max(dip_l, max_t);
    }

    // Dip of the concave majorant.
    double dip_u = 0.0;
    for (int j = ih; j < l_lcm; ++j) {
      double max_t = 1.0;
      const int ja = lcm[j];
      const int jb = lcm[j + 1];
      if (jb - ja > 1 && x[jb] != x[ja]) {
        const double c = (jb - ja) / (x[jb] - x[ja]);
        for (int jj = ja; jj <= jb; ++jj) {
          max_t = std::max(max_t, (x[jj] - x[ja]) * c - (jj - ja - 1));
        }
      }
      dip_u = std::max(dip_u, max_t);
    }

    dip = std::max({dip, dip_l, dip_u});

    // Without this guard the cycle can repeat forever on some inputs.
    if (low == gcm[ig] && high == lcm[ih]) break;
    low = gcm[ig];
    high = lcm[ih];
  }
  return dip;
}

using CacheKey = std::tuple<std::size_t, int, std::uint64_t, DipReference>;

std::shared_ptr<const std::vector<double>> reference_dips(std::size_t n, int b,
                                                          std::uint64_t seed,
                                                          DipReference reference) {
  static std::mutex mutex;
  static std::map<CacheKey, std::shared_ptr<const std::vector<double>>> cache;
  const CacheKey key{n, b, seed, reference};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto dips = std::make_shared<std::vector<double>>();
  dips->reserve(static_cast<std::size_t>(b));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> sample(n);
  for (int rep = 0; rep < b; ++rep) {
    for (double& v : sample) v = reference == DipReference::kNormal ? normal(rng) : uniform(rng);
    std::sort(sample.begin(), sample.end());
    dips->push_back(dip_scaled(sample.data(), n) / (2.0 * static_cast<double>(n)));
  }
  std::sort(dips->begin(), dips->end());
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(dips)).first->second;
}

}  // namespace

std::string_view to_string(DipReference ref) {
  return ref == DipReference::kNormal ? "normal" : "uniform";
}

DipReference parse_dip_reference(std::string_view text) {
  if (text == "normal") return DipReference::kNormal;
  if (text == "uniform") return DipReference::kUniform;
  throw Error(ErrorCode::kValidation, "dip reference must be \"normal\" or \"uniform\"");
}

double dip_statistic(std::span<const double> sorted) {
  if (sorted.size() < 4) {
    throw Error(ErrorCode::kInsufficientData, "dip statistic needs at least 4 samples");
  }
  if (!std::is_sorted(sorted.begin(), sorted.end())) {
    throw Error(ErrorCode::kInvalidArgument, "dip statistic needs an ascending sample");
  }
  return dip_scaled(sorted.data(), sorted.size()) / (2.0 * static_cast<double>(sorted.size()));
}

double dip_pvalue(double dip, std::size_t n, int bootstrap_b, std::uint64_t seed,
                  DipReference reference) {
  if (bootstrap_b < 200) {
    throw Error(ErrorCode::kInvalidArgument, "dip bootstrap needs at least 200 replicates");
  }
  if (n < 4) throw Error(ErrorCode::kInsufficientData, "dip p-value needs n >= 4");
  const auto dips = reference_dips(n, bootstrap_b, seed, reference);
  // Count of reference dips >= dip.
  const auto first_ge = std::lower_bound(dips->begin(), dips->end(), dip);
  return static_cast<double>(dips->end() - first_ge) / static_cast<double>(dips->size());
}

DipResult dip_test(std::span<const double> samples, int bootstrap_b, std::uint64_t seed,
                   DipReference reference) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  DipResult result;
  result.statistic = dip_statistic(sorted);
  result.p_value = dip_pvalue(result.statistic, sorted.size(), bootstrap_b, seed, reference);
  return result;
}

}  // namespace phantomforge::stats
