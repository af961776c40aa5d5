// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace phantomforge {

/// Number of workers for a requested job count; <= 0 means one per core.
int resolve_jobs(int jobs);

/// Calls body(i) for i in [0, n) on up to `jobs` threads. Each index runs
/// exactly once; callers write results to per-index slots, so the outcome is
/// independent of the schedule. The first exception thrown is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace phantomforge
