// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include "byte_source.hpp"
#include "phantomforge/grid_io.hpp"

namespace phantomforge::detail {

struct NiftiInfo {
  GridHeader header;
  bool swapped = false;
  std::size_t vox_offset = 352;
};

/// Parses the 348-byte header and leaves `src` positioned at the first voxel.
NiftiInfo read_nifti_header(ByteSource& src);

}  // namespace phantomforge::detail
