// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "phantomforge/grid.hpp"

namespace phantomforge {

enum class GridFormat { kRawSidecar, kNifti1 };

/// `.nii` / `.nii.gz` are NIfTI-1, anything else is raw + `<path>.json` sidecar.
GridFormat detect_grid_format(const std::filesystem::path& path);

/// Reads a label volume. u8 payloads are widened to u16, gzip payloads are
/// decompressed transparently. Throws Error(kIo / kFormat / kValidation).
VoxelGrid read_label_grid(const std::filesystem::path& path, GridFormat format);
VoxelGrid read_label_grid(const std::filesystem::path& path);

/// Writes `<path>` (little-endian u16, x fastest) and `<path>.json`.
void write_label_grid(const VoxelGrid& grid, const std::filesystem::path& path,
                      bool compress);

std::filesystem::path sidecar_path(const std::filesystem::path& payload);

enum class StoredType { kU8, kU16, kI16 };

struct GridHeader {
  GridTemplate geometry;
  StoredType stored_type = StoredType::kU16;
  bool gzip = false;
  std::optional<Affine> affine;
};

/// Reads only the header (sidecar or NIfTI header) of a label volume.
GridHeader read_grid_header(const std::filesystem::path& path, GridFormat format);

/// Streams a label volume one z-slice at a time; working memory is one slice.
/// Single consumer.
class SliceReader {
 public:
  SliceReader(const std::filesystem::path& path, GridFormat format);
  ~SliceReader();
  SliceReader(SliceReader&&) noexcept;
  SliceReader& operator=(SliceReader&&) noexcept;

  const GridHeader& header() const;
  const GridTemplate& geometry() const { return header().geometry; }

  /// Fills `out` with the next slice (nx*ny labels). Returns false once all
  /// nz slices have been delivered. Throws on truncated or malformed data.
  bool next(std::vector<Label>& out);

  std::size_t slices_read() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace phantomforge
