// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "phantomforge/grid.hpp"

namespace phantomforge::catalog {

struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB
};

/// 8-bit RGB PNG bytes.
std::string encode_png(const RgbImage& image);

enum class ProjectionAxis { kAxial, kCoronal, kSagittal };
std::string_view to_string(ProjectionAxis axis);
ProjectionAxis parse_projection_axis(std::string_view text);
inline constexpr std::array<ProjectionAxis, 3> kProjectionAxes = {
    ProjectionAxis::kAxial, ProjectionAxis::kCoronal, ProjectionAxis::kSagittal};

/// Maximum label along the axis, colored with a fixed palette (0 is black).
/// Axial looks down z, coronal down y, sagittal down x; z grows upward.
RgbImage max_label_projection(const VoxelGrid& grid, ProjectionAxis axis);

std::array<std::uint8_t, 3> label_color(Label label);

}  // namespace phantomforge::catalog
