// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "phantomforge/mesh/mesh.hpp"

namespace phantomforge::mesh {

enum class MeshFormat { kPlyBinary, kObj, kStlBinary };
MeshFormat parse_mesh_format(std::string_view text);
/// By extension: .ply, .obj, .stl.
MeshFormat format_for_path(const std::filesystem::path& path);

/// PLY binary_little_endian 1.0, float32 xyz, uchar/int face lists.
void write_ply(const TriangleMesh& mesh, std::ostream& out);
void write_obj(const TriangleMesh& mesh, std::ostream& out);
/// 80-byte header, uint32 count, 50 bytes per facet with its unit normal.
void write_stl(const TriangleMesh& mesh, std::ostream& out);

void export_mesh(const TriangleMesh& mesh, MeshFormat format, const std::filesystem::path& path);

/// Reads binary little-endian PLY with float or double coordinates and
/// uchar-counted int/uint index lists of length 3.
TriangleMesh read_ply(std::istream& in);
TriangleMesh read_ply(const std::filesystem::path& path);

}  // namespace phantomforge::mesh
