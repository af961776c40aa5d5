// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/mesh/mesh_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "phantomforge/error.hpp"

namespace phantomforge::mesh {
namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw Error(ErrorCode::kFormat, "PLY payload is truncated");
  }
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

struct PlyProperty {
  std::string type;
  std::string name;
  bool list = false;
  std::string count_type;
};

double read_scalar(std::istream& in, const std::string& type) {
  if (type == "float" || type == "float32") return get_le<float>(in);
  if (type == "double" || type == "float64") return get_le<double>(in);
  if (type == "int" || type == "int32") return get_le<std::int32_t>(in);
  if (type == "uint" || type == "uint32") return get_le<std::uint32_t>(in);
  if (type == "uchar" || type == "uint8") return get_le<std::uint8_t>(in);
  if (type == "char" || type == "int8") return get_le<std::int8_t>(in);
  if (type == "short" || type == "int16") return get_le<std::int16_t>(in);
  if (type == "ushort" || type == "uint16") return get_le<std::uint16_t>(in);
  throw Error(ErrorCode::kFormat, "unsupported PLY property type " + type);
}

}  // namespace

MeshFormat parse_mesh_format(std::string_view text) {
  if (text == "ply" || text == "ply-binary") return MeshFormat::kPlyBinary;
  if (text == "obj") return MeshFormat::kObj;
  if (text == "stl" || text == "stl-binary") return MeshFormat::kStlBinary;
  throw Error(ErrorCode::kInvalidArgument, "unknown mesh format \"" + std::string(text) + "\"");
}

MeshFormat format_for_path(const std::filesystem::path& path) {
  return parse_mesh_format(path.extension().string().substr(path.extension().empty() ? 0 : 1));
}

void write_ply(const TriangleMesh& mesh, std::ostream& out) {
  out << "ply\nformat binary_little_endian 1.0\ncomment phantomforge\n"
      << "element vertex " << mesh.vertices.size() << '\n'
      << "property float x\nproperty float y\nproperty float z\n"
      << "element face " << mesh.triangles.size() << '\n'
      << "property list uchar int vertex_indices\nend_header\n";
  for (const Vec3& v : mesh.vertices) {
    for (double c : v) put_le<float>(out, static_cast<float>(c));
  }
  for (const Triangle& t : mesh.triangles) {
    put_le<std::uint8_t>(out, 3);
    for (std::uint32_t i : t) put_le<std::int32_t>(out, static_cast<std::int32_t>(i));
  }
}

void write_obj(const TriangleMesh& mesh, std::ostream& out) {
  out << "# phantomforge\n" << std::setprecision(9);
  for (const Vec3& v : mesh.vertices) out << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const Triangle& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

void write_stl(const TriangleMesh& mesh, std::ostream& out) {
  char header[80] = {};
  std::strncpy(header, "phantomforge binary STL", sizeof(header) - 1);
  out.write(header, sizeof(header));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mesh.triangles.size()));
  for (const Triangle& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    const Vec3 u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const Vec3 w{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    Vec3 n{u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]};
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (len > 0) {
      for (double& x : n) x /= len;
    }
    for (double x : n) put_le<float>(out, static_cast<float>(x));
    for (const Vec3* v : {&a, &b, &c}) {
      for (double x : *v) put_le<float>(out, static_cast<float>(x));
    }
    put_le<std::uint16_t>(out, 0);
  }
}

void export_mesh(const TriangleMesh& mesh, MeshFormat format, const std::filesystem::path& path) {
  validate_mesh(mesh);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  switch (format) {
    case MeshFormat::kPlyBinary:
      write_ply(mesh, out);
      break;
    case MeshFormat::kObj:
      write_obj(mesh, out);
      break;
    case MeshFormat::kStlBinary:
      write_stl(mesh, out);
      break;
  }
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

TriangleMesh read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "ply") throw Error(ErrorCode::kFormat, "not a PLY file");
  std::size_t n_vertices = 0;
  std::size_t n_faces = 0;
  std::vector<PlyProperty> vertex_props;
  std::vector<PlyProperty> face_props;
  std::vector<PlyProperty>* current = nullptr;
  bool binary_le = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream words(line);
    std::string word;
    words >> word;
    if (word == "format") {
      std::string fmt;
      words >> fmt;
      binary_le = fmt == "binary_little_endian";
    } else if (word == "element") {
      std::string name;
      std::size_t count = 0;
      words >> name >> count;
      if (name == "vertex") {
        n_vertices = count;
        current = &vertex_props;
      } else if (name == "face") {
        n_faces = count;
        current = &face_props;
      } else {
        throw Error(ErrorCode::kFormat, "unsupported PLY element " + name);
      }
    } else if (word == "property") {
      if (current == nullptr) throw Error(ErrorCode::kFormat, "PLY property before element");
      PlyProperty p;
      words >> p.type;
      if (p.type == "list") {
        p.list = true;
        words >> p.count_type >> p.type;
      }
      words >> p.name;
      current->push_back(p);
    } else if (word == "end_header") {
      break;
    }
  }
  if (!binary_le) throw Error(ErrorCode::kFormat, "only binary_little_endian PLY is supported");

  TriangleMesh mesh;
  mesh.vertices.resize(n_vertices);
  for (std::size_t v = 0; v < n_vertices; ++v) {
    for (const PlyProperty& p : vertex_props) {
      if (p.list) throw Error(ErrorCode::kFormat, "list properties on vertices are not supported");
      const double value = read_scalar(in, p.type);
      if (p.name == "x") mesh.vertices[v][0] = value;
      if (p.name == "y") mesh.vertices[v][1] = value;
      if (p.name == "z") mesh.vertices[v][2] = value;
    }
  }
  mesh.triangles.resize(n_faces);
  for (std::size_t f = 0; f < n_faces; ++f) {
    for (const PlyProperty& p : face_props) {
      if (!p.list) {
        read_scalar(in, p.type);
        continue;
      }
      const auto count = static_cast<std::size_t>(read_scalar(in, p.count_type));
      if (count != 3) throw Error(ErrorCode::kFormat, "only triangular PLY faces are supported");
      for (std::size_t c = 0; c < 3; ++c) {
        const double idx = read_scalar(in, p.type);
        if (idx < 0) throw Error(ErrorCode::kFormat, "negative PLY vertex index");
        mesh.triangles[f][c] = static_cast<std::uint32_t>(idx);
      }
    }
  }
  validate_mesh(mesh);
  return mesh;
}

TriangleMesh read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  return read_ply(in);
}

}  // namespace phantomforge::mesh
