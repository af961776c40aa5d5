// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <zlib.h>

#include <cstring>
#include <functional>
#include <fstream>
#include <json.hpp>

#include "fixtures.hpp"
#include "phantomforge/error.hpp"
#include "phantomforge/grid_io.hpp"

using namespace phantomforge;
namespace fs = std::filesystem;

namespace {

VoxelGrid ramp_grid() {
  GridTemplate t;
  t.dims = {5, 4, 3};
  t.spacing_mm = {0.5, 0.75, 2.0};
  t.origin_mm = {-10.0, 3.0, 7.5};
  VoxelGrid g(t);
  auto labels = g.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<Label>((i * 7) % 140);
  return g;
}

struct NiftiFields {
  std::int16_t datatype = 512;
  std::int16_t bitpix = 16;
  float vox_offset = 352.0f;
  float slope = 0.0f;
  std::int16_t sform = 1;
  float srow[3][4] = {{0.5f, 0, 0, -10.0f}, {0, 0.75f, 0, 3.0f}, {0, 0, 2.0f, 7.5f}};
  const char* magic = "n+1";
};

std::string nifti_bytes(const VoxelGrid& g, const NiftiFields& fields) {
  std::string h(348, '\0');
  auto put16 = [&](std::size_t off, std::int16_t v) { std::memcpy(h.data() + off, &v, 2); };
  auto put32 = [&](std::size_t off, std::int32_t v) { std::memcpy(h.data() + off, &v, 4); };
  auto putf = [&](std::size_t off, float v) { std::memcpy(h.data() + off, &v, 4); };
  put32(0, 348);
  put16(40, 3);
  put16(42, static_cast<std::int16_t>(g.dims().nx));
  put16(44, static_cast<std::int16_t>(g.dims().ny));
  put16(46, static_cast<std::int16_t>(g.dims().nz));
  put16(48, 1);
  put16(70, fields.datatype);
  put16(72, fields.bitpix);
  putf(76, 1.0f);
  putf(80, static_cast<float>(g.spacing()[0]));
  putf(84, static_cast<float>(g.spacing()[1]));
  putf(88, static_cast<float>(g.spacing()[2]));
  putf(108, fields.vox_offset);
  putf(112, fields.slope);
  put16(254, fields.sform);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) putf(280 + 16 * r + 4 * c, fields.srow[r][c]);
  }
  std::memcpy(h.data() + 344, fields.magic, std::strlen(fields.magic) + 1);
  std::string out = h;
  out.resize(static_cast<std::size_t>(fields.vox_offset), '\0');
  for (Label v : g.labels()) {
    if (fields.datatype == 2) {
      out.push_back(static_cast<char>(v));
    } else {
      char b[2];
      std::memcpy(b, &v, 2);
      out.append(b, 2);
    }
  }
  return out;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_gz(const fs::path& p, const std::string& bytes) {
  gzFile f = gzopen(p.c_str(), "wb");
  REQUIRE(f != nullptr);
  gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size()));
  gzclose(f);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("raw sidecar round trip, plain and gzip") {
  pf_test::TempDir dir;
  const VoxelGrid g = ramp_grid();
  for (bool gz : {false, true}) {
    const fs::path p = dir / (gz ? "a.lvol.gz" : "a.lvol");
    write_label_grid(g, p, gz);
    CHECK(fs::exists(sidecar_path(p)));
    const VoxelGrid back = read_label_grid(p);
    CHECK(back == g);
    const GridHeader h = read_grid_header(p, GridFormat::kRawSidecar);
    CHECK(h.gzip == gz);
    CHECK(h.geometry == g.geometry());
  }
}

TEST_CASE("format detection") {
  CHECK(detect_grid_format("x/scan.nii") == GridFormat::kNifti1);
  CHECK(detect_grid_format("x/scan.nii.gz") == GridFormat::kNifti1);
  CHECK(detect_grid_format("x/scan.lvol") == GridFormat::kRawSidecar);
}

TEST_CASE("slice reader delivers every slice then stops") {
  pf_test::TempDir dir;
  const VoxelGrid g = ramp_grid();
  const fs::path p = dir / "s.lvol";
  write_label_grid(g, p, true);
  SliceReader reader(p, GridFormat::kRawSidecar);
  std::vector<Label> slice;
  std::size_t k = 0;
  while (reader.next(slice)) {
    REQUIRE(slice.size() == g.dims().slice_count());
    const auto expect = g.slice(k);
    CHECK(std::equal(slice.begin(), slice.end(), expect.begin()));
    ++k;
  }
  CHECK(k == g.dims().nz);
  CHECK(reader.slices_read() == g.dims().nz);
  CHECK_FALSE(reader.next(slice));
}

TEST_CASE("truncated payload is a format error") {
  pf_test::TempDir dir;
  const fs::path p = dir / "t.lvol";
  write_label_grid(ramp_grid(), p, false);
  fs::resize_file(p, fs::file_size(p) - 2);
  CHECK(code_of([&] { read_label_grid(p); }) == ErrorCode::kFormat);
}

TEST_CASE("missing sidecar and missing file") {
  pf_test::TempDir dir;
  const fs::path p = dir / "m.lvol";
  write_bytes(p, std::string(10, '\0'));
  CHECK(code_of([&] { read_label_grid(p); }) == ErrorCode::kNotFound);
  CHECK(code_of([&] { read_label_grid(dir / "absent.lvol"); }) == ErrorCode::kNotFound);
}

TEST_CASE("u8 sidecar payload widens to u16") {
  pf_test::TempDir dir;
  const fs::path p = dir / "u8.lvol";
  write_bytes(p, std::string("\x01\x02\x03\x04\x05\x06\x07\x08", 8));
  std::ofstream(sidecar_path(p)) << R"({"dims":[2,2,2],"spacing_mm":[1,1,1],"dtype":"u8"})";
  const VoxelGrid g = read_label_grid(p);
  CHECK(g.at(0, 0, 0) == 1);
  CHECK(g.at(1, 1, 1) == 8);
}

TEST_CASE("nifti u16 with sform, plain and gzip") {
  pf_test::TempDir dir;
  const VoxelGrid g = ramp_grid();
  const std::string bytes = nifti_bytes(g, {});
  write_bytes(dir / "a.nii", bytes);
  write_gz(dir / "a.nii.gz", bytes);
  for (const char* name : {"a.nii", "a.nii.gz"}) {
    const VoxelGrid back = read_label_grid(dir / name);
    CHECK(back.labels().size() == g.labels().size());
    CHECK(std::equal(back.labels().begin(), back.labels().end(), g.labels().begin()));
    CHECK(back.geometry().spacing_mm == g.geometry().spacing_mm);
    CHECK(back.geometry().origin_mm == g.geometry().origin_mm);
    REQUIRE(back.source_affine().has_value());
    CHECK((*back.source_affine())[0] == doctest::Approx(0.5));
  }
}

TEST_CASE("nifti u8 payload") {
  pf_test::TempDir dir;
  const VoxelGrid g = ramp_grid();
  NiftiFields fields;
  fields.datatype = 2;
  fields.bitpix = 8;
  write_bytes(dir / "b.nii", nifti_bytes(g, fields));
  const VoxelGrid back = read_label_grid(dir / "b.nii");
  CHECK(std::equal(back.labels().begin(), back.labels().end(), g.labels().begin()));
}

TEST_CASE("nifti rejections") {
  pf_test::TempDir dir;
  const VoxelGrid g = ramp_grid();
  SUBCASE("float datatype") {
    NiftiFields fields;
    fields.datatype = 16;
    fields.bitpix = 32;
    write_bytes(dir / "f.nii", nifti_bytes(g, fields));
    CHECK(code_of([&] { read_label_grid(dir / "f.nii"); }) == ErrorCode::kFormat);
  }
  SUBCASE("intensity scaling") {
    NiftiFields fields;
    fields.slope = 2.0f;
    write_bytes(dir / "s.nii", nifti_bytes(g, fields));
    CHECK(code_of([&] { read_label_grid(dir / "s.nii"); }) == ErrorCode::kFormat);
  }
  SUBCASE("two-file magic") {
    NiftiFields fields;
    fields.magic = "ni1";
    write_bytes(dir / "m.nii", nifti_bytes(g, fields));
    CHECK(code_of([&] { read_label_grid(dir / "m.nii"); }) == ErrorCode::kFormat);
  }
  SUBCASE("oblique sform") {
    NiftiFields fields;
    fields.srow[0][1] = 0.3f;
    write_bytes(dir / "o.nii", nifti_bytes(g, fields));
    CHECK(code_of([&] { read_label_grid(dir / "o.nii"); }) == ErrorCode::kFormat);
  }
  SUBCASE("not nifti at all") {
    write_bytes(dir / "z.nii", std::string(400, 'x'));
    CHECK(code_of([&] { read_label_grid(dir / "z.nii"); }) == ErrorCode::kFormat);
  }
}

TEST_CASE("grid helpers") {
  VoxelGrid g(pf_test::cube_template(6));
  CHECK_FALSE(nonzero_bounds(g).has_value());
  g.set(1, 2, 3, 5);
  g.set(4, 2, 1, 9);
  const auto box = nonzero_bounds(g);
  REQUIRE(box.has_value());
  CHECK(box->lo == std::array<std::size_t, 3>{1, 2, 1});
  CHECK(box->hi == std::array<std::size_t, 3>{4, 2, 3});
  const VoxelGrid m = extract_mask(g, 9);
  CHECK(m.at(4, 2, 1) == 1);
  CHECK(m.at(1, 2, 3) == 0);
  CHECK(code_of([&] { extract_mask(g, 0); }) == ErrorCode::kInvalidArgument);
  GridTemplate bad = pf_test::cube_template(2);
  bad.spacing_mm[1] = 0.0;
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { VoxelGrid(pf_test::cube_template(2), std::vector<Label>(3)); }) ==
        ErrorCode::kValidation);
}
