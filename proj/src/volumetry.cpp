// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/volumetry.hpp"

#include <json.hpp>
#include <sstream>
#include <vector>

#include "phantomforge/error.hpp"
#include "phantomforge/parallel.hpp"
#include "phantomforge/simd/kernels.hpp"

namespace phantomforge {
namespace {

using nlohmann::json;
using Histogram = std::vector<std::uint64_t>;

constexpr std::size_t kLabelSpace = 65536;

VolumeTable table_from_histogram(const Histogram& hist, const GridTemplate& geometry,
                                 const Taxonomy& taxonomy) {
  VolumeTable table;
  table.dims = geometry.dims;
  table.spacing_mm = geometry.spacing_mm;
  table.total_voxels = geometry.dims.count();
  for (const StructureDef& s : taxonomy.structures()) table.counts[s.id] = hist[s.id];
  for (std::size_t v = 1; v < kLabelSpace; ++v) {
    if (hist[v] != 0 && !taxonomy.contains(static_cast<Label>(v))) {
      table.unknown_counts[static_cast<Label>(v)] = hist[v];
    }
  }
  return table;
}

}  // namespace

double VolumeTable::volume_ml(Label id) const {
  return static_cast<double>(count(id)) * voxel_volume_mm3() / 1000.0;
}

std::uint64_t VolumeTable::count(Label id) const {
  auto it = counts.find(id);
  return it == counts.end() ? 0 : it->second;
}

std::map<Label, double> VolumeTable::volumes_ml() const {
  std::map<Label, double> out;
  for (const auto& [id, n] : counts) out[id] = volume_ml(id);
  return out;
}

std::string VolumeTable::to_csv(const Taxonomy& taxonomy) const {
  std::ostringstream out;
  out.precision(17);
  out << "structure_id,name,volume_ml\n";
  for (const StructureDef& s : taxonomy.structures()) {
    out << s.id << ',' << s.name << ',' << volume_ml(s.id) << '\n';
  }
  return out.str();
}

json VolumeTable::to_json() const {
  json counts_json = json::object();
  for (const auto& [id, n] : counts) counts_json[std::to_string(id)] = n;
  json volumes_json = json::object();
  for (const auto& [id, n] : counts) volumes_json[std::to_string(id)] = volume_ml(id);
  json unknown_json = json::object();
  for (const auto& [id, n] : unknown_counts) unknown_json[std::to_string(id)] = n;
  return {{"dims", {dims.nx, dims.ny, dims.nz}},
          {"spacing_mm", {spacing_mm[0], spacing_mm[1], spacing_mm[2]}},
          {"total_voxels", total_voxels},
          {"counts", std::move(counts_json)},
          {"volumes_ml", std::move(volumes_json)},
          {"unknown_counts", std::move(unknown_json)}};
}

VolumeTable VolumeTable::from_json(const json& doc) {
  try {
    VolumeTable t;
    const auto d = doc.at("dims").get<std::vector<std::size_t>>();
    const auto s = doc.at("spacing_mm").get<std::vector<double>>();
    if (d.size() != 3 || s.size() != 3) throw Error(ErrorCode::kFormat, "volume table dims/spacing");
    t.dims = {d[0], d[1], d[2]};
    t.spacing_mm = {s[0], s[1], s[2]};
    t.total_voxels = doc.at("total_voxels").get<std::uint64_t>();
    for (const auto& [key, value] : doc.at("counts").items()) {
      t.counts[static_cast<Label>(std::stoul(key))] = value.get<std::uint64_t>();
    }
    if (doc.contains("unknown_counts")) {
      for (const auto& [key, value] : doc["unknown_counts"].items()) {
        t.unknown_counts[static_cast<Label>(std::stoul(key))] = value.get<std::uint64_t>();
      }
    }
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed volume table: ") + e.what());
  }
}

VolumeTable structure_volumes(const VoxelGrid& grid, const Taxonomy& taxonomy) {
  Histogram hist(kLabelSpace, 0);
  simd::kernels().tally_u16(grid.labels().data(), grid.labels().size(), hist.data());
  return table_from_histogram(hist, grid.geometry(), taxonomy);
}

VolumeTable structure_volumes(const std::filesystem::path& path, GridFormat format,
                              const Taxonomy& taxonomy) {
  SliceReader reader(path, format);
  Histogram hist(kLabelSpace, 0);
  std::vector<Label> slice;
  const auto& tally = simd::kernels().tally_u16;
  while (reader.next(slice)) tally(slice.data(), slice.size(), hist.data());
  return table_from_histogram(hist, reader.geometry(), taxonomy);
}

VolumeTable structure_volumes_parallel(const VoxelGrid& grid, const Taxonomy& taxonomy,
                                       int jobs) {
  const std::size_t nz = grid.dims().nz;
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(resolve_jobs(jobs)), nz);
  std::vector<Histogram> partial(workers, Histogram(kLabelSpace, 0));
  parallel_for(workers, static_cast<int>(workers), [&](std::size_t w) {
    const std::size_t z0 = nz * w / workers;
    const std::size_t z1 = nz * (w + 1) / workers;
    for (std::size_t k = z0; k < z1; ++k) {
      auto slice = grid.slice(k);
      simd::kernels().tally_u16(slice.data(), slice.size(), partial[w].data());
    }
  });
  Histogram hist(kLabelSpace, 0);
  for (const Histogram& h : partial) {
    for (std::size_t v = 0; v < kLabelSpace; ++v) hist[v] += h[v];
  }
  return table_from_histogram(hist, grid.geometry(), taxonomy);
}

double zero_volume_fraction(const std::map<Label, double>& volumes_ml,
                            const std::set<Label>& expected) {
  if (expected.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "zero-volume fraction needs a nonempty expected set");
  }
  std::size_t zeros = 0;
  for (Label id : expected) {
    auto it = volumes_ml.find(id);
    if (it == volumes_ml.end() || it->second == 0.0) ++zeros;
  }
  return static_cast<double>(zeros) / static_cast<double>(expected.size());
}

double zero_volume_fraction(const VolumeTable& table, const std::set<Label>& expected) {
  return zero_volume_fraction(table.volumes_ml(), expected);
}

double dice(const VoxelGrid& a, const VoxelGrid& b) {
  if (a.dims() != b.dims()) {
    throw Error(ErrorCode::kDimensionMismatch, "dice requires masks with identical dims");
  }
  const simd::OverlapCounts c =
      simd::kernels().overlap_u16(a.labels().data(), b.labels().data(), a.labels().size());
  if (c.a + c.b == 0) return 1.0;
  return 2.0 * static_cast<double>(c.both) / static_cast<double>(c.a + c.b);
}

}  // namespace phantomforge
