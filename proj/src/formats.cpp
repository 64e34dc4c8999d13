// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelray/formats.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace voxelray {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary containers assume a little-endian host");

class Reader {
 public:
  Reader(const std::filesystem::path& path, std::vector<std::uint8_t> bytes)
      : path_(path), bytes_(std::move(bytes)) {}

  void expect_magic(const char (&magic)[5]) {
    if (bytes_.size() < 4 || std::memcmp(bytes_.data(), magic, 4) != 0) {
      throw std::runtime_error(path_.string() + ": bad magic, expected " + magic);
    }
    offset_ = 4;
  }

  std::uint32_t read_u32() {
    std::uint32_t value = 0;
    take(&value, sizeof(value), "u32");
    return value;
  }

  float read_f32() {
    float value = 0.0f;
    take(&value, sizeof(value), "f32");
    return value;
  }

  void read_f32_into(std::vector<double>& out, std::size_t count) {
    out.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      out[i] = static_cast<double>(read_f32());
    }
  }

  void read_bytes(std::vector<std::uint8_t>& out, std::size_t count) {
    out.resize(count);
    take(out.data(), count, "label bytes");
  }

  void expect_end() const {
    if (offset_ != bytes_.size()) {
      throw std::runtime_error(path_.string() + ": " +
                               std::to_string(bytes_.size() - offset_) +
                               " trailing bytes after the payload");
    }
  }

 private:
  void take(void* destination, std::size_t count, const char* what) {
    if (offset_ + count > bytes_.size()) {
      throw std::runtime_error(path_.string() + ": truncated reading " + what + " at byte " +
                               std::to_string(offset_));
    }
    std::memcpy(destination, bytes_.data() + offset_, count);
    offset_ += count;
  }

  std::filesystem::path path_;
  std::vector<std::uint8_t> bytes_;
  std::size_t offset_ = 0;
};

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error(path.string() + ": read failed");
  return bytes;
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error(path_.string() + ": cannot open for writing");
  }

  void magic(const char (&value)[5]) { out_.write(value, 4); }
  void u32(std::uint32_t value) { raw(&value, sizeof(value)); }
  void f32(float value) { raw(&value, sizeof(value)); }
  void f32_array(const std::vector<double>& values) {
    for (const double v : values) f32(static_cast<float>(v));
  }
  void bytes(const std::vector<std::uint8_t>& values) {
    raw(values.data(), values.size());
  }

  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error(path_.string() + ": write failed");
  }

 private:
  void raw(const void* data, std::size_t count) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(count));
  }

  std::filesystem::path path_;
  std::ofstream out_;
};

std::uint32_t checked_u32(std::size_t value, const char* what) {
  if (value > 0xffffffffULL) {
    throw std::runtime_error(std::string(what) + " too large for the container");
  }
  return static_cast<std::uint32_t>(value);
}

}  // namespace

void write_feature_map(const std::filesystem::path& path, const FeatureMap& map) {
  Writer writer(path);
  writer.magic("FMP1");
  writer.u32(checked_u32(static_cast<std::size_t>(map.height()), "feature map height"));
  writer.u32(checked_u32(static_cast<std::size_t>(map.width()), "feature map width"));
  writer.u32(checked_u32(static_cast<std::size_t>(map.channels()), "feature map channels"));
  writer.f32_array(map.values());
  writer.finish();
}

FeatureMap read_feature_map(const std::filesystem::path& path) {
  Reader reader(path, slurp(path));
  reader.expect_magic("FMP1");
  const std::uint32_t height = reader.read_u32();
  const std::uint32_t width = reader.read_u32();
  const std::uint32_t channels = reader.read_u32();
  if (height == 0 || width == 0 || channels == 0) {
    throw std::runtime_error(path.string() + ": zero dimension in header");
  }
  std::vector<double> values;
  reader.read_f32_into(values, static_cast<std::size_t>(height) * width * channels);
  reader.expect_end();
  return FeatureMap(static_cast<int>(height), static_cast<int>(width),
                    static_cast<int>(channels), std::move(values));
}

void write_voxel_features(const std::filesystem::path& path, const VoxelFeatures& features) {
  const std::size_t expected =
      features.grid.voxel_count() * static_cast<std::size_t>(features.channels);
  if (features.values.size() != expected) {
    throw std::runtime_error("voxel features: expected " + std::to_string(expected) +
                             " values, have " + std::to_string(features.values.size()));
  }
  Writer writer(path);
  writer.magic("VXF1");
  writer.u32(checked_u32(static_cast<std::size_t>(features.grid.dims.x()), "nx"));
  writer.u32(checked_u32(static_cast<std::size_t>(features.grid.dims.y()), "ny"));
  writer.u32(checked_u32(static_cast<std::size_t>(features.grid.dims.z()), "nz"));
  writer.u32(checked_u32(static_cast<std::size_t>(features.channels), "channels"));
  writer.f32_array(features.values);
  writer.finish();
}

VoxelFeatureData read_voxel_features(const std::filesystem::path& path) {
  Reader reader(path, slurp(path));
  reader.expect_magic("VXF1");
  VoxelFeatureData data;
  const std::uint32_t nx = reader.read_u32();
  const std::uint32_t ny = reader.read_u32();
  const std::uint32_t nz = reader.read_u32();
  const std::uint32_t channels = reader.read_u32();
  if (nx == 0 || ny == 0 || nz == 0 || channels == 0) {
    throw std::runtime_error(path.string() + ": zero dimension in header");
  }
  data.dims = Eigen::Vector3i(static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz));
  data.channels = static_cast<int>(channels);
  reader.read_f32_into(data.values,
                       static_cast<std::size_t>(nx) * ny * nz * channels);
  reader.expect_end();
  return data;
}

void write_occupancy(const std::filesystem::path& path, const OccupancyLabelGrid& grid) {
  if (grid.labels.size() != grid.grid.voxel_count()) {
    throw std::runtime_error("occupancy grid: label count does not match the grid");
  }
  Writer writer(path);
  writer.magic("OCC1");
  writer.u32(checked_u32(static_cast<std::size_t>(grid.grid.dims.x()), "nx"));
  writer.u32(checked_u32(static_cast<std::size_t>(grid.grid.dims.y()), "ny"));
  writer.u32(checked_u32(static_cast<std::size_t>(grid.grid.dims.z()), "nz"));
  for (int axis = 0; axis < 3; ++axis) {
    writer.f32(static_cast<float>(grid.grid.voxel_size[axis]));
  }
  for (int axis = 0; axis < 3; ++axis) {
    writer.f32(static_cast<float>(grid.grid.origin[axis]));
  }
  writer.bytes(grid.labels);
  writer.finish();
}

OccupancyLabelGrid read_occupancy(const std::filesystem::path& path) {
  Reader reader(path, slurp(path));
  reader.expect_magic("OCC1");
  const std::uint32_t nx = reader.read_u32();
  const std::uint32_t ny = reader.read_u32();
  const std::uint32_t nz = reader.read_u32();
  if (nx == 0 || ny == 0 || nz == 0) {
    throw std::runtime_error(path.string() + ": zero dimension in header");
  }
  Eigen::Vector3d voxel_size;
  for (int axis = 0; axis < 3; ++axis) voxel_size[axis] = static_cast<double>(reader.read_f32());
  Eigen::Vector3d origin;
  for (int axis = 0; axis < 3; ++axis) origin[axis] = static_cast<double>(reader.read_f32());
  OccupancyLabelGrid grid{
      VoxelGrid(origin, voxel_size,
                Eigen::Vector3i(static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz))),
      {}};
  reader.read_bytes(grid.labels, static_cast<std::size_t>(nx) * ny * nz);
  reader.expect_end();
  for (std::size_t i = 0; i < grid.labels.size(); ++i) {
    const std::uint8_t label = grid.labels[i];
    if (label != static_cast<std::uint8_t>(OccupancyLabel::kFree) &&
        label != static_cast<std::uint8_t>(OccupancyLabel::kOccupied) &&
        label != static_cast<std::uint8_t>(OccupancyLabel::kUnknown)) {
      throw std::runtime_error(path.string() + ": invalid label value " + std::to_string(label) +
                               " at voxel " + std::to_string(i));
    }
  }
  return grid;
}

std::string format_double(double value) {
  char buffer[64];
  const std::to_chars_result result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (result.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buffer, result.ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error(path.string() + ": read failed");
  return text;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  return slurp(path);
}

void write_binary_file(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace voxelray
