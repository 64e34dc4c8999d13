// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "voxelray/attention.hpp"
#include "voxelray/occupancy.hpp"
#include "voxelray/voxel_grid.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace voxelray {

// Binary containers. All integers are little-endian u32, all floats
// little-endian f32, laid out exactly as documented; readers reject bad
// magic bytes and truncated payloads with std::runtime_error.
//
//   FMP1: "FMP1", height, width, channels, then height*width*channels floats
//         ordered (v, u, c), c fastest.
//   VXF1: "VXF1", nx, ny, nz, channels, then voxel-major floats with
//         channels contiguous, voxels in linear-index order (x fastest).
//   OCC1: "OCC1", nx, ny, nz, voxel_size xyz (f32), origin xyz (f32), then
//         nx*ny*nz label bytes in linear-index order.

void write_feature_map(const std::filesystem::path& path, const FeatureMap& map);
FeatureMap read_feature_map(const std::filesystem::path& path);

void write_voxel_features(const std::filesystem::path& path, const VoxelFeatures& features);

struct VoxelFeatureData {
  Eigen::Vector3i dims = Eigen::Vector3i::Zero();
  int channels = 0;
  std::vector<double> values;
};
VoxelFeatureData read_voxel_features(const std::filesystem::path& path);

void write_occupancy(const std::filesystem::path& path, const OccupancyLabelGrid& grid);
OccupancyLabelGrid read_occupancy(const std::filesystem::path& path);

// Shortest decimal form that parses back to the identical double. Used for
// every float the tools print, so text output is reproducible across runs
// and locales.
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& bytes);

}  // namespace voxelray
