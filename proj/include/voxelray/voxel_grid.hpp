// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace voxelray {

// Axis-aligned voxel lattice in the ego frame. Linear indices run x-fastest:
// linear_index(i, j, k) = (k * ny + j) * nx + i.
struct VoxelGrid {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();      // min corner, m
  Eigen::Vector3d voxel_size = Eigen::Vector3d::Ones();  // m per axis, > 0
  Eigen::Vector3i dims = Eigen::Vector3i::Ones();        // nx, ny, nz, >= 1

  VoxelGrid() = default;
  VoxelGrid(const Eigen::Vector3d& origin, const Eigen::Vector3d& voxel_size,
            const Eigen::Vector3i& dims);

  std::size_t voxel_count() const;
  std::size_t linear_index(int i, int j, int k) const;
  Eigen::Vector3i index_of(std::size_t linear) const;
  bool contains(const Eigen::Vector3i& ijk) const;

  Eigen::Vector3d center(int i, int j, int k) const;
  Eigen::Vector3d center(std::size_t linear) const;
  Eigen::Vector3d min_corner() const { return origin; }
  Eigen::Vector3d max_corner() const;

  // Voxel containing p under the half-open convention [lo, hi) per axis: a
  // point exactly on a shared face belongs to the voxel with the larger
  // index. nullopt outside the grid.
  std::optional<Eigen::Vector3i> voxel_of(const Eigen::Vector3d& p) const;
};

// Centers of all voxels in linear-index order.
std::vector<Eigen::Vector3d> voxel_centers(const VoxelGrid& grid);

// Dense height x width x channels map of doubles, row-major by (v, u, c).
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int height, int width, int channels);
  FeatureMap(int height, int width, int channels, std::vector<double> values);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }

  double at(int v, int u, int c) const { return values_[offset(v, u, c)]; }
  double& at(int v, int u, int c) { return values_[offset(v, u, c)]; }
  std::span<const double> pixel(int v, int u) const;

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  std::size_t offset(int v, int u, int c) const {
    return (static_cast<std::size_t>(v) * width_ + u) * channels_ + c;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> values_;
};

struct SampleResult {
  std::vector<double> values;  // zeros when invalid
  bool valid = false;
};

// Bilinear interpolation over the four surrounding pixel centers. (u, v)
// outside [0, width-1] x [0, height-1] is invalid and yields zeros; points on
// the closed boundary interpolate from the edge pixels.
SampleResult bilinear_sample(const FeatureMap& map, double u, double v);

// Allocation-free variant; out.size() must equal map.channels(). Returns
// validity; out is zero-filled when invalid.
bool bilinear_sample_into(const FeatureMap& map, double u, double v, std::span<double> out);

}  // namespace voxelray
