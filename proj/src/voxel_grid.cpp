// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelray/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace voxelray {

VoxelGrid::VoxelGrid(const Eigen::Vector3d& origin_, const Eigen::Vector3d& voxel_size_,
                     const Eigen::Vector3i& dims_)
    : origin(origin_), voxel_size(voxel_size_), dims(dims_) {
  if (!origin.allFinite() || !voxel_size.allFinite()) {
    throw std::invalid_argument("VoxelGrid: non-finite origin or voxel size");
  }
  if (!(voxel_size.minCoeff() > 0.0)) {
    throw std::invalid_argument("VoxelGrid: voxel size must be positive on every axis");
  }
  if (dims.minCoeff() < 1) {
    throw std::invalid_argument("VoxelGrid: dimensions must be at least 1");
  }
}

std::size_t VoxelGrid::voxel_count() const {
  return static_cast<std::size_t>(dims.x()) * static_cast<std::size_t>(dims.y()) *
         static_cast<std::size_t>(dims.z());
}

std::size_t VoxelGrid::linear_index(int i, int j, int k) const {
  return (static_cast<std::size_t>(k) * dims.y() + static_cast<std::size_t>(j)) * dims.x() +
         static_cast<std::size_t>(i);
}

Eigen::Vector3i VoxelGrid::index_of(std::size_t linear) const {
  if (linear >= voxel_count()) throw std::out_of_range("VoxelGrid: linear index out of range");
  const std::size_t nx = static_cast<std::size_t>(dims.x());
  const std::size_t ny = static_cast<std::size_t>(dims.y());
  const int i = static_cast<int>(linear % nx);
  const int j = static_cast<int>((linear / nx) % ny);
  const int k = static_cast<int>(linear / (nx * ny));
  return {i, j, k};
}

bool VoxelGrid::contains(const Eigen::Vector3i& ijk) const {
  return ijk.x() >= 0 && ijk.x() < dims.x() && ijk.y() >= 0 && ijk.y() < dims.y() &&
         ijk.z() >= 0 && ijk.z() < dims.z();
}

Eigen::Vector3d VoxelGrid::center(int i, int j, int k) const {
  return origin + voxel_size.cwiseProduct(
                      Eigen::Vector3d(static_cast<double>(i) + 0.5, static_cast<double>(j) + 0.5,
                                      static_cast<double>(k) + 0.5));
}

Eigen::Vector3d VoxelGrid::center(std::size_t linear) const {
  const Eigen::Vector3i ijk = index_of(linear);
  return center(ijk.x(), ijk.y(), ijk.z());
}

Eigen::Vector3d VoxelGrid::max_corner() const {
  return origin + voxel_size.cwiseProduct(dims.cast<double>());
}

std::optional<Eigen::Vector3i> VoxelGrid::voxel_of(const Eigen::Vector3d& p) const {
  Eigen::Vector3i ijk;
  for (int axis = 0; axis < 3; ++axis) {
    // floor of the scaled offset realizes the half-open convention: a point
    // exactly on a face gets the larger index.
    const double t = std::floor((p[axis] - origin[axis]) / voxel_size[axis]);
    if (t < 0.0 || t >= static_cast<double>(dims[axis])) return std::nullopt;
    ijk[axis] = static_cast<int>(t);
  }
  return ijk;
}

std::vector<Eigen::Vector3d> voxel_centers(const VoxelGrid& grid) {
  std::vector<Eigen::Vector3d> centers;
  centers.reserve(grid.voxel_count());
  for (int k = 0; k < grid.dims.z(); ++k) {
    for (int j = 0; j < grid.dims.y(); ++j) {
      for (int i = 0; i < grid.dims.x(); ++i) {
        centers.push_back(grid.center(i, j, k));
      }
    }
  }
  return centers;
}

FeatureMap::FeatureMap(int height, int width, int channels)
    : height_(height), width_(width), channels_(channels) {
  if (height_ < 1 || width_ < 1 || channels_ < 1) {
    throw std::invalid_argument("FeatureMap: dimensions must be at least 1");
  }
  values_.assign(static_cast<std::size_t>(height_) * width_ * channels_, 0.0);
}

FeatureMap::FeatureMap(int height, int width, int channels, std::vector<double> values)
    : FeatureMap(height, width, channels) {
  if (values.size() != values_.size()) {
    throw std::invalid_argument("FeatureMap: expected " + std::to_string(values_.size()) +
                                " values, got " + std::to_string(values.size()));
  }
  values_ = std::move(values);
}

std::span<const double> FeatureMap::pixel(int v, int u) const {
  if (v < 0 || v >= height_ || u < 0 || u >= width_) {
    throw std::out_of_range("FeatureMap: pixel out of range");
  }
  return {values_.data() + offset(v, u, 0), static_cast<std::size_t>(channels_)};
}

bool bilinear_sample_into(const FeatureMap& map, double u, double v, std::span<double> out) {
  if (out.size() != static_cast<std::size_t>(map.channels())) {
    throw std::invalid_argument("bilinear_sample: output span has wrong length");
  }
  std::fill(out.begin(), out.end(), 0.0);
  if (!(u >= 0.0) || !(v >= 0.0) || !(u <= static_cast<double>(map.width() - 1)) ||
      !(v <= static_cast<double>(map.height() - 1))) {
    return false;
  }
  const int u0 = std::min(static_cast<int>(u), map.width() - 2 >= 0 ? map.width() - 2 : 0);
  const int v0 = std::min(static_cast<int>(v), map.height() - 2 >= 0 ? map.height() - 2 : 0);
  const int u1 = std::min(u0 + 1, map.width() - 1);
  const int v1 = std::min(v0 + 1, map.height() - 1);
  const double fu = u - static_cast<double>(u0);
  const double fv = v - static_cast<double>(v0);

  const std::span<const double> p00 = map.pixel(v0, u0);
  const std::span<const double> p01 = map.pixel(v0, u1);
  const std::span<const double> p10 = map.pixel(v1, u0);
  const std::span<const double> p11 = map.pixel(v1, u1);
  const double w00 = (1.0 - fu) * (1.0 - fv);
  const double w01 = fu * (1.0 - fv);
  const double w10 = (1.0 - fu) * fv;
  const double w11 = fu * fv;
  for (int c = 0; c < map.channels(); ++c) {
    out[static_cast<std::size_t>(c)] =
        w00 * p00[c] + w01 * p01[c] + w10 * p10[c] + w11 * p11[c];
  }
  return true;
}

SampleResult bilinear_sample(const FeatureMap& map, double u, double v) {
  SampleResult result;
  result.values.assign(static_cast<std::size_t>(map.channels()), 0.0);
  result.valid = bilinear_sample_into(map, u, v, result.values);
  return result;
}

}  // namespace voxelray
