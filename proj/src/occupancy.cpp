// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelray/occupancy.hpp"

#include "voxelray/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace voxelray {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Amanatides & Woo style grid walk over the open parametric segment
// origin + t * (endpoint - origin), t in (0, 1), clipped to the grid box.
//
// The walk keeps, per axis, the parameter tMax at which the ray crosses the
// next voxel face and the parameter width tDelta of one voxel. The current
// voxel is emitted only when the segment spends positive parameter length in
// it (t_exit > t_entry), which drops face, edge, and corner grazes. The
// endpoint's voxel terminates the walk without being emitted. Ties between
// axes (corner crossings) advance the smallest axis index first; the grazed
// neighbors that choice skips have zero chord and would not be emitted
// anyway.
//
// Boundary conventions match VoxelGrid::voxel_of: faces belong to the voxel
// with the larger index, so a ray starting exactly on a shared face starts
// in that voxel, and the grid box itself is half-open.
template <typename Visitor>
void walk_segment(const VoxelGrid& grid, const Eigen::Vector3d& origin,
                  const Eigen::Vector3d& endpoint, Visitor&& visit) {
  const Eigen::Vector3d direction = endpoint - origin;
  const Eigen::Vector3d grid_min = grid.min_corner();
  const Eigen::Vector3d grid_max = grid.max_corner();

  // Clip [0, 1] against the grid slab on each axis.
  double t_entry = 0.0;
  double t_stop = 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    if (direction[axis] == 0.0) {
      if (origin[axis] < grid_min[axis] || origin[axis] >= grid_max[axis]) return;
      continue;
    }
    double t_near = (grid_min[axis] - origin[axis]) / direction[axis];
    double t_far = (grid_max[axis] - origin[axis]) / direction[axis];
    if (t_near > t_far) std::swap(t_near, t_far);
    t_entry = std::max(t_entry, t_near);
    t_stop = std::min(t_stop, t_far);
  }
  if (t_entry >= t_stop) return;

  const Eigen::Vector3d entry_point = origin + t_entry * direction;
  Eigen::Vector3i voxel;
  Eigen::Vector3i step;
  Eigen::Vector3d t_max;
  Eigen::Vector3d t_delta;
  for (int axis = 0; axis < 3; ++axis) {
    const double offset = (entry_point[axis] - grid_min[axis]) / grid.voxel_size[axis];
    voxel[axis] =
        std::clamp(static_cast<int>(std::floor(offset)), 0, grid.dims[axis] - 1);
    if (direction[axis] > 0.0) {
      step[axis] = 1;
      const double next_face = grid_min[axis] + (voxel[axis] + 1) * grid.voxel_size[axis];
      t_max[axis] = (next_face - origin[axis]) / direction[axis];
      t_delta[axis] = grid.voxel_size[axis] / direction[axis];
    } else if (direction[axis] < 0.0) {
      step[axis] = -1;
      const double next_face = grid_min[axis] + voxel[axis] * grid.voxel_size[axis];
      t_max[axis] = (next_face - origin[axis]) / direction[axis];
      t_delta[axis] = grid.voxel_size[axis] / -direction[axis];
    } else {
      step[axis] = 0;
      t_max[axis] = kInfinity;
      t_delta[axis] = kInfinity;
    }
  }

  const std::optional<Eigen::Vector3i> endpoint_voxel = grid.voxel_of(endpoint);

  while (true) {
    if (endpoint_voxel && voxel == *endpoint_voxel) return;

    int exit_axis = 0;
    if (t_max[1] < t_max[exit_axis]) exit_axis = 1;
    if (t_max[2] < t_max[exit_axis]) exit_axis = 2;
    const double t_exit = std::min(t_max[exit_axis], t_stop);
    if (t_exit > t_entry) {
      visit(grid.linear_index(voxel.x(), voxel.y(), voxel.z()));
    }
    if (t_max[exit_axis] >= t_stop) return;

    voxel[exit_axis] += step[exit_axis];
    if (voxel[exit_axis] < 0 || voxel[exit_axis] >= grid.dims[exit_axis]) return;
    t_entry = t_max[exit_axis];
    t_max[exit_axis] += t_delta[exit_axis];
  }
}

}  // namespace

std::size_t OccupancyLabelGrid::count(OccupancyLabel label) const {
  return static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), static_cast<std::uint8_t>(label)));
}

std::vector<std::size_t> traverse_ray(const VoxelGrid& grid, const SensorOrigin& origin,
                                      const Eigen::Vector3d& endpoint) {
  if (!origin.position.allFinite() || !endpoint.allFinite()) {
    throw std::invalid_argument("traverse_ray: non-finite ray");
  }
  if (origin.position == endpoint) {
    throw std::invalid_argument("traverse_ray: zero-length ray");
  }
  std::vector<std::size_t> indices;
  walk_segment(grid, origin.position, endpoint,
               [&indices](std::size_t index) { indices.push_back(index); });
  return indices;
}

OccupancyLabelGrid label_occupancy(const VoxelGrid& grid, const PointCloud& cloud,
                                   const SensorOrigin& origin, int threads) {
  cloud.validate();
  if (!origin.position.allFinite()) {
    throw std::invalid_argument("label_occupancy: non-finite sensor origin");
  }

  const std::size_t count = grid.voxel_count();
  OccupancyLabelGrid result{grid, std::vector<std::uint8_t>(
                                      count, static_cast<std::uint8_t>(OccupancyLabel::kUnknown))};

  // Pass 1: free space. Rays from different points may touch the same voxel,
  // so each chunk fills its own bitmask and the masks are OR-merged; the
  // merged set is a union and independent of the partition.
  const std::size_t words = (count + 63) / 64;
  std::vector<std::vector<std::uint64_t>> masks;
  const int chunk_count =
      std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::size_t>(
                                             cloud.points.size(), 1 << 16))));
  masks.assign(static_cast<std::size_t>(chunk_count), std::vector<std::uint64_t>(words, 0));
  parallel_chunks(cloud.points.size(), chunk_count,
                  [&](int chunk, std::size_t begin, std::size_t end) {
                    std::vector<std::uint64_t>& mask = masks[static_cast<std::size_t>(chunk)];
                    for (std::size_t p = begin; p < end; ++p) {
                      if (cloud.points[p] == origin.position) continue;
                      walk_segment(grid, origin.position, cloud.points[p],
                                   [&mask](std::size_t index) {
                                     mask[index >> 6] |= std::uint64_t{1} << (index & 63);
                                   });
                    }
                  });
  std::vector<std::uint64_t> traversed(words, 0);
  for (const std::vector<std::uint64_t>& mask : masks) {
    for (std::size_t w = 0; w < words; ++w) traversed[w] |= mask[w];
  }
  for (std::size_t index = 0; index < count; ++index) {
    if ((traversed[index >> 6] >> (index & 63)) & 1) {
      result.labels[index] = static_cast<std::uint8_t>(OccupancyLabel::kFree);
    }
  }

  // Pass 2: returns override visibility.
  for (const Eigen::Vector3d& point : cloud.points) {
    if (const std::optional<Eigen::Vector3i> ijk = grid.voxel_of(point)) {
      result.labels[grid.linear_index(ijk->x(), ijk->y(), ijk->z())] =
          static_cast<std::uint8_t>(OccupancyLabel::kOccupied);
    }
  }
  return result;
}

OccupancyLabelGrid label_occupancy_naive(const VoxelGrid& grid, const PointCloud& cloud) {
  cloud.validate();
  OccupancyLabelGrid result{
      grid, std::vector<std::uint8_t>(grid.voxel_count(),
                                      static_cast<std::uint8_t>(OccupancyLabel::kFree))};
  for (const Eigen::Vector3d& point : cloud.points) {
    if (const std::optional<Eigen::Vector3i> ijk = grid.voxel_of(point)) {
      result.labels[grid.linear_index(ijk->x(), ijk->y(), ijk->z())] =
          static_cast<std::uint8_t>(OccupancyLabel::kOccupied);
    }
  }
  return result;
}

}  // namespace voxelray
