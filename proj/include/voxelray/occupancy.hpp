// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "voxelray/geometry.hpp"
#include "voxelray/voxel_grid.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace voxelray {

enum class OccupancyLabel : std::uint8_t {
  kFree = 0,
  kOccupied = 1,
  kUnknown = 255,
};

struct OccupancyLabelGrid {
  VoxelGrid grid;
  std::vector<std::uint8_t> labels;  // one per voxel, linear-index order

  std::size_t count(OccupancyLabel label) const;
};

struct SensorOrigin {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // m, ego frame
};

// Voxels whose interior the open segment (origin, endpoint) passes through,
// in traversal order. The voxel containing the endpoint is excluded: the
// return hit only proves free space up to the hit, not through it. The voxel
// containing the origin is included when the segment spends nonzero length
// inside it. Voxels the segment only grazes (touches on a face, edge, or
// corner without entering the interior) are not reported. Throws
// std::invalid_argument on a zero-length ray.
std::vector<std::size_t> traverse_ray(const VoxelGrid& grid, const SensorOrigin& origin,
                                      const Eigen::Vector3d& endpoint);

// Occupancy labels from one sweep: voxels containing a return are OCCUPIED,
// voxels traversed by some ray on the way to its return are FREE, everything
// else UNKNOWN. OCCUPIED wins over FREE where both apply. Points coincident
// with the sensor origin still mark their voxel occupied but cast no ray.
// Deterministic for any thread count.
OccupancyLabelGrid label_occupancy(const VoxelGrid& grid, const PointCloud& cloud,
                                   const SensorOrigin& origin, int threads = 1);

// Baseline labeler that skips ray visibility: OCCUPIED at returns, FREE
// everywhere else. Mislabels space the sensor never saw, which is the case
// the traversal-based labeler exists to avoid; kept for comparison runs.
OccupancyLabelGrid label_occupancy_naive(const VoxelGrid& grid, const PointCloud& cloud);

}  // namespace voxelray
