// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelray/occupancy.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>
#include <stdexcept>
#include <vector>

using voxelray::OccupancyLabel;
using voxelray::OccupancyLabelGrid;
using voxelray::PointCloud;
using voxelray::SensorOrigin;
using voxelray::traverse_ray;
using voxelray::VoxelGrid;

namespace {

constexpr std::uint8_t kFree = static_cast<std::uint8_t>(OccupancyLabel::kFree);
constexpr std::uint8_t kOccupied = static_cast<std::uint8_t>(OccupancyLabel::kOccupied);
constexpr std::uint8_t kUnknown = static_cast<std::uint8_t>(OccupancyLabel::kUnknown);

// Per-voxel reference labeler: a voxel is OCCUPIED when it owns a return,
// FREE when some ray crosses its interior short of that ray's own return
// voxel, UNKNOWN otherwise. Quadratic and stateless on purpose.
std::vector<std::uint8_t> label_by_bruteforce(const VoxelGrid& grid, const PointCloud& cloud,
                                              const Eigen::Vector3d& origin) {
  std::vector<std::uint8_t> labels(grid.voxel_count(), kUnknown);
  for (const Eigen::Vector3d& point : cloud.points) {
    if (const auto owner = grid.voxel_of(point)) {
      labels[grid.linear_index(owner->x(), owner->y(), owner->z())] = kOccupied;
    }
  }
  for (std::size_t linear = 0; linear < grid.voxel_count(); ++linear) {
    if (labels[linear] == kOccupied) continue;
    const Eigen::Vector3i ijk = grid.index_of(linear);
    for (const Eigen::Vector3d& point : cloud.points) {
      if (point == origin) continue;  // a coincident return casts no ray
      const auto endpoint_voxel = grid.voxel_of(point);
      if (endpoint_voxel && *endpoint_voxel == ijk) continue;
      if (vtest::clip_segment_to_voxel(grid, ijk, origin, point - origin).hit) {
        labels[linear] = kFree;
        break;
      }
    }
  }
  return labels;
}

}  // namespace

TEST_CASE("traversal walks an axis-aligned ray, excluding the endpoint voxel") {
  const VoxelGrid grid(Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), Eigen::Vector3i(4, 4, 4));
  const auto visited =
      traverse_ray(grid, SensorOrigin{Eigen::Vector3d(0.5, 0.5, 0.5)}, Eigen::Vector3d(3.5, 0.5, 0.5));
  CHECK(visited == std::vector<std::size_t>{grid.linear_index(0, 0, 0), grid.linear_index(1, 0, 0),
                                            grid.linear_index(2, 0, 0)});
}

TEST_CASE("traversal reports corner crossings without the grazed voxels") {
  // The main diagonal only touches (1,0,0), (0,1,0), ... at a single corner
  // point; those never gain interior chord and stay unreported.
  const VoxelGrid grid(Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), Eigen::Vector3i(2, 2, 2));
  const auto visited =
      traverse_ray(grid, SensorOrigin{Eigen::Vector3d::Zero()}, Eigen::Vector3d(2.0, 2.0, 2.0));
  CHECK(visited == std::vector<std::size_t>{grid.linear_index(0, 0, 0), grid.linear_index(1, 1, 1)});
}

TEST_CASE("traversal endpoint ownership is half-open") {
  const VoxelGrid grid(Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), Eigen::Vector3i(4, 1, 1));
  // Endpoint exactly on the face between voxels 1 and 2: voxel 2 owns it
  // and is excluded, voxel 1 keeps its chord.
  const auto visited =
      traverse_ray(grid, SensorOrigin{Eigen::Vector3d(0.5, 0.5, 0.5)}, Eigen::Vector3d(2.0, 0.5, 0.5));
  CHECK(visited == std::vector<std::size_t>{0, 1});
}

TEST_CASE("traversal within one voxel yields nothing") {
  const VoxelGrid grid(Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), Eigen::Vector3i(4, 4, 4));
  const auto visited = traverse_ray(grid, SensorOrigin{Eigen::Vector3d(0.2, 0.2, 0.2)},
                                    Eigen::Vector3d(0.8, 0.2, 0.2));
  CHECK(visited.empty());
}

TEST_CASE("traversal of a segment outside the grid yields nothing") {
  const VoxelGrid grid(Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), Eigen::Vector3i(4, 4, 4));
  const auto visited = traverse_ray(grid, SensorOrigin{Eigen::Vector3d(10.0, 10.0, 10.0)},
                                    Eigen::Vector3d(12.0, 10.0, 10.0));
  CHECK(visited.empty());
}

TEST_CASE("traversal rejects degenerate rays") {
  const VoxelGrid grid(Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), Eigen::Vector3i(4, 4, 4));
  const Eigen::Vector3d p(0.5, 0.5, 0.5);
  CHECK_THROWS_AS(traverse_ray(grid, SensorOrigin{p}, p), std::invalid_argument);
  CHECK_THROWS_AS(traverse_ray(grid, SensorOrigin{p}, Eigen::Vector3d(std::nan(""), 1.0, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("traversal agrees with per-voxel slab clipping on random rays") {
  vtest::SplitMix64 rng(131);
  for (int round = 0; round < 8; ++round) {
    const Eigen::Vector3d origin(rng.uniform(-3.0, 0.0), rng.uniform(-3.0, 0.0),
                                 rng.uniform(-2.0, 0.0));
    const Eigen::Vector3d size(rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0),
                               rng.uniform(0.2, 1.0));
    const VoxelGrid grid(origin, size, Eigen::Vector3i(rng.uniform_int(3, 9),
                                                       rng.uniform_int(3, 9),
                                                       rng.uniform_int(2, 6)));
    const Eigen::Vector3d lo = grid.min_corner();
    const Eigen::Vector3d hi = grid.max_corner();
    for (int ray = 0; ray < 60; ++ray) {
      Eigen::Vector3d a, b;
      for (int axis = 0; axis < 3; ++axis) {
        // Sample slightly beyond the grid and snap some coordinates onto
        // voxel boundaries to stress tie handling.
        a[axis] = rng.uniform(lo[axis] - 0.5, hi[axis] + 0.5);
        b[axis] = rng.uniform(lo[axis] - 0.5, hi[axis] + 0.5);
        if (rng.uniform() < 0.25) {
          a[axis] = lo[axis] + std::floor((a[axis] - lo[axis]) / size[axis]) * size[axis];
        }
        if (rng.uniform() < 0.25) {
          b[axis] = lo[axis] + std::floor((b[axis] - lo[axis]) / size[axis]) * size[axis];
        }
      }
      if (a == b) continue;
      const auto visited = traverse_ray(grid, SensorOrigin{a}, b);

      // No duplicates, all in bounds.
      std::set<std::size_t> unique(visited.begin(), visited.end());
      CHECK(unique.size() == visited.size());
      for (const std::size_t index : visited) CHECK(index < grid.voxel_count());

      // Entry parameters increase along the walk. Voxels without a strict
      // chord are corner or face grazes; they are vetted below.
      double previous_entry = -1.0;
      for (const std::size_t index : visited) {
        const auto clip = vtest::clip_segment_to_voxel(grid, grid.index_of(index), a, b - a);
        if (!clip.hit) continue;
        CHECK(clip.t0 >= previous_entry);
        previous_entry = clip.t0;
      }

      // Same set as the exhaustive reference, except that contacts exactly
      // on a voxel face or corner may round to either side. Any walked
      // voxel the reference lacks must be such a graze, and any reference
      // voxel the walk lacks must have a sub-epsilon chord.
      std::vector<std::size_t> sorted(visited);
      std::sort(sorted.begin(), sorted.end());
      const std::vector<std::size_t> reference = vtest::slab_ray_voxels(grid, a, b);
      std::vector<std::size_t> only_walked, only_reference;
      std::set_difference(sorted.begin(), sorted.end(), reference.begin(), reference.end(),
                          std::back_inserter(only_walked));
      std::set_difference(reference.begin(), reference.end(), sorted.begin(), sorted.end(),
                          std::back_inserter(only_reference));
      for (const std::size_t index : only_walked) {
        const auto clip = vtest::clip_segment_to_voxel(grid, grid.index_of(index), a, b - a);
        CHECK(!clip.hit);  // a strict chord would have put it in the reference
        CHECK(vtest::segment_grazes_voxel(grid, grid.index_of(index), a, b - a, 1e-9));
      }
      for (const std::size_t index : only_reference) {
        const auto clip = vtest::clip_segment_to_voxel(grid, grid.index_of(index), a, b - a);
        REQUIRE(clip.hit);
        CHECK(clip.t1 - clip.t0 <= 1e-9);
      }
    }
  }
}

TEST_CASE("behind an occluder the labeler keeps voxels unknown, the naive one frees them") {
  const VoxelGrid grid(Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), Eigen::Vector3i(6, 1, 1));
  PointCloud cloud;
  cloud.points = {Eigen::Vector3d(2.5, 0.5, 0.5)};
  const SensorOrigin sensor{Eigen::Vector3d(0.5, 0.5, 0.5)};

  const OccupancyLabelGrid labeled = voxelray::label_occupancy(grid, cloud, sensor);
  CHECK(labeled.labels == std::vector<std::uint8_t>{kFree, kFree, kOccupied, kUnknown, kUnknown,
                                                    kUnknown});
  CHECK(labeled.count(OccupancyLabel::kFree) == 2);
  CHECK(labeled.count(OccupancyLabel::kOccupied) == 1);
  CHECK(labeled.count(OccupancyLabel::kUnknown) == 3);

  const OccupancyLabelGrid naive = voxelray::label_occupancy_naive(grid, cloud);
  CHECK(naive.labels == std::vector<std::uint8_t>{kFree, kFree, kOccupied, kFree, kFree, kFree});

  // Identical occupied sets; the disagreement is exactly the shadowed tail.
  for (std::size_t i = 0; i < grid.voxel_count(); ++i) {
    CHECK((labeled.labels[i] == kOccupied) == (naive.labels[i] == kOccupied));
  }
}

TEST_CASE("labels match the brute-force reference on random scenes") {
  vtest::SplitMix64 rng(137);
  for (int scene = 0; scene < 3; ++scene) {
    const VoxelGrid grid(Eigen::Vector3d(-3.0, -3.0, -1.5), Eigen::Vector3d(0.5, 0.5, 0.5),
                         Eigen::Vector3i(12, 12, 6));
    const Eigen::Vector3d sensor(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5),
                                 rng.uniform(-1.0, 1.0));
    PointCloud cloud;
    for (int i = 0; i < 2000; ++i) {
      // Mostly in or near the grid, occasionally far outside, occasionally
      // snapped onto voxel faces.
      Eigen::Vector3d p(rng.uniform(-4.5, 4.5), rng.uniform(-4.5, 4.5), rng.uniform(-2.5, 2.5));
      if (rng.uniform() < 0.05) p *= 10.0;
      if (rng.uniform() < 0.1) p.x() = std::round(p.x() * 2.0) / 2.0;
      cloud.points.push_back(p);
    }
    cloud.points.push_back(sensor);  // coincident return: occupied, no ray

    const OccupancyLabelGrid labeled = voxelray::label_occupancy(grid, cloud, SensorOrigin{sensor});
    CHECK(labeled.labels == label_by_bruteforce(grid, cloud, sensor));
  }
}

TEST_CASE("a return in a traversed voxel stays occupied") {
  const VoxelGrid grid(Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), Eigen::Vector3i(5, 1, 1));
  PointCloud cloud;
  // The far return's ray crosses the near return's voxel.
  cloud.points = {Eigen::Vector3d(1.5, 0.5, 0.5), Eigen::Vector3d(4.5, 0.5, 0.5)};
  const OccupancyLabelGrid labeled =
      voxelray::label_occupancy(grid, cloud, SensorOrigin{Eigen::Vector3d(0.5, 0.5, 0.5)});
  CHECK(labeled.labels == std::vector<std::uint8_t>{kFree, kOccupied, kFree, kFree, kOccupied});
}

TEST_CASE("an empty cloud leaves everything unknown, or free for the naive labeler") {
  const VoxelGrid grid(Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), Eigen::Vector3i(3, 3, 3));
  const PointCloud cloud;
  const OccupancyLabelGrid labeled =
      voxelray::label_occupancy(grid, cloud, SensorOrigin{Eigen::Vector3d(0.5, 0.5, 0.5)});
  CHECK(labeled.count(OccupancyLabel::kUnknown) == grid.voxel_count());
  const OccupancyLabelGrid naive = voxelray::label_occupancy_naive(grid, cloud);
  CHECK(naive.count(OccupancyLabel::kFree) == grid.voxel_count());
}

TEST_CASE("a return coincident with the sensor marks only its voxel") {
  const VoxelGrid grid(Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), Eigen::Vector3i(3, 3, 1));
  const Eigen::Vector3d sensor(1.5, 1.5, 0.5);
  PointCloud cloud;
  cloud.points = {sensor};
  const OccupancyLabelGrid labeled = voxelray::label_occupancy(grid, cloud, SensorOrigin{sensor});
  CHECK(labeled.count(OccupancyLabel::kOccupied) == 1);
  CHECK(labeled.count(OccupancyLabel::kUnknown) == grid.voxel_count() - 1);
  CHECK(labeled.labels[grid.linear_index(1, 1, 0)] == kOccupied);
}

TEST_CASE("a ray to a return beyond the grid still frees the crossed voxels") {
  const VoxelGrid grid(Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), Eigen::Vector3i(4, 1, 1));
  PointCloud cloud;
  cloud.points = {Eigen::Vector3d(9.0, 0.5, 0.5)};  // return far past the grid
  const OccupancyLabelGrid labeled =
      voxelray::label_occupancy(grid, cloud, SensorOrigin{Eigen::Vector3d(0.5, 0.5, 0.5)});
  CHECK(labeled.labels == std::vector<std::uint8_t>{kFree, kFree, kFree, kFree});
}

TEST_CASE("occupancy labels are identical for any thread count") {
  vtest::SplitMix64 rng(139);
  const VoxelGrid grid(Eigen::Vector3d(-4.0, -4.0, -1.0), Eigen::Vector3d(0.25, 0.25, 0.25),
                       Eigen::Vector3i(32, 32, 8));
  PointCloud cloud;
  for (int i = 0; i < 4000; ++i) {
    cloud.points.emplace_back(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0),
                              rng.uniform(-1.5, 1.5));
  }
  const SensorOrigin sensor{Eigen::Vector3d(0.0, 0.0, 0.0)};
  const OccupancyLabelGrid base = voxelray::label_occupancy(grid, cloud, sensor, 1);
  for (const int threads : {2, 3, 8}) {
    const OccupancyLabelGrid other = voxelray::label_occupancy(grid, cloud, sensor, threads);
    CHECK(other.labels == base.labels);
  }
}
