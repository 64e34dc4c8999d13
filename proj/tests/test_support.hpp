// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures and reference implementations for the test binaries. The
// reference code here recomputes library results a slower, simpler way on
// purpose: per-voxel slab clipping instead of an incremental grid walk,
// Monte-Carlo sampling instead of polygon clipping. Keep it independent of
// the implementation under test.

#pragma once

#include "voxelray/geometry.hpp"
#include "voxelray/voxel_grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifdef __unix__
#include <sys/wait.h>
#include <unistd.h>
#endif

namespace vtest {

// splitmix64: tiny seedable generator with a portable, pinned sequence.
// <random> engines would work, but their distributions are not pinned
// across standard library implementations.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

// ---- camera fixtures ----

// Camera looking along ego +x: camera x = -ego y, camera y = -ego z,
// camera z (optical axis) = ego x.
inline Eigen::Matrix3d forward_mount() {
  Eigen::Matrix3d r;
  r << 0.0, -1.0, 0.0,
       0.0, 0.0, -1.0,
       1.0, 0.0, 0.0;
  return r;
}

inline Eigen::Matrix4d make_extrinsic(const Eigen::Matrix3d& rotation,
                                      const Eigen::Vector3d& translation) {
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  t.topLeftCorner<3, 3>() = rotation;
  t.topRightCorner<3, 1>() = translation;
  return t;
}

inline voxelray::CameraRig::Intrinsic simple_intrinsic(double focal, double cu, double cv) {
  voxelray::CameraRig::Intrinsic p = voxelray::CameraRig::Intrinsic::Zero();
  p(0, 0) = focal;
  p(1, 1) = focal;
  p(0, 2) = cu;
  p(1, 2) = cv;
  p(2, 2) = 1.0;
  return p;
}

inline Eigen::Matrix3d rotation_x(double a) {
  Eigen::Matrix3d r;
  r << 1, 0, 0,
       0, std::cos(a), -std::sin(a),
       0, std::sin(a), std::cos(a);
  return r;
}

inline Eigen::Matrix3d rotation_z(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), -std::sin(a), 0,
       std::sin(a), std::cos(a), 0,
       0, 0, 1;
  return r;
}

// Random rig with a bounded camera tilt, so the optical axis stays far from
// the ego up-axis and the orientation delta is well defined. `out_delta`
// receives the yaw the mount was built with.
inline voxelray::CameraRig random_rig(SplitMix64& rng, double* out_delta = nullptr) {
  const double delta = rng.uniform(-voxelray::kPi, voxelray::kPi);
  const double tilt = rng.uniform(-0.3, 0.3);
  const double roll = rng.uniform(-0.3, 0.3);
  // Pre-rotations act in camera axes (tilt about camera x, roll about the
  // optical axis) and leave the optical axis's ground-plane bearing alone;
  // the trailing Rz(-delta) turns that bearing to `delta`.
  const Eigen::Matrix3d rotation =
      rotation_z(roll) * rotation_x(tilt) * forward_mount() * rotation_z(-delta);
  const Eigen::Vector3d translation(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                                    rng.uniform(-2.0, 2.0));
  voxelray::CameraRig::Intrinsic p =
      simple_intrinsic(rng.uniform(400.0, 900.0), rng.uniform(580.0, 660.0),
                       rng.uniform(160.0, 200.0));
  p(0, 3) = rng.uniform(-50.0, 50.0);
  p(1, 3) = rng.uniform(-2.0, 2.0);
  p(2, 3) = rng.uniform(-0.05, 0.05);
  if (out_delta) *out_delta = delta;
  return voxelray::CameraRig(p, make_extrinsic(rotation, translation));
}

inline voxelray::Box3D random_box(SplitMix64& rng) {
  return voxelray::Box3D(
      Eigen::Vector3d(rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0), rng.uniform(-1.0, 1.5)),
      rng.uniform(0.5, 5.0), rng.uniform(0.5, 3.0), rng.uniform(0.5, 2.5),
      rng.uniform(-voxelray::kPi, voxelray::kPi));
}

inline voxelray::PointCloud random_cloud(SplitMix64& rng, int count) {
  voxelray::PointCloud cloud;
  cloud.points.reserve(count);
  for (int i = 0; i < count; ++i) {
    cloud.points.emplace_back(rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0),
                              rng.uniform(-2.0, 4.0));
  }
  return cloud;
}

// ---- traversal reference ----

struct SlabClip {
  double t0 = 0.0;
  double t1 = 0.0;
  bool hit = false;
};

// Clips the segment origin + t * dir, t in [0, 1], against one voxel's
// slabs. Zero-direction axes use the half-open ownership convention, so a
// segment running exactly in a face plane belongs to the upper voxel.
inline SlabClip clip_segment_to_voxel(const voxelray::VoxelGrid& grid,
                                      const Eigen::Vector3i& ijk, const Eigen::Vector3d& origin,
                                      const Eigen::Vector3d& dir) {
  SlabClip clip{0.0, 1.0, true};
  for (int a = 0; a < 3; ++a) {
    const double lo = grid.origin[a] + ijk[a] * grid.voxel_size[a];
    const double hi = lo + grid.voxel_size[a];
    if (dir[a] == 0.0) {
      // Floor division assigns exactly one owner row. Testing lo <= x < hi
      // with per-voxel corner arithmetic can claim two adjacent rows when
      // the corners round apart by an ulp.
      if (std::floor((origin[a] - grid.origin[a]) / grid.voxel_size[a]) !=
          static_cast<double>(ijk[a])) {
        return {};
      }
    } else {
      double ta = (lo - origin[a]) / dir[a];
      double tb = (hi - origin[a]) / dir[a];
      if (ta > tb) std::swap(ta, tb);
      clip.t0 = std::max(clip.t0, ta);
      clip.t1 = std::min(clip.t1, tb);
      if (!(clip.t0 < clip.t1)) return {};
    }
  }
  return clip;
}

// True when the segment passes within a whisker of the voxel box: slab
// windows are widened by eps in parameter space, zero-direction axes by a
// voxel-relative pad. Contacts on a face or corner sit exactly on the
// boundary between "crossed" and "missed", so ties there may round either
// way and both outcomes count as a graze.
inline bool segment_grazes_voxel(const voxelray::VoxelGrid& grid, const Eigen::Vector3i& ijk,
                                 const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                                 double eps) {
  double t0 = -eps;
  double t1 = 1.0 + eps;
  for (int a = 0; a < 3; ++a) {
    const double lo = grid.origin[a] + ijk[a] * grid.voxel_size[a];
    const double hi = lo + grid.voxel_size[a];
    const double pad = eps * grid.voxel_size[a];
    if (dir[a] == 0.0) {
      if (!(origin[a] >= lo - pad && origin[a] <= hi + pad)) return false;
    } else {
      double ta = (lo - origin[a]) / dir[a];
      double tb = (hi - origin[a]) / dir[a];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta - eps);
      t1 = std::min(t1, tb + eps);
      if (t0 > t1) return false;
    }
  }
  return true;
}

// Every voxel the open segment crosses with positive chord, endpoint voxel
// excluded: O(voxels) per ray, no incremental state to get wrong. Returned
// sorted by linear index (it is compared as a set).
inline std::vector<std::size_t> slab_ray_voxels(const voxelray::VoxelGrid& grid,
                                                const Eigen::Vector3d& origin,
                                                const Eigen::Vector3d& endpoint) {
  const Eigen::Vector3d dir = endpoint - origin;
  const auto endpoint_voxel = grid.voxel_of(endpoint);
  std::vector<std::size_t> out;
  for (int k = 0; k < grid.dims.z(); ++k) {
    for (int j = 0; j < grid.dims.y(); ++j) {
      for (int i = 0; i < grid.dims.x(); ++i) {
        const Eigen::Vector3i ijk(i, j, k);
        if (endpoint_voxel && *endpoint_voxel == ijk) continue;
        if (clip_segment_to_voxel(grid, ijk, origin, dir).hit) {
          out.push_back(grid.linear_index(i, j, k));
        }
      }
    }
  }
  return out;
}

// ---- rotated-overlap reference ----

inline bool point_in_footprint(const voxelray::Box3D& box, double x, double y) {
  const double dx = x - box.center.x();
  const double dy = y - box.center.y();
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double lx = c * dx + s * dy;
  const double ly = -s * dx + c * dy;
  return std::abs(lx) <= box.length * 0.5 && std::abs(ly) <= box.width * 0.5;
}

inline double monte_carlo_bev_iou(const voxelray::Box3D& a, const voxelray::Box3D& b,
                                  int samples, SplitMix64& rng) {
  const double reach_a = 0.5 * std::hypot(a.length, a.width);
  const double reach_b = 0.5 * std::hypot(b.length, b.width);
  const double min_x = std::min(a.center.x() - reach_a, b.center.x() - reach_b);
  const double max_x = std::max(a.center.x() + reach_a, b.center.x() + reach_b);
  const double min_y = std::min(a.center.y() - reach_a, b.center.y() - reach_b);
  const double max_y = std::max(a.center.y() + reach_a, b.center.y() + reach_b);
  // Same test as point_in_footprint with the trig hoisted out of the
  // sampling loop; the arithmetic per sample is unchanged.
  struct Footprint {
    double cx, cy, c, s, half_l, half_w;
    explicit Footprint(const voxelray::Box3D& box)
        : cx(box.center.x()), cy(box.center.y()), c(std::cos(box.yaw)), s(std::sin(box.yaw)),
          half_l(box.length * 0.5), half_w(box.width * 0.5) {}
    bool contains(double x, double y) const {
      const double dx = x - cx;
      const double dy = y - cy;
      return std::abs(c * dx + s * dy) <= half_l && std::abs(-s * dx + c * dy) <= half_w;
    }
  };
  const Footprint fa(a);
  const Footprint fb(b);
  long long in_union = 0;
  long long in_both = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = rng.uniform(min_x, max_x);
    const double y = rng.uniform(min_y, max_y);
    const bool in_a = fa.contains(x, y);
    const bool in_b = fb.contains(x, y);
    if (in_a || in_b) ++in_union;
    if (in_a && in_b) ++in_both;
  }
  if (in_union == 0) return 0.0;
  return static_cast<double>(in_both) / static_cast<double>(in_union);
}

// ---- process helpers ----

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static int counter = 0;
#ifdef __unix__
    const long pid = static_cast<long>(::getpid());
#else
    const long pid = 0;
#endif
    const auto base = std::filesystem::temp_directory_path();
    path = base / ("voxelray_test_" + std::to_string(pid) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string read_whole_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Runs a shell command, capturing both streams through temp files. Callers
// quote their own arguments.
inline CommandResult run_command(const std::string& command) {
  TempDir scratch;
  const std::filesystem::path out_path = scratch.path / "stdout.txt";
  const std::filesystem::path err_path = scratch.path / "stderr.txt";
  const std::string full =
      command + " > " + out_path.string() + " 2> " + err_path.string();
  const int status = std::system(full.c_str());
  CommandResult result;
#ifdef __unix__
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
  result.exit_code = status;
#endif
  result.out = read_whole_file(out_path);
  result.err = read_whole_file(err_path);
  return result;
}

}  // namespace vtest
