// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelray/selfcheck.hpp"

#include "voxelray/attention.hpp"
#include "voxelray/config.hpp"
#include "voxelray/encoding.hpp"
#include "voxelray/eval.hpp"
#include "voxelray/formats.hpp"
#include "voxelray/geometry.hpp"
#include "voxelray/kitti_io.hpp"
#include "voxelray/occupancy.hpp"
#include "voxelray/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace voxelray {
namespace {

// Tiny deterministic generator so the suite never depends on library RNG
// implementation details.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

[[noreturn]] void fail(const std::string& message) { throw std::runtime_error(message); }

void expect(bool condition, const std::string& message) {
  if (!condition) fail(message);
}

void expect_near(double actual, double expected, double tolerance, const std::string& what) {
  if (!(std::abs(actual - expected) <= tolerance)) {
    fail(what + ": got " + format_double(actual) + ", expected " + format_double(expected) +
         " within " + format_double(tolerance));
  }
}

CameraRig::Intrinsic simple_intrinsic(double focal, double center_u, double center_v) {
  CameraRig::Intrinsic intrinsic = CameraRig::Intrinsic::Zero();
  intrinsic(0, 0) = focal;
  intrinsic(0, 2) = center_u;
  intrinsic(1, 1) = focal;
  intrinsic(1, 2) = center_v;
  intrinsic(2, 2) = 1.0;
  return intrinsic;
}

// Forward-facing mount: camera x left-to-right across the ego y axis, camera
// y down the ego z axis, optical axis along ego forward.
Eigen::Matrix3d forward_mount() {
  Eigen::Matrix3d r;
  r << 0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0;
  return r;
}

Eigen::Matrix4d make_extrinsic(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& t) {
  Eigen::Matrix4d extrinsic = Eigen::Matrix4d::Identity();
  extrinsic.topLeftCorner<3, 3>() = rotation;
  extrinsic.topRightCorner<3, 1>() = t;
  return extrinsic;
}

CameraRig demo_rig() {
  CameraRig::Intrinsic intrinsic = simple_intrinsic(720.0, 620.0, 175.0);
  intrinsic(0, 3) = 45.0;
  intrinsic(1, 3) = 0.2;
  intrinsic(2, 3) = 0.003;
  return CameraRig(intrinsic, make_extrinsic(forward_mount(), {0.06, -0.08, -0.27}));
}

// Reference for ray traversal: per-voxel slab clipping of the segment. A
// voxel counts as traversed when the clipped interval has strictly positive
// length (interior chord) and it is not the endpoint's voxel.
std::set<std::size_t> traversed_by_slabs(const VoxelGrid& grid, const Eigen::Vector3d& origin,
                                         const Eigen::Vector3d& endpoint) {
  const Eigen::Vector3d direction = endpoint - origin;
  const std::optional<Eigen::Vector3i> endpoint_voxel = grid.voxel_of(endpoint);
  std::set<std::size_t> traversed;
  for (int k = 0; k < grid.dims.z(); ++k) {
    for (int j = 0; j < grid.dims.y(); ++j) {
      for (int i = 0; i < grid.dims.x(); ++i) {
        if (endpoint_voxel && Eigen::Vector3i(i, j, k) == *endpoint_voxel) continue;
        double t0 = 0.0;
        double t1 = 1.0;
        bool outside = false;
        const Eigen::Vector3i ijk(i, j, k);
        for (int axis = 0; axis < 3 && !outside; ++axis) {
          const double lo = grid.origin[axis] + ijk[axis] * grid.voxel_size[axis];
          const double hi = lo + grid.voxel_size[axis];
          if (direction[axis] == 0.0) {
            if (origin[axis] < lo || origin[axis] >= hi) outside = true;
            continue;
          }
          double near = (lo - origin[axis]) / direction[axis];
          double far = (hi - origin[axis]) / direction[axis];
          if (near > far) std::swap(near, far);
          t0 = std::max(t0, near);
          t1 = std::min(t1, far);
        }
        if (!outside && t1 > t0) traversed.insert(grid.linear_index(i, j, k));
      }
    }
  }
  return traversed;
}

bool point_in_footprint(const Box3D& box, const Eigen::Vector2d& p) {
  const Eigen::Vector2d center(box.center.x(), box.center.y());
  const Eigen::Vector2d heading(std::cos(box.yaw), std::sin(box.yaw));
  const Eigen::Vector2d lateral(-heading.y(), heading.x());
  const Eigen::Vector2d d = p - center;
  return std::abs(d.dot(heading)) <= 0.5 * box.length && std::abs(d.dot(lateral)) <= 0.5 * box.width;
}

double monte_carlo_bev_iou(const Box3D& a, const Box3D& b, int samples, std::uint64_t seed) {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (const Box3D* box : {&a, &b}) {
    for (const Eigen::Vector2d& corner : bev_corners(*box)) {
      min_x = std::min(min_x, corner.x());
      min_y = std::min(min_y, corner.y());
      max_x = std::max(max_x, corner.x());
      max_y = std::max(max_y, corner.y());
    }
  }
  SplitMix64 rng(seed);
  std::int64_t both = 0;
  std::int64_t either = 0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::Vector2d p(rng.uniform(min_x, max_x), rng.uniform(min_y, max_y));
    const bool in_a = point_in_footprint(a, p);
    const bool in_b = point_in_footprint(b, p);
    both += in_a && in_b;
    either += in_a || in_b;
  }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

std::filesystem::path scratch_file(const char* stem) {
  return std::filesystem::temp_directory_path() /
         (std::string("voxelray_selfcheck_") + stem + ".bin");
}

struct ScratchGuard {
  std::filesystem::path path;
  ~ScratchGuard() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
};

std::string count_string(std::size_t n) { return std::to_string(n); }

}  // namespace

std::vector<CheckResult> run_selfcheck(int threads) {
  std::vector<CheckResult> results;
  const auto check = [&results](const char* name, const std::function<std::string()>& body) {
    CheckResult result;
    result.name = name;
    try {
      result.detail = body();
      result.passed = true;
    } catch (const std::exception& error) {
      result.detail = error.what();
      result.passed = false;
    }
    results.push_back(std::move(result));
  };

  const int alternate_threads = threads > 1 ? threads : 2;

  // ---- encoding ----

  check("encoder_density_peak", [] {
    const GaussianEncoder encoder(16, 0.0, 10.0, 0.8);
    const double expected = 1.0 / (std::sqrt(kPi) * 0.8);
    expect_near(encoder.density(3.0, 3.0), expected, 1e-15, "peak density");
    return "peak " + format_double(expected);
  });

  check("encoder_density_frozen", [] {
    const GaussianEncoder encoder(16, 0.0, 10.0, 1.0);
    expect_near(encoder.density(1.0, 0.0), 0.20755374871029736, 1e-12, "density at unit offset");
    return "density(1, 0) = " + format_double(encoder.density(1.0, 0.0));
  });

  check("encoder_unit_mass", [] {
    const GaussianEncoder encoder(201, -10.0, 10.0, 1.0);
    double mass = 0.0;
    for (int i = 0; i < encoder.size(); ++i) {
      mass += encoder.density(encoder.sample_point(i), 0.0) * encoder.delta_x();
    }
    expect_near(mass, 1.0, 1e-9, "density mass");
    return "mass " + format_double(mass);
  });

  // The closed-form dot product holds to 2e-3 when the sample spacing is at
  // most sigma/2 and the encoded values sit at least 4 sigma inside the
  // grid; both checks below stay in that regime (spacing 0.5, sigma 1).
  check("encoder_similarity_identity", [] {
    const GaussianEncoder encoder(64, 0.0, 31.5, 1.0);
    const Encoding g = encoder.encode(15.73);
    const double sim = similarity(g, g);
    expect_near(sim, 1.0, 2e-3, "self similarity");
    return "similarity " + format_double(sim);
  });

  check("encoder_similarity_decay", [] {
    const GaussianEncoder encoder(64, 0.0, 31.5, 1.0);
    const Encoding g0 = encoder.encode(12.2);
    const double at_one = similarity(g0, encoder.encode(13.2));
    expect_near(at_one, 0.6065306597126334, 2e-3, "similarity at unit offset");
    double previous = similarity(g0, encoder.encode(12.2));
    for (const double offset : {0.5, 1.0, 2.0, 4.0}) {
      const double sim = similarity(g0, encoder.encode(12.2 + offset));
      expect(sim < previous, "similarity failed to decrease at offset " + format_double(offset));
      previous = sim;
    }
    return "similarity at offset 1 is " + format_double(at_one);
  });

  check("sinusoidal_shift_identity", [] {
    const double d = 3.7;
    const double shift = 2.1;
    const Encoding a = sinusoidal_encode(8, d, 100.0);
    const Encoding b = sinusoidal_encode(8, d + shift, 100.0);
    for (int i = 0; i < 4; ++i) {
      const double omega = std::pow(100.0, -2.0 * i / 8.0);
      const double c = std::cos(omega * shift);
      const double s = std::sin(omega * shift);
      expect_near(b[2 * i], c * a[2 * i] + s * a[2 * i + 1], 1e-12, "sine component");
      expect_near(b[2 * i + 1], c * a[2 * i + 1] - s * a[2 * i], 1e-12, "cosine component");
    }
    return "8 components verified";
  });

  // ---- geometry ----

  check("wrap_angle_branch", [] {
    expect_near(wrap_angle(7.0 * kPi / 3.0), kPi / 3.0, 1e-9, "wrap of 7 pi / 3");
    expect(wrap_angle(-kPi) == kPi, "wrap of -pi must land on +pi");
    expect(wrap_angle(0.0) == 0.0, "wrap of 0");
    return "boundary maps to +pi";
  });

  check("orientation_delta_forward_mount", [] {
    const CameraRig rig = demo_rig();
    expect_near(orientation_delta(rig).radians, 0.0, 1e-12, "forward mount delta");
    return "delta " + format_double(orientation_delta(rig).radians);
  });

  check("orientation_delta_rotation_shift", [] {
    const CameraRig rig = demo_rig();
    const double theta = 0.35;
    const WorldRotationResult rotated = apply_world_rotation(rig, {}, {}, theta);
    const double delta = orientation_delta(rotated.rig).radians;
    expect_near(delta, theta, 1e-12, "delta after rotation");
    return "delta " + format_double(delta);
  });

  check("orientation_delta_degenerate", [] {
    // Optical axis straight down: no ground-plane heading.
    Eigen::Matrix3d rotation;
    rotation << 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0;
    const CameraRig rig(simple_intrinsic(500.0, 320.0, 240.0),
                        make_extrinsic(rotation, Eigen::Vector3d::Zero()));
    try {
      (void)orientation_delta(rig);
    } catch (const std::domain_error&) {
      return std::string("degenerate mount rejected");
    }
    fail("top-down mount did not raise");
  });

  check("projection_round_trip", [] {
    const CameraRig rig = demo_rig();
    const ImageSize image{1248, 352};
    SplitMix64 rng(11);
    double worst = 0.0;
    for (int s = 0; s < 25; ++s) {
      const Eigen::Vector3d p(rng.uniform(4.0, 50.0), rng.uniform(-8.0, 8.0),
                              rng.uniform(-1.5, 2.0));
      const Eigen::Vector3d camera = ego_to_camera(rig, p);
      const PixelProjection pixel = project_to_image(rig, camera, image);
      if (!pixel.valid) continue;
      const Eigen::Vector3d recovered = back_project(rig, pixel.u, pixel.v, pixel.depth);
      worst = std::max(worst, (recovered - p).cwiseAbs().maxCoeff());
    }
    expect(worst <= 1e-9, "round trip error " + format_double(worst));
    return "max error " + format_double(worst);
  });

  check("flip_involution_exact", [] {
    const CameraRig rig = demo_rig();
    std::vector<Box3D> boxes{Box3D({12.0, 1.5, 0.2}, 3.9, 1.6, 1.5, 0.31),
                             Box3D({18.0, -4.0, -0.1}, 4.2, 1.7, 1.4, -2.7)};
    PointCloud cloud;
    cloud.points = {{5.0, 1.0, 0.5}, {9.0, -2.0, 0.25}};
    const WorldFlipResult once = apply_world_flip(rig, boxes, cloud);
    const WorldFlipResult twice = apply_world_flip(once.rig, once.boxes, once.cloud);
    expect((twice.rig.extrinsic() - rig.extrinsic()).cwiseAbs().maxCoeff() == 0.0,
           "extrinsic changed under double flip");
    expect(twice.rig.handedness() == rig.handedness(), "handedness changed under double flip");
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      expect(twice.boxes[i].center == boxes[i].center && twice.boxes[i].yaw == boxes[i].yaw,
             "box changed under double flip");
    }
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
      expect(twice.cloud.points[i] == cloud.points[i], "point changed under double flip");
    }
    expect(once.rig.handedness() == -1, "single flip must flip handedness");
    return "bit-exact after two flips";
  });

  check("flip_pixel_mirror", [] {
    const CameraRig rig = demo_rig();
    const ImageSize image{1248, 352};
    const Eigen::Vector3d p(12.0, 1.5, 0.3);
    const PixelProjection before = project_to_image(rig, ego_to_camera(rig, p), image);
    const WorldFlipResult flipped = apply_world_flip(rig, {}, {});
    const CameraRig mirrored = with_mirrored_intrinsic(flipped.rig, image.width);
    Eigen::Vector3d p_flipped = p;
    p_flipped.y() = -p_flipped.y();
    const PixelProjection after =
        project_to_image(mirrored, ego_to_camera(mirrored, p_flipped), image);
    expect(before.valid && after.valid, "projection left the image");
    expect_near(after.u, static_cast<double>(image.width - 1) - before.u, 1e-9, "mirrored u");
    expect_near(after.v, before.v, 1e-9, "mirrored v");
    expect_near(after.depth, before.depth, 1e-12, "mirrored depth");
    return "u maps to width-1-u";
  });

  check("rotation_camera_invariance", [] {
    const CameraRig rig = demo_rig();
    const double theta = 0.6;
    PointCloud cloud;
    cloud.points = {{10.0, 2.0, 0.4}, {25.0, -6.0, 1.0}, {40.0, 0.5, -0.5}};
    const WorldRotationResult rotated = apply_world_rotation(rig, {}, cloud, theta);
    double worst = 0.0;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
      const Eigen::Vector3d before = ego_to_camera(rig, cloud.points[i]);
      const Eigen::Vector3d after = ego_to_camera(rotated.rig, rotated.cloud.points[i]);
      worst = std::max(worst, (after - before).cwiseAbs().maxCoeff());
    }
    expect(worst <= 1e-9, "camera coordinates drifted " + format_double(worst));
    return "max drift " + format_double(worst);
  });

  check("rotation_zero_identity", [] {
    const CameraRig rig = demo_rig();
    const WorldRotationResult rotated = apply_world_rotation(rig, {}, {}, 0.0);
    expect((rotated.rig.extrinsic() - rig.extrinsic()).cwiseAbs().maxCoeff() == 0.0,
           "zero rotation touched the extrinsic");
    return "extrinsic bit-identical";
  });

  // ---- voxel grid ----

  check("voxel_boundary_ownership", [] {
    const VoxelGrid grid({0.0, 0.0, 0.0}, {0.5, 0.5, 0.5}, {4, 4, 4});
    const auto ijk = grid.voxel_of({1.0, 0.25, 0.25});
    expect(ijk.has_value() && ijk->x() == 2, "face point must belong to the larger index");
    const auto outside = grid.voxel_of({2.0, 0.25, 0.25});
    expect(!outside.has_value(), "max corner face must be outside (half-open)");
    return "faces belong to the larger index";
  });

  check("bilinear_ramp_exact", [] {
    FeatureMap map(4, 5, 1);
    for (int v = 0; v < 4; ++v) {
      for (int u = 0; u < 5; ++u) map.at(v, u, 0) = 2.0 * u + 3.0 * v;
    }
    const SampleResult sample = bilinear_sample(map, 2.25, 1.5);
    expect(sample.valid, "in-bounds sample was rejected");
    expect_near(sample.values[0], 2.0 * 2.25 + 3.0 * 1.5, 1e-12, "ramp value");
    const SampleResult outside = bilinear_sample(map, 4.001, 1.0);
    expect(!outside.valid && outside.values[0] == 0.0, "outside sample must be zero");
    return "ramp reproduced, outside rejected";
  });

  // ---- ray traversal ----

  check("traversal_axis_line", [] {
    const VoxelGrid grid({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {8, 4, 4});
    const std::vector<std::size_t> indices =
        traverse_ray(grid, SensorOrigin{{0.5, 1.5, 2.5}}, {6.5, 1.5, 2.5});
    std::vector<std::size_t> expected;
    for (int i = 0; i < 6; ++i) expected.push_back(grid.linear_index(i, 1, 2));
    expect(indices == expected, "axis-aligned traversal produced the wrong voxels");
    return count_string(indices.size()) + " voxels, endpoint excluded";
  });

  check("traversal_corner_graze", [] {
    // Exact diagonal through voxel corners: the grazed off-diagonal voxels
    // carry zero chord and must not appear.
    const VoxelGrid grid({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {4, 4, 1});
    const std::vector<std::size_t> indices =
        traverse_ray(grid, SensorOrigin{{0.5, 0.5, 0.5}}, {3.5, 3.5, 0.5});
    const std::vector<std::size_t> expected{grid.linear_index(0, 0, 0), grid.linear_index(1, 1, 0),
                                            grid.linear_index(2, 2, 0)};
    expect(indices == expected, "diagonal traversal emitted a grazed voxel");
    return "diagonal emits only interior voxels";
  });

  check("traversal_endpoint_origin_rules", [] {
    const VoxelGrid grid({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {8, 8, 2});
    const std::vector<std::size_t> indices =
        traverse_ray(grid, SensorOrigin{{1.25, 1.25, 0.5}}, {5.75, 2.0, 0.5});
    expect(!indices.empty() && indices.front() == grid.linear_index(1, 1, 0),
           "origin voxel missing");
    const auto endpoint_voxel = grid.linear_index(5, 2, 0);
    expect(std::find(indices.begin(), indices.end(), endpoint_voxel) == indices.end(),
           "endpoint voxel must be excluded");
    return "origin included, endpoint excluded";
  });

  check("traversal_matches_slab_reference", [] {
    const VoxelGrid grid({-2.0, -2.0, -1.0}, {0.5, 0.5, 0.5}, {8, 8, 4});
    SplitMix64 rng(23);
    for (int s = 0; s < 200; ++s) {
      const Eigen::Vector3d origin(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0),
                                   rng.uniform(-2.0, 2.0));
      Eigen::Vector3d endpoint(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0),
                               rng.uniform(-2.0, 2.0));
      if (origin == endpoint) endpoint.x() += 0.25;
      const std::vector<std::size_t> walked = traverse_ray(grid, SensorOrigin{origin}, endpoint);
      const std::set<std::size_t> walked_set(walked.begin(), walked.end());
      expect(walked_set.size() == walked.size(), "duplicate voxel emitted");
      const std::set<std::size_t> reference = traversed_by_slabs(grid, origin, endpoint);
      expect(walked_set == reference,
             "traversal disagrees with the slab reference on ray " + count_string(s));
    }
    return "200 random rays agree with the slab reference";
  });

  // ---- occupancy ----

  check("occupancy_priority_and_visibility", [] {
    const VoxelGrid grid({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {8, 1, 1});
    PointCloud cloud;
    cloud.points = {{2.5, 0.5, 0.5}, {5.5, 0.5, 0.5}};
    const OccupancyLabelGrid labels =
        label_occupancy(grid, cloud, SensorOrigin{{0.5, 0.5, 0.5}}, 1);
    const auto at = [&](int i) { return labels.labels[grid.linear_index(i, 0, 0)]; };
    expect(at(2) == 1 && at(5) == 1, "returns must be occupied");
    expect(at(0) == 0 && at(1) == 0 && at(3) == 0 && at(4) == 0, "swept voxels must be free");
    expect(at(6) == 255 && at(7) == 255, "voxels behind the last return must stay unknown");
    return "occupied beats free, unknown behind returns";
  });

  check("occupancy_naive_differs_behind_returns", [] {
    const VoxelGrid grid({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {8, 1, 1});
    PointCloud cloud;
    cloud.points = {{2.5, 0.5, 0.5}};
    const SensorOrigin origin{{0.5, 0.5, 0.5}};
    const OccupancyLabelGrid ray_based = label_occupancy(grid, cloud, origin, 1);
    const OccupancyLabelGrid naive = label_occupancy_naive(grid, cloud);
    const std::size_t far_voxel = grid.linear_index(7, 0, 0);
    expect(naive.labels[far_voxel] == 0, "baseline must claim unseen space free");
    expect(ray_based.labels[far_voxel] == 255, "visibility labeler must leave it unknown");
    return "baseline mislabels unseen space, visibility labeler does not";
  });

  check("occupancy_thread_invariance", [alternate_threads] {
    const VoxelGrid grid({-8.0, -8.0, -2.0}, {0.4, 0.4, 0.4}, {40, 40, 10});
    SplitMix64 rng(31);
    PointCloud cloud;
    for (int i = 0; i < 2000; ++i) {
      cloud.points.emplace_back(rng.uniform(-8.0, 8.0), rng.uniform(-8.0, 8.0),
                                rng.uniform(-2.0, 2.0));
    }
    const SensorOrigin origin{{0.0, 0.0, 0.0}};
    const OccupancyLabelGrid single = label_occupancy(grid, cloud, origin, 1);
    const OccupancyLabelGrid multi = label_occupancy(grid, cloud, origin, alternate_threads);
    expect(single.labels == multi.labels, "labels depend on the thread count");
    return "labels identical across thread counts (occupied " +
           count_string(single.count(OccupancyLabel::kOccupied)) + ", free " +
           count_string(single.count(OccupancyLabel::kFree)) + ")";
  });

  // ---- attention ----

  check("attention_weight_peak", [] {
    const GaussianEncoder encoder(64, 0.0, 31.5, 1.0);
    const VoxelGrid grid({9.5, -0.5, -0.5}, {1.0, 1.0, 1.0}, {1, 1, 1});
    const CameraRig rig(simple_intrinsic(100.0, 3.5, 3.5),
                        make_extrinsic(forward_mount(), Eigen::Vector3d::Zero()));
    const Encoding key = encoder.encode(10.0);
    FeatureMap keys(8, 8, encoder.size());
    for (int v = 0; v < 8; ++v) {
      for (int u = 0; u < 8; ++u) {
        for (int c = 0; c < encoder.size(); ++c) keys.at(v, u, c) = key[c];
      }
    }
    FeatureMap values(8, 8, 2);
    for (int v = 0; v < 8; ++v) {
      for (int u = 0; u < 8; ++u) {
        values.at(v, u, 0) = 2.0;
        values.at(v, u, 1) = -3.0;
      }
    }
    const AttentionResult result = local_ray_attention(keys, values, grid, rig, encoder);
    expect(result.records[0].valid, "voxel should project into the map");
    expect_near(result.records[0].weight, 1.0, 2e-3, "matched-depth weight");
    expect_near(result.features.values[0], 2.0 * result.records[0].weight, 1e-12,
                "weighted value 0");
    expect_near(result.features.values[1], -3.0 * result.records[0].weight, 1e-12,
                "weighted value 1");
    return "weight " + format_double(result.records[0].weight);
  });

  check("attention_invalid_voxels_zero", [] {
    const GaussianEncoder encoder(16, 0.0, 16.0, 1.0);
    // One voxel in front of the camera, one behind.
    const VoxelGrid grid({-20.5, -0.5, -0.5}, {1.0, 1.0, 1.0}, {2, 1, 1});
    const CameraRig rig(simple_intrinsic(100.0, 3.5, 3.5),
                        make_extrinsic(forward_mount(), Eigen::Vector3d::Zero()));
    FeatureMap keys(8, 8, encoder.size());
    FeatureMap values(8, 8, 3);
    for (double& value : values.values()) value = 7.0;
    const AttentionResult result = local_ray_attention(keys, values, grid, rig, encoder);
    expect(!result.records[0].valid && !result.records[1].valid,
           "behind-camera voxels must be invalid");
    for (const double value : result.features.values) {
      expect(value == 0.0, "invalid voxel feature must be exactly zero");
    }
    return "invalid voxels carry exact zeros";
  });

  check("attention_thread_invariance", [alternate_threads] {
    const GaussianEncoder encoder(16, 0.0, 16.0, 1.0);
    const VoxelGrid grid({2.0, -2.0, -1.0}, {0.5, 0.4, 0.5}, {20, 10, 4});
    const CameraRig rig(simple_intrinsic(40.0, 15.5, 11.5),
                        make_extrinsic(forward_mount(), Eigen::Vector3d::Zero()));
    SplitMix64 rng(7);
    FeatureMap keys(24, 32, encoder.size());
    for (double& value : keys.values()) value = rng.uniform(-1.0, 1.0);
    FeatureMap values(24, 32, 5);
    for (double& value : values.values()) value = rng.uniform(-2.0, 2.0);
    AttentionOptions single;
    single.threads = 1;
    AttentionOptions multi;
    multi.threads = alternate_threads;
    const AttentionResult a = local_ray_attention(keys, values, grid, rig, encoder, single);
    const AttentionResult b = local_ray_attention(keys, values, grid, rig, encoder, multi);
    expect(a.features.values == b.features.values, "features depend on the thread count");
    std::size_t valid = 0;
    for (const VoxelAttentionRecord& record : a.records) valid += record.valid;
    return "features identical across thread counts (" + count_string(valid) +
           " voxels in view)";
  });

  check("attention_orientation_append", [] {
    const GaussianEncoder encoder(8, -0.9, 0.9, 0.1);
    FeatureMap features(2, 3, 4);
    for (std::size_t i = 0; i < features.values().size(); ++i) {
      features.values()[i] = static_cast<double>(i);
    }
    const FeatureMap augmented =
        append_orientation_encoding(features, OrientationDelta{0.25}, encoder);
    expect(augmented.channels() == 12, "expected 4 + 8 channels");
    const Encoding expected = encoder.encode(0.25);
    for (int v = 0; v < 2; ++v) {
      for (int u = 0; u < 3; ++u) {
        for (int c = 0; c < 4; ++c) {
          expect(augmented.at(v, u, c) == features.at(v, u, c), "payload channels changed");
        }
        for (int c = 0; c < 8; ++c) {
          expect(augmented.at(v, u, 4 + c) == expected[static_cast<std::size_t>(c)],
                 "appended channels differ between pixels");
        }
      }
    }
    return "orientation block identical across pixels";
  });

  // ---- overlap and evaluation ----

  check("iou_identical_and_disjoint", [] {
    const Box3D box({1.0, 2.0, 0.5}, 4.0, 2.0, 1.5, 0.7);
    expect_near(iou_bev_rotated(box, box), 1.0, 1e-12, "identical footprint overlap");
    expect_near(iou_3d(box, box), 1.0, 1e-12, "identical volume overlap");
    const Box3D far({50.0, 2.0, 0.5}, 4.0, 2.0, 1.5, 0.7);
    expect(iou_bev_rotated(box, far) == 0.0, "disjoint footprints must give zero");
    return "identity gives 1, disjoint gives 0";
  });

  check("iou_quarter_turn_frozen", [] {
    const Box3D square({0.0, 0.0, 0.0}, 1.0, 1.0, 1.0, 0.0);
    const Box3D diamond({0.0, 0.0, 0.0}, 1.0, 1.0, 1.0, kPi / 4.0);
    const double iou = iou_bev_rotated(square, diamond);
    expect_near(iou, 0.7071067811865476, 1e-9, "unit square vs 45-degree copy");
    return "overlap " + format_double(iou);
  });

  check("iou_monte_carlo_spot", [] {
    SplitMix64 rng(41);
    for (int pair = 0; pair < 3; ++pair) {
      const Box3D a({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0},
                    rng.uniform(1.0, 3.0), rng.uniform(1.0, 3.0), 1.0,
                    rng.uniform(-kPi, kPi));
      const Box3D b({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0},
                    rng.uniform(1.0, 3.0), rng.uniform(1.0, 3.0), 1.0,
                    rng.uniform(-kPi, kPi));
      const double exact = iou_bev_rotated(a, b);
      const double sampled = monte_carlo_bev_iou(a, b, 200000, 1000 + pair);
      expect_near(exact, sampled, 0.01, "clipped overlap vs sampling on pair " +
                                            count_string(pair));
    }
    return "3 pairs agree with sampling within 0.01";
  });

  check("iou_3d_vertical_overlap", [] {
    const Box3D lower({0.0, 0.0, 0.0}, 2.0, 2.0, 2.0, 0.0);
    const Box3D upper({0.0, 0.0, 1.0}, 2.0, 2.0, 2.0, 0.0);
    // Footprints identical, vertical overlap 1 of 2: intersection 4, union 12.
    expect_near(iou_3d(lower, upper), 4.0 / 12.0, 1e-12, "half-stacked cubes");
    const Box3D detached({0.0, 0.0, 5.0}, 2.0, 2.0, 2.0, 0.0);
    expect(iou_3d(lower, detached) == 0.0, "vertically detached boxes must give zero");
    return "stacked cubes give 1/3";
  });

  check("anchor_assignment_rules", [] {
    const std::vector<Box3D> truths{Box3D({0.0, 0.0, 0.0}, 4.0, 2.0, 1.5, 0.0)};
    const std::vector<Box3D> anchors{
        Box3D({0.1, 0.0, 0.0}, 4.0, 2.0, 1.5, 0.0),        // overlap 0.95: positive
        Box3D({4.0 / 3.0, 0.0, 0.0}, 4.0, 2.0, 1.5, 0.0),  // overlap 0.50: ignore
        Box3D({30.0, 0.0, 0.0}, 4.0, 2.0, 1.5, 0.0),       // overlap 0:    negative
    };
    const std::vector<AnchorAssignment> assigned = assign_anchors(anchors, truths, 0.6, 0.45);
    expect(assigned[0].kind == AnchorAssignmentKind::kPositive && assigned[0].target == 0,
           "near anchor must be positive");
    expect(assigned[1].kind == AnchorAssignmentKind::kIgnore, "middling anchor must be ignored");
    expect(assigned[2].kind == AnchorAssignmentKind::kNegative, "far anchor must be negative");
    return "positive, ignore, negative as expected";
  });

  check("anchor_force_best", [] {
    const std::vector<Box3D> truths{Box3D({0.0, 0.0, 0.0}, 4.0, 2.0, 1.5, 0.0)};
    // Best available overlap sits below the positive threshold.
    const std::vector<Box3D> anchors{Box3D({2.8, 0.9, 0.0}, 4.0, 2.0, 1.5, 0.0),
                                     Box3D({30.0, 0.0, 0.0}, 4.0, 2.0, 1.5, 0.0)};
    const std::vector<AnchorAssignment> forced = assign_anchors(anchors, truths, 0.6, 0.45, true);
    expect(forced[0].kind == AnchorAssignmentKind::kPositive && forced[0].target == 0,
           "best anchor must be claimed");
    const std::vector<AnchorAssignment> plain = assign_anchors(anchors, truths, 0.6, 0.45, false);
    expect(plain[0].kind != AnchorAssignmentKind::kPositive,
           "without forcing, the low-overlap anchor stays unclaimed");
    return "ground truth claims its best anchor";
  });

  check("ap_perfect_run", [] {
    std::vector<std::vector<GroundTruth>> truths(1);
    std::vector<std::vector<Detection>> detections(1);
    for (int i = 0; i < 3; ++i) {
      const Box3D box({10.0 * i, 0.0, 0.0}, 4.0, 2.0, 1.6, 0.0);
      truths[0].push_back({box, "Car", false});
      detections[0].push_back({box, 0.9 - 0.1 * i, "Car"});
    }
    const double ap = average_precision(detections, truths, {});
    expect_near(ap, 100.0, 1e-12, "perfect run");
    return "AP " + format_double(ap);
  });

  check("ap_frozen_mixed_run", [] {
    std::vector<std::vector<GroundTruth>> truths(1);
    for (int i = 0; i < 3; ++i) {
      truths[0].push_back({Box3D({10.0 * i, 0.0, 0.0}, 4.0, 2.0, 1.6, 0.0), "Car", false});
    }
    std::vector<std::vector<Detection>> detections(1);
    detections[0].push_back({Box3D({0.1, 0.0, 0.0}, 4.0, 2.0, 1.6, 0.0), 0.9, "Car"});
    detections[0].push_back({Box3D({40.0, 5.0, 0.0}, 4.0, 2.0, 1.6, 0.0), 0.8, "Car"});
    detections[0].push_back({Box3D({10.1, 0.0, 0.0}, 4.0, 2.0, 1.6, 0.0), 0.7, "Car"});
    detections[0].push_back({Box3D({20.1, 0.0, 0.0}, 4.0, 2.0, 1.6, 0.0), 0.6, "Car"});
    detections[0].push_back({Box3D({50.0, -5.0, 0.0}, 4.0, 2.0, 1.6, 0.0), 0.5, "Car"});
    const double ap = average_precision(detections, truths, {});
    expect_near(ap, 83.125, 1e-9, "mixed run");

    // Any strictly increasing score transform must not change the result.
    std::vector<std::vector<Detection>> rescaled = detections;
    for (Detection& detection : rescaled[0]) detection.score = detection.score * 0.5 + 0.1;
    expect(average_precision(rescaled, truths, {}) == ap, "AP changed under score rescaling");
    return "AP " + format_double(ap);
  });

  check("ap_ignored_targets", [] {
    std::vector<std::vector<GroundTruth>> truths(1);
    truths[0].push_back({Box3D({0.0, 0.0, 0.0}, 4.0, 2.0, 1.6, 0.0), "Car", false});
    truths[0].push_back({Box3D({10.0, 0.0, 0.0}, 4.0, 2.0, 1.6, 0.0), "Car", true});
    std::vector<std::vector<Detection>> detections(1);
    detections[0].push_back({Box3D({0.05, 0.0, 0.0}, 4.0, 2.0, 1.6, 0.0), 0.9, "Car"});
    detections[0].push_back({Box3D({10.05, 0.0, 0.0}, 4.0, 2.0, 1.6, 0.0), 0.8, "Car"});
    const double ap = average_precision(detections, truths, {});
    expect_near(ap, 100.0, 1e-12, "ignored match must not count as false positive");
    return "AP " + format_double(ap);
  });

  check("difficulty_gates", [] {
    expect(within_difficulty(45.0, 0, 0.1, Difficulty::kEasy), "tall unoccluded is easy");
    expect(!within_difficulty(30.0, 0, 0.1, Difficulty::kEasy), "short box is not easy");
    expect(within_difficulty(30.0, 1, 0.2, Difficulty::kModerate), "partly occluded is moderate");
    expect(!within_difficulty(30.0, 2, 0.2, Difficulty::kModerate), "heavy occlusion not moderate");
    expect(within_difficulty(30.0, 2, 0.45, Difficulty::kHard), "heavy occlusion is hard");
    expect(!within_difficulty(20.0, 0, 0.0, Difficulty::kHard), "tiny box is out of range");
    return "visibility gates agree with the screening rules";
  });

  // ---- file formats ----

  check("calibration_round_trip", [] {
    KittiCalibration calibration;
    calibration.p2 << 720.0, 0.0, 620.5, 45.0, 0.0, 720.0, 175.25, 0.25, 0.0, 0.0, 1.0, 0.003;
    calibration.p3 = calibration.p2;
    calibration.p3(0, 3) = -340.0;
    calibration.r0_rect = rotation_about_up(0.01);
    calibration.tr_velo_to_cam.leftCols<3>() = forward_mount();
    calibration.tr_velo_to_cam.col(3) = Eigen::Vector3d(0.06, -0.08, -0.27);
    const std::string text = write_calibration(calibration);
    const std::string again = write_calibration(parse_calibration(text));
    expect(text == again, "calibration text changed across a round trip");
    return "text stable across parse/write";
  });

  check("labels_round_trip", [] {
    KittiLabel label;
    label.type = "Car";
    label.truncation = 0.125;
    label.occlusion = 1;
    label.alpha = -1.5625;
    label.left = 100.25;
    label.top = 150.5;
    label.right = 300.75;
    label.bottom = 275.0;
    label.height = 1.52;
    label.width = 1.63;
    label.length = 3.88;
    label.location = Eigen::Vector3d(2.5, 1.7, 15.0);
    label.rotation_y = -1.2;
    const std::string text = write_labels({label});
    const std::string again = write_labels(parse_labels(text));
    expect(text == again, "label text changed across a round trip");
    std::vector<KittiLabel> scored{label};
    scored[0].score = 0.875;
    const std::string scored_text = write_labels(scored);
    expect(scored_text == write_labels(parse_labels(scored_text)),
           "scored label text changed across a round trip");
    return "15 and 16 field rows stable";
  });

  check("point_cloud_round_trip", [] {
    PointCloud cloud;
    cloud.points = {{1.5, -2.25, 0.5}, {10.0, 4.75, -1.125}};
    cloud.intensity = {0.25, 0.875};
    const std::vector<std::uint8_t> bytes = write_point_cloud(cloud);
    expect(bytes.size() == 32, "two points must occupy 32 bytes");
    const PointCloud parsed = parse_point_cloud(bytes);
    expect(write_point_cloud(parsed) == bytes, "bytes changed across a round trip");
    return "bytes stable across parse/write";
  });

  check("label_box_round_trip", [] {
    const Eigen::Matrix4d extrinsic =
        make_extrinsic(forward_mount(), Eigen::Vector3d(0.06, -0.08, -0.27));
    KittiLabel label;
    label.type = "Car";
    label.height = 1.52;
    label.width = 1.63;
    label.length = 3.88;
    label.location = Eigen::Vector3d(2.5, 1.7, 15.0);
    label.rotation_y = -1.2;
    const Box3D box = box_from_label(label, extrinsic);
    const KittiLabel back = label_from_box(box, extrinsic, label);
    expect_near(back.location.x(), label.location.x(), 1e-9, "location x");
    expect_near(back.location.y(), label.location.y(), 1e-9, "location y");
    expect_near(back.location.z(), label.location.z(), 1e-9, "location z");
    expect_near(back.rotation_y, label.rotation_y, 1e-9, "rotation");
    expect(back.height == label.height && back.width == label.width &&
               back.length == label.length,
           "dimensions changed");
    return "camera fields reproduced within 1e-9";
  });

  check("projection_chain_consistency", [] {
    KittiCalibration calibration;
    calibration.p2 << 720.0, 0.0, 620.5, 45.0, 0.0, 720.0, 175.25, 0.25, 0.0, 0.0, 1.0, 0.003;
    calibration.p3 = calibration.p2;
    calibration.r0_rect = rotation_about_up(0.01);
    calibration.tr_velo_to_cam.leftCols<3>() = forward_mount();
    calibration.tr_velo_to_cam.col(3) = Eigen::Vector3d(0.06, -0.08, -0.27);
    const CameraRig rig = rig_from_calibration(calibration, CameraSide::kLeft);

    const Eigen::Vector3d p(12.0, 1.5, 0.3);
    Eigen::Matrix4d r0 = Eigen::Matrix4d::Identity();
    r0.topLeftCorner<3, 3>() = calibration.r0_rect;
    Eigen::Matrix4d tr = Eigen::Matrix4d::Identity();
    tr.topRows<3>() = calibration.tr_velo_to_cam;
    const Eigen::Vector4d chained = r0 * tr * p.homogeneous();
    const Eigen::Vector3d direct = ego_to_camera(rig, p);
    expect((chained.head<3>() - direct).cwiseAbs().maxCoeff() <= 1e-9,
           "composed transform disagrees with the rig");

    const Eigen::Vector3d pixel_h = calibration.p2 * chained;
    const PixelProjection pixel = project_to_image(rig, direct, ImageSize{1248, 352});
    expect_near(pixel.u, pixel_h.x() / pixel_h.z(), 1e-9, "u");
    expect_near(pixel.v, pixel_h.y() / pixel_h.z(), 1e-9, "v");
    return "rig matches the matrix chain";
  });

  check("container_round_trips", [] {
    const ScratchGuard fmp{scratch_file("map")};
    FeatureMap map(3, 4, 2);
    for (std::size_t i = 0; i < map.values().size(); ++i) {
      map.values()[i] = static_cast<double>(i) * 0.25;  // exactly representable in f32
    }
    write_feature_map(fmp.path, map);
    const FeatureMap map_back = read_feature_map(fmp.path);
    expect(map_back.values() == map.values() && map_back.height() == 3 && map_back.width() == 4,
           "feature map changed across a round trip");

    const ScratchGuard occ{scratch_file("labels")};
    const VoxelGrid grid({0.0, -1.0, 0.5}, {0.5, 0.25, 0.5}, {4, 3, 2});
    OccupancyLabelGrid labels{grid, std::vector<std::uint8_t>(grid.voxel_count(), 255)};
    labels.labels[3] = 0;
    labels.labels[7] = 1;
    write_occupancy(occ.path, labels);
    const OccupancyLabelGrid labels_back = read_occupancy(occ.path);
    expect(labels_back.labels == labels.labels, "labels changed across a round trip");
    expect((labels_back.grid.origin - grid.origin).cwiseAbs().maxCoeff() == 0.0,
           "grid origin changed across a round trip");

    const ScratchGuard vxf{scratch_file("features")};
    VoxelFeatures features{grid, 3, {}};
    features.values.assign(grid.voxel_count() * 3, 0.0);
    for (std::size_t i = 0; i < features.values.size(); ++i) {
      features.values[i] = static_cast<double>(i % 17) * 0.5;
    }
    write_voxel_features(vxf.path, features);
    const VoxelFeatureData features_back = read_voxel_features(vxf.path);
    expect(features_back.values == features.values && features_back.channels == 3 &&
               features_back.dims == grid.dims,
           "voxel features changed across a round trip");
    return "all three containers stable";
  });

  check("config_round_trip", [] {
    const RunConfig defaults;
    const std::string text = write_run_config(defaults);
    const std::string again = write_run_config(parse_run_config(text));
    expect(text == again, "config text changed across a round trip");
    try {
      (void)parse_run_config("no_such_key = 3\n");
    } catch (const std::runtime_error&) {
      return std::string("round trip stable, unknown key rejected");
    }
    fail("unknown key was accepted");
  });

  return results;
}

}  // namespace voxelray
