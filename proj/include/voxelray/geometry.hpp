// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace voxelray {

inline constexpr double kPi = 3.14159265358979323846;

// Points closer to the image plane than this (camera z, meters) do not
// project to a usable pixel.
inline constexpr double kEpsilonDepth = 1e-3;

// Wraps an angle to (-pi, pi]. Every angle-valued quantity in the library is
// stored in radians and normalized through this one helper.
double wrap_angle(double radians);

// Rotation about the ego up-axis (z) by theta radians.
Eigen::Matrix3d rotation_about_up(double theta);

struct OrientationDelta {
  double radians = 0.0;  // wrapped to (-pi, pi]
};

// Oriented box in the ego frame. `length` runs along the heading axis given
// by `yaw`, `width` across it, `height` along the up-axis. Dimensions are
// strictly positive; `yaw` is stored wrapped.
struct Box3D {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double length = 1.0;
  double width = 1.0;
  double height = 1.0;
  double yaw = 0.0;

  Box3D() = default;
  Box3D(const Eigen::Vector3d& center, double length, double width, double height, double yaw);
};

struct PointCloud {
  std::vector<Eigen::Vector3d> points;  // m, ego frame
  std::vector<double> intensity;        // empty, or one value in [0, 1] per point

  // Throws std::invalid_argument on non-finite points, intensity size
  // mismatch, or intensity outside [0, 1].
  void validate() const;
};

struct ImageSize {
  int width = 0;   // px
  int height = 0;  // px
};

// Camera model: a 3x4 pixel projection matrix plus a 4x4 rigid ego-to-camera
// transform. After a world flip the rotation block of the extrinsic is a
// reflection (determinant -1); `handedness` records which case holds and the
// constructor checks the block against it.
class CameraRig {
 public:
  using Intrinsic = Eigen::Matrix<double, 3, 4>;

  CameraRig(const Intrinsic& intrinsic, const Eigen::Matrix4d& extrinsic, int handedness = +1);

  const Intrinsic& intrinsic() const { return intrinsic_; }
  const Eigen::Matrix4d& extrinsic() const { return extrinsic_; }
  Eigen::Matrix3d rotation() const { return extrinsic_.topLeftCorner<3, 3>(); }
  Eigen::Vector3d translation() const { return extrinsic_.topRightCorner<3, 1>(); }
  int handedness() const { return handedness_; }

 private:
  Intrinsic intrinsic_ = Intrinsic::Zero();
  Eigen::Matrix4d extrinsic_ = Eigen::Matrix4d::Identity();
  int handedness_ = +1;
};

// Angle between the ego forward axis and the camera optical axis projected
// onto the ego ground plane. Rotating the world about the up-axis by theta
// shifts the result by exactly theta (mod 2pi). Throws std::domain_error
// when the optical axis is numerically parallel to the up-axis, where the
// ground-plane direction is undefined.
OrientationDelta orientation_delta(const CameraRig& rig);

struct WorldRotationResult {
  CameraRig rig;
  std::vector<Box3D> boxes;
  PointCloud cloud;
};

// Rotates the world (boxes, points) about the ego up-axis by theta and
// compensates the extrinsic so that camera-frame coordinates of every
// rotated point are unchanged. theta = 0 is an exact no-op.
WorldRotationResult apply_world_rotation(const CameraRig& rig, std::vector<Box3D> boxes,
                                         PointCloud cloud, double theta);

struct WorldFlipResult {
  CameraRig rig;
  std::vector<Box3D> boxes;
  PointCloud cloud;
  // Always true: the caller must mirror the camera image horizontally and
  // replace the projection matrix with mirror_intrinsic(..) to match.
  bool image_flip_required = true;
};

// Mirrors the world across the ego y = 0 plane (y -> -y, yaw -> -yaw) and
// negates the second column of the extrinsic rotation block, making it a
// reflection. Involutive: applying it twice restores the input exactly.
WorldFlipResult apply_world_flip(const CameraRig& rig, std::vector<Box3D> boxes, PointCloud cloud);

// Projection matrix for the horizontally mirrored image: a point that lands
// on column u lands on column width-1-u after the flip (pixel centers).
CameraRig::Intrinsic mirror_intrinsic(const CameraRig::Intrinsic& intrinsic, int image_width);

// Convenience: same rig with its projection matrix mirrored.
CameraRig with_mirrored_intrinsic(const CameraRig& rig, int image_width);

// Rescales a projection matrix from full image resolution to a downsampled
// map, preserving pixel centers: u_out = (u + 0.5) * scale_u - 0.5.
CameraRig::Intrinsic scale_intrinsic(const CameraRig::Intrinsic& intrinsic, double scale_u,
                                     double scale_v);

Eigen::Vector3d ego_to_camera(const CameraRig& rig, const Eigen::Vector3d& point);
std::vector<Eigen::Vector3d> ego_to_camera(const CameraRig& rig,
                                           const std::vector<Eigen::Vector3d>& points);

struct PixelProjection {
  double u = 0.0;      // px; zero when depth is invalid
  double v = 0.0;      // px; zero when depth is invalid
  double depth = 0.0;  // m, camera-frame z
  bool valid = false;  // depth > kEpsilonDepth and (u, v) inside the image
};

// Projects camera-frame points through the 3x4 projection matrix. A result
// is valid when depth > kEpsilonDepth and the pixel lies in
// [0, width-1] x [0, height-1] (closed, pixel centers).
PixelProjection project_to_image(const CameraRig& rig, const Eigen::Vector3d& camera_point,
                                 const ImageSize& image);
std::vector<PixelProjection> project_to_image(const CameraRig& rig,
                                              const std::vector<Eigen::Vector3d>& camera_points,
                                              const ImageSize& image);

// Inverse of project_to_image for a known camera depth: returns the ego-frame
// point whose projection is (u, v) at camera z = depth. Requires the third
// row of the projection matrix to be (0, 0, s, c) with s != 0.
Eigen::Vector3d back_project(const CameraRig& rig, double u, double v, double depth);

}  // namespace voxelray
