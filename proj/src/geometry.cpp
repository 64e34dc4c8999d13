// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelray/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace voxelray {
namespace {

constexpr double kOrthonormalTolerance = 1e-6;
constexpr double kAffineRowTolerance = 1e-9;
// Below this, the ground-plane component of the optical axis has no usable
// direction and the orientation delta is undefined.
constexpr double kAxisProjectionFloor = 1e-12;

void check_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + " contains a non-finite value");
  }
}

}  // namespace

double wrap_angle(double radians) {
  if (!std::isfinite(radians)) {
    throw std::invalid_argument("wrap_angle: non-finite angle");
  }
  // remainder() maps into [-pi, pi]; fold the open end to keep (-pi, pi].
  double wrapped = std::remainder(radians, 2.0 * kPi);
  if (wrapped <= -kPi) wrapped = kPi;
  return wrapped;
}

Eigen::Matrix3d rotation_about_up(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix3d r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

Box3D::Box3D(const Eigen::Vector3d& center_, double length_, double width_, double height_,
             double yaw_)
    : center(center_), length(length_), width(width_), height(height_), yaw(wrap_angle(yaw_)) {
  check_finite(center, "Box3D center");
  if (!(length > 0.0) || !(width > 0.0) || !(height > 0.0) || !std::isfinite(length) ||
      !std::isfinite(width) || !std::isfinite(height)) {
    throw std::invalid_argument("Box3D: dimensions must be positive and finite");
  }
}

void PointCloud::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) {
      throw std::invalid_argument("PointCloud: non-finite point at index " + std::to_string(i));
    }
  }
  if (!intensity.empty()) {
    if (intensity.size() != points.size()) {
      throw std::invalid_argument("PointCloud: intensity size " +
                                  std::to_string(intensity.size()) + " does not match " +
                                  std::to_string(points.size()) + " points");
    }
    for (std::size_t i = 0; i < intensity.size(); ++i) {
      if (!(intensity[i] >= 0.0 && intensity[i] <= 1.0)) {
        throw std::invalid_argument("PointCloud: intensity out of [0, 1] at index " +
                                    std::to_string(i));
      }
    }
  }
}

CameraRig::CameraRig(const Intrinsic& intrinsic, const Eigen::Matrix4d& extrinsic, int handedness)
    : intrinsic_(intrinsic), extrinsic_(extrinsic), handedness_(handedness) {
  check_finite(intrinsic_, "CameraRig intrinsic");
  check_finite(extrinsic_, "CameraRig extrinsic");
  if (handedness_ != 1 && handedness_ != -1) {
    throw std::invalid_argument("CameraRig: handedness must be +1 or -1");
  }
  if (intrinsic_(0, 0) == 0.0 || intrinsic_(1, 1) == 0.0) {
    throw std::invalid_argument("CameraRig: zero focal entry in the projection matrix");
  }
  const Eigen::Matrix3d r = extrinsic_.topLeftCorner<3, 3>();
  const double orthonormality = (r.transpose() * r - Eigen::Matrix3d::Identity())
                                    .cwiseAbs()
                                    .maxCoeff();
  if (orthonormality > kOrthonormalTolerance) {
    throw std::invalid_argument("CameraRig: extrinsic rotation block not orthonormal (deviation " +
                                std::to_string(orthonormality) + ")");
  }
  const double det = r.determinant();
  if (std::abs(det - static_cast<double>(handedness_)) > kOrthonormalTolerance) {
    throw std::invalid_argument("CameraRig: rotation determinant " + std::to_string(det) +
                                " does not match handedness " + std::to_string(handedness_));
  }
  const Eigen::RowVector4d bottom = extrinsic_.row(3);
  if ((bottom - Eigen::RowVector4d(0.0, 0.0, 0.0, 1.0)).cwiseAbs().maxCoeff() >
      kAffineRowTolerance) {
    throw std::invalid_argument("CameraRig: extrinsic bottom row must be (0, 0, 0, 1)");
  }
}

OrientationDelta orientation_delta(const CameraRig& rig) {
  // The camera optical axis expressed in the ego frame is the third row of
  // the rotation block; its ground-plane components are that row's x and y.
  const Eigen::Matrix3d r = rig.rotation();
  const double x = r(2, 0);
  const double y = r(2, 1);
  if (std::hypot(x, y) < kAxisProjectionFloor) {
    throw std::domain_error(
        "orientation_delta: optical axis is parallel to the up-axis; ground-plane heading "
        "undefined");
  }
  return OrientationDelta{wrap_angle(std::atan2(y, x))};
}

WorldRotationResult apply_world_rotation(const CameraRig& rig, std::vector<Box3D> boxes,
                                         PointCloud cloud, double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("apply_world_rotation: non-finite angle");
  }
  const Eigen::Matrix3d r = rotation_about_up(theta);
  Eigen::Matrix4d inverse_lift = Eigen::Matrix4d::Identity();
  inverse_lift.topLeftCorner<3, 3>() = rotation_about_up(-theta);
  const Eigen::Matrix4d extrinsic = rig.extrinsic() * inverse_lift;

  for (Box3D& box : boxes) {
    box = Box3D(r * box.center, box.length, box.width, box.height, box.yaw + theta);
  }
  for (Eigen::Vector3d& p : cloud.points) p = r * p;

  return WorldRotationResult{CameraRig(rig.intrinsic(), extrinsic, rig.handedness()),
                             std::move(boxes), std::move(cloud)};
}

WorldFlipResult apply_world_flip(const CameraRig& rig, std::vector<Box3D> boxes,
                                 PointCloud cloud) {
  Eigen::Matrix4d extrinsic = rig.extrinsic();
  extrinsic.col(1).head<3>() = -extrinsic.col(1).head<3>();

  for (Box3D& box : boxes) {
    Eigen::Vector3d center = box.center;
    center.y() = -center.y();
    box = Box3D(center, box.length, box.width, box.height, wrap_angle(-box.yaw));
  }
  for (Eigen::Vector3d& p : cloud.points) p.y() = -p.y();

  return WorldFlipResult{CameraRig(rig.intrinsic(), extrinsic, -rig.handedness()),
                         std::move(boxes), std::move(cloud), true};
}

CameraRig::Intrinsic mirror_intrinsic(const CameraRig::Intrinsic& intrinsic, int image_width) {
  if (image_width < 1) {
    throw std::invalid_argument("mirror_intrinsic: image width must be positive");
  }
  // u' = (width - 1) - u as a left-multiplied pixel map: negate the u row and
  // add (width - 1) times the homogeneous row.
  CameraRig::Intrinsic mirrored = intrinsic;
  mirrored.row(0) = static_cast<double>(image_width - 1) * intrinsic.row(2) - intrinsic.row(0);
  return mirrored;
}

CameraRig with_mirrored_intrinsic(const CameraRig& rig, int image_width) {
  return CameraRig(mirror_intrinsic(rig.intrinsic(), image_width), rig.extrinsic(),
                   rig.handedness());
}

CameraRig::Intrinsic scale_intrinsic(const CameraRig::Intrinsic& intrinsic, double scale_u,
                                     double scale_v) {
  if (!(scale_u > 0.0) || !(scale_v > 0.0)) {
    throw std::invalid_argument("scale_intrinsic: scales must be positive");
  }
  // Pixel centers map as u_out = (u + 0.5) * s - 0.5, an affine map in
  // homogeneous pixel coordinates.
  CameraRig::Intrinsic scaled = intrinsic;
  scaled.row(0) = scale_u * intrinsic.row(0) + (0.5 * scale_u - 0.5) * intrinsic.row(2);
  scaled.row(1) = scale_v * intrinsic.row(1) + (0.5 * scale_v - 0.5) * intrinsic.row(2);
  return scaled;
}

Eigen::Vector3d ego_to_camera(const CameraRig& rig, const Eigen::Vector3d& point) {
  return rig.rotation() * point + rig.translation();
}

std::vector<Eigen::Vector3d> ego_to_camera(const CameraRig& rig,
                                           const std::vector<Eigen::Vector3d>& points) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(points.size());
  for (const Eigen::Vector3d& p : points) out.push_back(ego_to_camera(rig, p));
  return out;
}

PixelProjection project_to_image(const CameraRig& rig, const Eigen::Vector3d& camera_point,
                                 const ImageSize& image) {
  PixelProjection result;
  result.depth = camera_point.z();
  if (!(result.depth > kEpsilonDepth)) return result;

  const Eigen::Vector3d h =
      rig.intrinsic() * camera_point.homogeneous();
  if (!(std::abs(h.z()) > 0.0)) return result;
  result.u = h.x() / h.z();
  result.v = h.y() / h.z();
  result.valid = result.u >= 0.0 && result.u <= static_cast<double>(image.width - 1) &&
                 result.v >= 0.0 && result.v <= static_cast<double>(image.height - 1);
  return result;
}

std::vector<PixelProjection> project_to_image(const CameraRig& rig,
                                              const std::vector<Eigen::Vector3d>& camera_points,
                                              const ImageSize& image) {
  std::vector<PixelProjection> out;
  out.reserve(camera_points.size());
  for (const Eigen::Vector3d& p : camera_points) out.push_back(project_to_image(rig, p, image));
  return out;
}

Eigen::Vector3d back_project(const CameraRig& rig, double u, double v, double depth) {
  if (!(depth > kEpsilonDepth)) {
    throw std::invalid_argument("back_project: depth must exceed " +
                                std::to_string(kEpsilonDepth));
  }
  const CameraRig::Intrinsic& p = rig.intrinsic();
  // Supported projection matrices have third row (0, 0, s, c): the
  // homogeneous scale is then an affine function of camera depth alone.
  if (std::abs(p(2, 0)) > 1e-12 || std::abs(p(2, 1)) > 1e-12 || std::abs(p(2, 2)) < 1e-12) {
    throw std::invalid_argument("back_project: projection matrix third row must be (0, 0, s, c)");
  }
  const double w = p(2, 2) * depth + p(2, 3);
  const Eigen::Matrix3d k = p.leftCols<3>();
  const Eigen::Vector3d rhs = w * Eigen::Vector3d(u, v, 1.0) - p.col(3);
  const Eigen::Vector3d camera_point = k.partialPivLu().solve(rhs);
  const Eigen::Vector4d ego = rig.extrinsic().inverse() * camera_point.homogeneous();
  return ego.head<3>();
}

}  // namespace voxelray
