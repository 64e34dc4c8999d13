// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "voxelray/geometry.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace voxelray {

// Calibration for one KITTI-style frame: rectified projection matrices for
// the left (P2) and right (P3) color cameras, the rectifying rotation, and
// the lidar-to-reference-camera transform. The lidar frame doubles as the
// ego frame throughout the library.
struct KittiCalibration {
  Eigen::Matrix<double, 3, 4> p2 = Eigen::Matrix<double, 3, 4>::Zero();
  Eigen::Matrix<double, 3, 4> p3 = Eigen::Matrix<double, 3, 4>::Zero();
  Eigen::Matrix3d r0_rect = Eigen::Matrix3d::Identity();
  Eigen::Matrix<double, 3, 4> tr_velo_to_cam = Eigen::Matrix<double, 3, 4>::Zero();
};

// Parses "KEY: v0 v1 ..." calibration text. P2, P3, R0_rect, and
// Tr_velo_to_cam are required; other keys (P0, P1, Tr_imu_to_velo, ...) are
// ignored. Throws std::runtime_error naming the line and field on malformed
// input, a missing key, or a rectifying rotation that is not orthonormal
// within 1e-4.
KittiCalibration parse_calibration(std::string_view text);
std::string write_calibration(const KittiCalibration& calibration);

struct KittiLabel {
  std::string type;        // object class, e.g. "Car"; "DontCare" for void regions
  double truncation = 0.0; // [0, 1]; -1 on DontCare rows
  int occlusion = 0;       // 0..3; -1 on DontCare rows
  double alpha = 0.0;      // observation angle, rad
  double left = 0.0, top = 0.0, right = 0.0, bottom = 0.0;  // image box, px
  double height = 0.0, width = 0.0, length = 0.0;           // m
  Eigen::Vector3d location = Eigen::Vector3d::Zero();  // camera frame, bottom face center
  double rotation_y = 0.0;                             // heading about the camera vertical, rad
  std::optional<double> score;                         // present in result files only
};

// Parses label text: 15 whitespace-separated fields per line, or 16 when a
// trailing score is present (all lines must agree). Throws
// std::runtime_error naming line and field on malformed rows, wrong field
// counts, or out-of-range truncation/occlusion/dimensions (DontCare rows may
// carry -1 placeholders).
std::vector<KittiLabel> parse_labels(std::string_view text);
std::string write_labels(const std::vector<KittiLabel>& labels);

// Point cloud binary format: little-endian float32 quadruples
// (x, y, z, reflectance). The byte count must be a multiple of 16;
// reflectance is kept as the cloud's intensity channel.
PointCloud parse_point_cloud(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> write_point_cloud(const PointCloud& cloud);
PointCloud read_point_cloud_file(const std::filesystem::path& path);
void write_point_cloud_file(const std::filesystem::path& path, const PointCloud& cloud);

enum class CameraSide { kLeft, kRight };

// Rig for one camera: intrinsic P2 or P3, extrinsic the rectified
// lidar-to-camera transform (R0_rect composed with Tr_velo_to_cam).
CameraRig rig_from_calibration(const KittiCalibration& calibration, CameraSide side);

// Converts a label's camera-frame box (bottom-face center, ry about the
// camera vertical) to an ego-frame Box3D (volumetric center, yaw about the
// ego up-axis), using the given ego-to-camera transform. Half the height is
// added exactly once, here. Throws std::invalid_argument on non-positive
// dimensions (e.g. DontCare rows).
Box3D box_from_label(const KittiLabel& label, const Eigen::Matrix4d& extrinsic);

// Inverse of box_from_label. Fields that a Box3D does not carry (class,
// truncation, image box, alpha, score, ...) are copied from `base`.
// box_from_label(label_from_box(b, T, base), T) reproduces b to floating
// round-off.
KittiLabel label_from_box(const Box3D& box, const Eigen::Matrix4d& extrinsic,
                          const KittiLabel& base);

}  // namespace voxelray
