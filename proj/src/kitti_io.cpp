// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelray/kitti_io.hpp"

#include "voxelray/formats.hpp"
#include "voxelray/geometry.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace voxelray {
namespace {

static_assert(std::endian::native == std::endian::little,
              "point cloud binaries assume a little-endian host");

constexpr double kRectOrthonormalTolerance = 1e-4;

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

double parse_number(std::string_view token, std::size_t line_number, std::size_t field_number,
                    const char* context) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  const std::from_chars_result result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw std::runtime_error(std::string(context) + " line " + std::to_string(line_number) +
                             ": field " + std::to_string(field_number) + " ('" +
                             std::string(token) + "') is not a number");
  }
  return value;
}

void fill_matrix(Eigen::Ref<Eigen::MatrixXd> matrix, const std::vector<double>& values) {
  // Calibration rows are stored row-major.
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      matrix(r, c) = values[static_cast<std::size_t>(r * matrix.cols() + c)];
    }
  }
}

void append_matrix(std::string& out, const Eigen::Ref<const Eigen::MatrixXd>& matrix) {
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      out += ' ';
      out += format_double(matrix(r, c));
    }
  }
}

Eigen::Matrix4d lift(const Eigen::Matrix3d& rotation) {
  Eigen::Matrix4d lifted = Eigen::Matrix4d::Identity();
  lifted.topLeftCorner<3, 3>() = rotation;
  return lifted;
}

Eigen::Matrix4d lift(const Eigen::Matrix<double, 3, 4>& transform) {
  Eigen::Matrix4d lifted = Eigen::Matrix4d::Identity();
  lifted.topRows<3>() = transform;
  return lifted;
}

// KITTI heading convention: rotation_y spins the box about the camera
// vertical, and the length axis of an unrotated box runs along camera x, so
// the heading direction in camera coordinates is (cos ry, 0, -sin ry).
Eigen::Vector3d heading_in_camera(double rotation_y) {
  return {std::cos(rotation_y), 0.0, -std::sin(rotation_y)};
}

}  // namespace

KittiCalibration parse_calibration(std::string_view text) {
  std::map<std::string, std::vector<double>, std::less<>> entries;
  const std::vector<std::string_view> lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = lines[n];
    if (line.empty()) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw std::runtime_error("calibration line " + std::to_string(n + 1) +
                               ": expected 'KEY: values'");
    }
    const std::string key(line.substr(0, colon));
    const std::vector<std::string_view> fields = split_fields(line.substr(colon + 1));
    std::vector<double> values;
    values.reserve(fields.size());
    for (std::size_t f = 0; f < fields.size(); ++f) {
      values.push_back(parse_number(fields[f], n + 1, f + 1, "calibration"));
    }
    if (!entries.emplace(key, std::move(values)).second) {
      throw std::runtime_error("calibration line " + std::to_string(n + 1) + ": duplicate key '" +
                               key + "'");
    }
  }

  const auto take = [&entries](const char* key, std::size_t count) -> const std::vector<double>& {
    const auto it = entries.find(key);
    if (it == entries.end()) {
      throw std::runtime_error(std::string("calibration: missing key '") + key + "'");
    }
    if (it->second.size() != count) {
      throw std::runtime_error(std::string("calibration: key '") + key + "' has " +
                               std::to_string(it->second.size()) + " values, expected " +
                               std::to_string(count));
    }
    return it->second;
  };

  KittiCalibration calibration;
  fill_matrix(calibration.p2, take("P2", 12));
  fill_matrix(calibration.p3, take("P3", 12));
  fill_matrix(calibration.r0_rect, take("R0_rect", 9));
  fill_matrix(calibration.tr_velo_to_cam, take("Tr_velo_to_cam", 12));

  const double orthonormality =
      (calibration.r0_rect.transpose() * calibration.r0_rect - Eigen::Matrix3d::Identity())
          .cwiseAbs()
          .maxCoeff();
  if (orthonormality > kRectOrthonormalTolerance) {
    throw std::runtime_error("calibration: R0_rect is not orthonormal (deviation " +
                             format_double(orthonormality) + ")");
  }
  return calibration;
}

std::string write_calibration(const KittiCalibration& calibration) {
  std::string out;
  out += "P2:";
  append_matrix(out, calibration.p2);
  out += "\nP3:";
  append_matrix(out, calibration.p3);
  out += "\nR0_rect:";
  append_matrix(out, calibration.r0_rect);
  out += "\nTr_velo_to_cam:";
  append_matrix(out, calibration.tr_velo_to_cam);
  out += '\n';
  return out;
}

std::vector<KittiLabel> parse_labels(std::string_view text) {
  std::vector<KittiLabel> labels;
  const std::vector<std::string_view> lines = split_lines(text);
  std::optional<bool> scored;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = lines[n];
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = split_fields(line);
    if (fields.size() != 15 && fields.size() != 16) {
      throw std::runtime_error("label line " + std::to_string(n + 1) + ": expected 15 or 16 "
                               "fields, got " + std::to_string(fields.size()));
    }
    const bool has_score = fields.size() == 16;
    if (scored.has_value() && *scored != has_score) {
      throw std::runtime_error("label line " + std::to_string(n + 1) +
                               ": mixes scored and unscored rows");
    }
    scored = has_score;

    const auto number = [&](std::size_t field) {
      return parse_number(fields[field], n + 1, field + 1, "label");
    };

    KittiLabel label;
    label.type = std::string(fields[0]);
    label.truncation = number(1);
    const double occlusion_raw = number(2);
    if (occlusion_raw != std::floor(occlusion_raw)) {
      throw std::runtime_error("label line " + std::to_string(n + 1) +
                               ": occlusion must be an integer");
    }
    label.occlusion = static_cast<int>(occlusion_raw);
    label.alpha = number(3);
    label.left = number(4);
    label.top = number(5);
    label.right = number(6);
    label.bottom = number(7);
    label.height = number(8);
    label.width = number(9);
    label.length = number(10);
    label.location = Eigen::Vector3d(number(11), number(12), number(13));
    label.rotation_y = number(14);
    if (has_score) label.score = number(15);

    // DontCare rows carry -1 placeholders; result rows conventionally use -1
    // for the fields the detector does not estimate. Everything else is
    // validated strictly.
    const bool placeholder_ok = label.type == "DontCare" || has_score;
    if (!placeholder_ok) {
      if (!(label.truncation >= 0.0 && label.truncation <= 1.0)) {
        throw std::runtime_error("label line " + std::to_string(n + 1) +
                                 ": truncation outside [0, 1]");
      }
      if (label.occlusion < 0 || label.occlusion > 3) {
        throw std::runtime_error("label line " + std::to_string(n + 1) +
                                 ": occlusion outside {0, 1, 2, 3}");
      }
    }
    if (label.type != "DontCare" &&
        !(label.height > 0.0 && label.width > 0.0 && label.length > 0.0)) {
      throw std::runtime_error("label line " + std::to_string(n + 1) +
                               ": dimensions must be positive");
    }
    labels.push_back(std::move(label));
  }
  return labels;
}

std::string write_labels(const std::vector<KittiLabel>& labels) {
  std::string out;
  for (const KittiLabel& label : labels) {
    out += label.type;
    out += ' ';
    out += format_double(label.truncation);
    out += ' ';
    out += std::to_string(label.occlusion);
    for (const double value : {label.alpha, label.left, label.top, label.right, label.bottom,
                               label.height, label.width, label.length, label.location.x(),
                               label.location.y(), label.location.z(), label.rotation_y}) {
      out += ' ';
      out += format_double(value);
    }
    if (label.score.has_value()) {
      out += ' ';
      out += format_double(*label.score);
    }
    out += '\n';
  }
  return out;
}

PointCloud parse_point_cloud(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() % 16 != 0) {
    throw std::runtime_error("point cloud: byte count " + std::to_string(bytes.size()) +
                             " is not a multiple of 16");
  }
  const std::size_t count = bytes.size() / 16;
  PointCloud cloud;
  cloud.points.reserve(count);
  cloud.intensity.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    float quad[4];
    std::memcpy(quad, bytes.data() + i * 16, 16);
    cloud.points.emplace_back(static_cast<double>(quad[0]), static_cast<double>(quad[1]),
                              static_cast<double>(quad[2]));
    cloud.intensity.push_back(static_cast<double>(quad[3]));
  }
  cloud.validate();
  return cloud;
}

std::vector<std::uint8_t> write_point_cloud(const PointCloud& cloud) {
  cloud.validate();
  std::vector<std::uint8_t> bytes(cloud.points.size() * 16);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const float quad[4] = {static_cast<float>(cloud.points[i].x()),
                           static_cast<float>(cloud.points[i].y()),
                           static_cast<float>(cloud.points[i].z()),
                           cloud.intensity.empty() ? 0.0f
                                                   : static_cast<float>(cloud.intensity[i])};
    std::memcpy(bytes.data() + i * 16, quad, 16);
  }
  return bytes;
}

PointCloud read_point_cloud_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error(path.string() + ": read failed");
  return parse_point_cloud(bytes);
}

void write_point_cloud_file(const std::filesystem::path& path, const PointCloud& cloud) {
  const std::vector<std::uint8_t> bytes = write_point_cloud(cloud);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

CameraRig rig_from_calibration(const KittiCalibration& calibration, CameraSide side) {
  const Eigen::Matrix4d extrinsic = lift(calibration.r0_rect) * lift(calibration.tr_velo_to_cam);
  const Eigen::Matrix<double, 3, 4>& intrinsic =
      side == CameraSide::kLeft ? calibration.p2 : calibration.p3;
  // A mirrored frame (the flip augmentation writes one) carries a reflected
  // sensor transform; the rotation block's determinant is the handedness.
  const int handedness = extrinsic.topLeftCorner<3, 3>().determinant() < 0.0 ? -1 : +1;
  return CameraRig(intrinsic, extrinsic, handedness);
}

Box3D box_from_label(const KittiLabel& label, const Eigen::Matrix4d& extrinsic) {
  if (!(label.height > 0.0 && label.width > 0.0 && label.length > 0.0)) {
    throw std::invalid_argument("box_from_label: non-positive dimensions (type '" + label.type +
                                "')");
  }
  const Eigen::Matrix3d rotation = extrinsic.topLeftCorner<3, 3>();
  const Eigen::Vector3d translation = extrinsic.topRightCorner<3, 1>();

  // The label stores the bottom-face center with the camera vertical pointing
  // down; move up (negative camera y) by half the height to reach the
  // volumetric center. This is the only place that shift happens.
  const Eigen::Vector3d center_camera =
      label.location + Eigen::Vector3d(0.0, -0.5 * label.height, 0.0);
  const Eigen::Vector3d center_ego = rotation.transpose() * (center_camera - translation);

  const Eigen::Vector3d heading_ego = rotation.transpose() * heading_in_camera(label.rotation_y);
  const double yaw = std::atan2(heading_ego.y(), heading_ego.x());
  return Box3D(center_ego, label.length, label.width, label.height, yaw);
}

KittiLabel label_from_box(const Box3D& box, const Eigen::Matrix4d& extrinsic,
                          const KittiLabel& base) {
  const Eigen::Matrix3d rotation = extrinsic.topLeftCorner<3, 3>();
  const Eigen::Vector3d translation = extrinsic.topRightCorner<3, 1>();

  const Eigen::Vector3d center_camera = rotation * box.center + translation;

  // Choose rotation_y so that decoding it through heading_in_camera and the
  // inverse rotation lands exactly back on the box heading. Solving
  // atan2-of-decoded-heading == yaw for ry gives a two-branch tangent
  // equation; pick the branch whose decoded heading points along the box
  // heading rather than against it. Projecting the heading into the camera
  // x-z plane and reading the angle there is only exact for mounts without
  // tilt or roll, and this must stay exact for any rigid mount.
  const double sin_yaw = std::sin(box.yaw);
  const double cos_yaw = std::cos(box.yaw);
  double ry = std::atan2(rotation(0, 0) * sin_yaw - rotation(0, 1) * cos_yaw,
                         rotation(2, 0) * sin_yaw - rotation(2, 1) * cos_yaw);
  const double decoded_x = rotation(0, 0) * std::cos(ry) - rotation(2, 0) * std::sin(ry);
  const double decoded_y = rotation(0, 1) * std::cos(ry) - rotation(2, 1) * std::sin(ry);
  if (decoded_x * cos_yaw + decoded_y * sin_yaw < 0.0) {
    ry = wrap_angle(ry + kPi);
  }

  KittiLabel label = base;
  label.height = box.height;
  label.width = box.width;
  label.length = box.length;
  label.location = center_camera + Eigen::Vector3d(0.0, 0.5 * box.height, 0.0);
  label.rotation_y = ry;
  return label;
}

}  // namespace voxelray
