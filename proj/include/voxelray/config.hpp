// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "voxelray/geometry.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace voxelray {

struct EncoderConfig {
  int size = 64;
  double x_first = 0.0;
  double x_last = 64.8;
  double sigma = 1.0;
};

// Run parameters shared by the command-line tools. Defaults describe a
// forward-facing detection area of 64 m x 80 m x 6.4 m at 0.4 m resolution
// and a 1248 x 352 camera.
struct RunConfig {
  Eigen::Vector3d grid_origin{0.0, -40.0, -3.0};
  Eigen::Vector3d voxel_size{0.4, 0.4, 0.4};
  Eigen::Vector3i grid_dims{160, 200, 16};

  int image_width = 1248;
  int image_height = 352;

  EncoderConfig query_encoder{64, 0.0, 64.8, 1.0};
  EncoderConfig orientation_encoder{64, -0.9, 0.9, 0.1};

  double rotation_min = -kPi / 4.0;  // world-rotation sampling range, rad
  double rotation_max = kPi / 4.0;
  bool flip = false;                 // horizontal world flip in `augment`

  Eigen::Vector3d sensor_origin{0.0, 0.0, 0.0};

  bool attention_softmax = false;

  double eval_iou_threshold = 0.7;
  double anchor_positive_threshold = 0.6;
  double anchor_negative_threshold = 0.45;
  bool force_best_anchor = true;

  std::uint64_t seed = 0;
};

// Key/value config text: one "key = value" per line, '#' comments, blank
// lines ignored. Vectors are space-separated ("grid_origin = 0 -40 -3").
// Unknown keys, duplicate keys, malformed values, and out-of-range settings
// all raise std::runtime_error naming the offending line. Keys not present
// keep their defaults.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string write_run_config(const RunConfig& config);

}  // namespace voxelray
