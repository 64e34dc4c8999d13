// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Subcommands cover the library surface end to end:
//
//   encode          depth/orientation encodings and their dot products, CSV
//   project         voxel centers through a camera calibration, CSV
//   occupancy       visibility labels for a point cloud, OCC1 container
//   attention-demo  image-to-voxel feature transfer, VXF1 container + CSV
//   augment         world rotation / flip of a calibrated frame, KITTI files
//   eval            detection AP against ground-truth labels, text table
//   selfcheck       fixed-seed consistency suite, one line per check
//
// Every number is printed in shortest round-trip form so output files diff
// cleanly between runs and hosts. All failures exit 1 with "error: ...".

#include "voxelray/attention.hpp"
#include "voxelray/config.hpp"
#include "voxelray/encoding.hpp"
#include "voxelray/eval.hpp"
#include "voxelray/formats.hpp"
#include "voxelray/geometry.hpp"
#include "voxelray/kitti_io.hpp"
#include "voxelray/occupancy.hpp"
#include "voxelray/selfcheck.hpp"
#include "voxelray/voxel_grid.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace vx = voxelray;
namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string output_dir = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

vx::RunConfig load_config(const GlobalOptions& global) {
  vx::RunConfig config;
  if (!global.config_path.empty()) config = vx::load_run_config(global.config_path);
  if (global.seed) config.seed = *global.seed;
  return config;
}

fs::path prepare_output_dir(const GlobalOptions& global) {
  fs::path dir(global.output_dir);
  fs::create_directories(dir);
  return dir;
}

vx::VoxelGrid grid_from(const vx::RunConfig& config) {
  return vx::VoxelGrid(config.grid_origin, config.voxel_size, config.grid_dims);
}

vx::GaussianEncoder encoder_from(const vx::EncoderConfig& e) {
  return vx::GaussianEncoder(e.size, e.x_first, e.x_last, e.sigma);
}

vx::CameraRig load_rig(const std::string& calib_path, const std::string& camera) {
  const vx::KittiCalibration calibration =
      vx::parse_calibration(vx::read_text_file(calib_path));
  const vx::CameraSide side = camera == "right" ? vx::CameraSide::kRight : vx::CameraSide::kLeft;
  return vx::rig_from_calibration(calibration, side);
}

// Same stream as the library's fixed-seed checks: stdlib distributions are
// not pinned across implementations, this is.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

std::string join_csv(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ',';
    row += cells[i];
  }
  return row;
}

// ---- encode ----

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> values;
  std::istringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    std::size_t used = 0;
    values.push_back(std::stod(item, &used));
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw std::runtime_error("bad value list entry '" + item + "'");
  }
  if (values.empty()) throw std::runtime_error("empty value list");
  return values;
}

std::vector<double> parse_range(const std::string& text) {
  // first:last:count, endpoints included
  std::istringstream stream(text);
  std::string first_s, last_s, count_s;
  if (!std::getline(stream, first_s, ':') || !std::getline(stream, last_s, ':') ||
      !std::getline(stream, count_s)) {
    throw std::runtime_error("range must be first:last:count");
  }
  const double first = std::stod(first_s);
  const double last = std::stod(last_s);
  const int count = std::stoi(count_s);
  if (count < 2) throw std::runtime_error("range count must be at least 2");
  std::vector<double> values(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    values[static_cast<std::size_t>(i)] = first + (last - first) * i / (count - 1);
  }
  return values;
}

int run_encode(const GlobalOptions& global, const std::string& encoder_name,
               const std::string& values_text, const std::string& range_text) {
  const vx::RunConfig config = load_config(global);
  const fs::path out_dir = prepare_output_dir(global);
  if (values_text.empty() == range_text.empty()) {
    throw std::runtime_error("pass exactly one of --values or --range");
  }
  const std::vector<double> values =
      values_text.empty() ? parse_range(range_text) : parse_value_list(values_text);

  const vx::GaussianEncoder encoder = encoder_from(
      encoder_name == "orientation" ? config.orientation_encoder : config.query_encoder);

  std::vector<vx::Encoding> encodings;
  encodings.reserve(values.size());
  for (const double value : values) encodings.push_back(encoder.encode(value));

  std::string encodings_csv;
  {
    std::vector<std::string> header{"value"};
    for (int c = 0; c < encoder.size(); ++c) header.push_back("c" + std::to_string(c));
    encodings_csv += join_csv(header) + "\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::vector<std::string> row{vx::format_double(values[i])};
      for (const double coefficient : encodings[i]) row.push_back(vx::format_double(coefficient));
      encodings_csv += join_csv(row) + "\n";
    }
  }
  const fs::path encodings_path = out_dir / "encodings.csv";
  vx::write_text_file(encodings_path, encodings_csv);

  std::string similarity_csv;
  for (std::size_t i = 0; i < encodings.size(); ++i) {
    std::vector<std::string> row;
    for (std::size_t j = 0; j < encodings.size(); ++j) {
      row.push_back(vx::format_double(vx::similarity(encodings[i], encodings[j])));
    }
    similarity_csv += join_csv(row) + "\n";
  }
  const fs::path similarity_path = out_dir / "similarity.csv";
  vx::write_text_file(similarity_path, similarity_csv);

  std::cout << "encoded " << values.size() << " values into " << encoder.size()
            << " channels\n";
  std::cout << "wrote " << encodings_path.string() << "\n";
  std::cout << "wrote " << similarity_path.string() << "\n";
  return 0;
}

// ---- project ----

int run_project(const GlobalOptions& global, const std::string& calib_path,
                const std::string& camera) {
  const vx::RunConfig config = load_config(global);
  const fs::path out_dir = prepare_output_dir(global);
  const vx::CameraRig rig = load_rig(calib_path, camera);
  const vx::VoxelGrid grid = grid_from(config);
  const vx::ImageSize image{config.image_width, config.image_height};

  const std::vector<Eigen::Vector3d> centers = vx::voxel_centers(grid);
  std::vector<Eigen::Vector3d> camera_points;
  camera_points.reserve(centers.size());
  for (const Eigen::Vector3d& center : centers) {
    camera_points.push_back(vx::ego_to_camera(rig, center));
  }
  const std::vector<vx::PixelProjection> pixels = vx::project_to_image(rig, camera_points, image);

  std::string csv = "index,u,v,depth,valid\n";
  std::size_t valid = 0;
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const vx::PixelProjection& pixel = pixels[i];
    valid += pixel.valid;
    csv += join_csv({std::to_string(i), vx::format_double(pixel.u), vx::format_double(pixel.v),
                     vx::format_double(pixel.depth), pixel.valid ? "1" : "0"}) +
           "\n";
  }
  const fs::path csv_path = out_dir / "projection.csv";
  vx::write_text_file(csv_path, csv);

  std::cout << "projected " << valid << " of " << pixels.size() << " voxel centers into "
            << image.width << "x" << image.height << "\n";
  std::cout << "wrote " << csv_path.string() << "\n";
  return 0;
}

// ---- occupancy ----

int run_occupancy(const GlobalOptions& global, const std::string& cloud_path, bool naive) {
  const vx::RunConfig config = load_config(global);
  const fs::path out_dir = prepare_output_dir(global);
  const vx::VoxelGrid grid = grid_from(config);
  const vx::PointCloud cloud = vx::parse_point_cloud(vx::read_binary_file(cloud_path));

  const vx::OccupancyLabelGrid labels =
      naive ? vx::label_occupancy_naive(grid, cloud)
            : vx::label_occupancy(grid, cloud, vx::SensorOrigin{config.sensor_origin},
                                  global.threads);

  const fs::path occ_path = out_dir / "occupancy.occ";
  vx::write_occupancy(occ_path, labels);

  std::cout << "occupied=" << labels.count(vx::OccupancyLabel::kOccupied)
            << " free=" << labels.count(vx::OccupancyLabel::kFree)
            << " unknown=" << labels.count(vx::OccupancyLabel::kUnknown) << "\n";
  std::cout << "wrote " << occ_path.string() << "\n";
  return 0;
}

// ---- attention-demo ----

int run_attention_demo(const GlobalOptions& global, const std::string& keys_path,
                       const std::string& values_path, const std::string& calib_path,
                       const std::string& camera, bool softmax) {
  const vx::RunConfig config = load_config(global);
  const fs::path out_dir = prepare_output_dir(global);
  const vx::FeatureMap keys = vx::read_feature_map(keys_path);
  const vx::FeatureMap values = vx::read_feature_map(values_path);
  const vx::VoxelGrid grid = grid_from(config);
  const vx::GaussianEncoder encoder = encoder_from(config.query_encoder);

  // The calibration is expressed at full camera resolution; rescale it to
  // the key map so projected pixel coordinates index the map directly.
  const vx::CameraRig full = load_rig(calib_path, camera);
  const double scale_u = static_cast<double>(keys.width()) / config.image_width;
  const double scale_v = static_cast<double>(keys.height()) / config.image_height;
  const vx::CameraRig rig(vx::scale_intrinsic(full.intrinsic(), scale_u, scale_v),
                          full.extrinsic(), full.handedness());

  vx::AttentionOptions options;
  options.softmax_over_ray = softmax || config.attention_softmax;
  options.threads = global.threads;
  const vx::AttentionResult result = vx::local_ray_attention(keys, values, grid, rig, encoder,
                                                             options);

  const fs::path features_path = out_dir / "features.vxf";
  vx::write_voxel_features(features_path, result.features);

  std::string csv = "index,u,v,depth,weight,valid\n";
  std::size_t in_view = 0;
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const vx::VoxelAttentionRecord& record = result.records[i];
    in_view += record.valid;
    csv += join_csv({std::to_string(i), vx::format_double(record.u), vx::format_double(record.v),
                     vx::format_double(record.depth), vx::format_double(record.weight),
                     record.valid ? "1" : "0"}) +
           "\n";
  }
  const fs::path weights_path = out_dir / "weights.csv";
  vx::write_text_file(weights_path, csv);

  std::cout << "voxels_in_view=" << in_view << " of " << result.records.size() << "\n";
  std::cout << "wrote " << features_path.string() << "\n";
  std::cout << "wrote " << weights_path.string() << "\n";
  return 0;
}

// ---- augment ----

Eigen::Matrix4d lift_rows(const Eigen::Matrix<double, 3, 4>& top) {
  Eigen::Matrix4d lifted = Eigen::Matrix4d::Identity();
  lifted.topRows<3>() = top;
  return lifted;
}

int run_augment(const GlobalOptions& global, const std::string& calib_path,
                const std::string& labels_path, const std::string& cloud_path,
                const std::string& camera, std::optional<double> theta_option,
                std::optional<bool> flip_option) {
  const vx::RunConfig config = load_config(global);
  const fs::path out_dir = prepare_output_dir(global);
  const bool flip = flip_option.value_or(config.flip);

  vx::KittiCalibration calibration = vx::parse_calibration(vx::read_text_file(calib_path));
  const vx::CameraSide side = camera == "right" ? vx::CameraSide::kRight : vx::CameraSide::kLeft;
  const vx::CameraRig rig = vx::rig_from_calibration(calibration, side);
  const double delta_before = vx::orientation_delta(rig).radians;

  double theta = 0.0;
  if (theta_option) {
    theta = *theta_option;
  } else {
    SplitMix64 rng{config.seed};
    theta = config.rotation_min + (config.rotation_max - config.rotation_min) * rng.uniform();
  }

  // The flip happens first, in the unrotated world; the rotation then acts
  // on the flipped scene. The rig transforms compose on the extrinsic in
  // the same order. The calibration is rewritten by applying the identical
  // right-hand factors to the sensor-to-camera block alone: the rectifying
  // rotation never changes, so at theta == 0 with no flip the factors are
  // the exact identity and the rewritten file matches the input byte for
  // byte.
  Eigen::Matrix4d sensor_to_cam = lift_rows(calibration.tr_velo_to_cam);
  if (flip) {
    sensor_to_cam.col(1) = -sensor_to_cam.col(1);
    calibration.p2 = vx::mirror_intrinsic(calibration.p2, config.image_width);
    calibration.p3 = vx::mirror_intrinsic(calibration.p3, config.image_width);
  }
  Eigen::Matrix4d unrotate = Eigen::Matrix4d::Identity();
  unrotate.topLeftCorner<3, 3>() = vx::rotation_about_up(-theta);
  sensor_to_cam = sensor_to_cam * unrotate;
  calibration.tr_velo_to_cam = sensor_to_cam.topRows<3>();

  const fs::path calib_out = out_dir / "calib.txt";
  vx::write_text_file(calib_out, vx::write_calibration(calibration));

  // Camera-frame label fields are invariant under both operations by
  // construction: the compensated extrinsic keeps every camera coordinate
  // fixed. Only the image box moves, mirrored by the flip.
  if (!labels_path.empty()) {
    std::vector<vx::KittiLabel> labels = vx::parse_labels(vx::read_text_file(labels_path));
    if (flip) {
      for (vx::KittiLabel& label : labels) {
        const double left = label.left;
        label.left = static_cast<double>(config.image_width - 1) - label.right;
        label.right = static_cast<double>(config.image_width - 1) - left;
      }
    }
    const fs::path labels_out = out_dir / "labels.txt";
    vx::write_text_file(labels_out, vx::write_labels(labels));
    std::cout << "wrote " << labels_out.string() << "\n";
  }

  if (!cloud_path.empty()) {
    vx::PointCloud cloud = vx::parse_point_cloud(vx::read_binary_file(cloud_path));
    const Eigen::Matrix3d rotate = vx::rotation_about_up(theta);
    for (Eigen::Vector3d& point : cloud.points) {
      if (flip) point.y() = -point.y();
      point = rotate * point;
    }
    const fs::path cloud_out = out_dir / "cloud.bin";
    vx::write_binary_file(cloud_out, vx::write_point_cloud(cloud));
    std::cout << "wrote " << cloud_out.string() << "\n";
  }

  const vx::CameraRig rig_after =
      vx::rig_from_calibration(vx::parse_calibration(vx::write_calibration(calibration)), side);
  const double delta_after = vx::orientation_delta(rig_after).radians;

  std::cout << "theta=" << vx::format_double(theta) << " flip=" << (flip ? 1 : 0) << "\n";
  std::cout << "delta_before=" << vx::format_double(delta_before) << "\n";
  std::cout << "delta_after=" << vx::format_double(delta_after) << "\n";
  std::cout << "wrote " << calib_out.string() << "\n";
  return 0;
}

// ---- eval ----

struct FramePair {
  std::string name;
  fs::path ground_truth;  // empty when absent
  fs::path detections;    // empty when absent
};

std::map<std::string, fs::path> label_files(const fs::path& root) {
  std::map<std::string, fs::path> files;
  if (fs::is_directory(root)) {
    for (const fs::directory_entry& entry : fs::directory_iterator(root)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        files[entry.path().stem().string()] = entry.path();
      }
    }
  } else {
    files[root.stem().string()] = root;
  }
  return files;
}

// Fixed evaluation frame: forward, left, up from the camera's depth, left,
// and up axes. A rigid relabeling of coordinates, so overlaps computed here
// equal overlaps computed in the camera frame.
Eigen::Matrix4d evaluation_mount() {
  Eigen::Matrix4d extrinsic = Eigen::Matrix4d::Identity();
  extrinsic.topLeftCorner<3, 3>() << 0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0;
  return extrinsic;
}

bool counts_for_class(const std::string& type, const std::string& evaluated) {
  return type == evaluated;
}

// Neighbor classes are close enough that hitting one should not cost
// precision: their boxes join the ignore list instead of the target list.
bool neighbor_of_class(const std::string& type, const std::string& evaluated) {
  if (evaluated == "Car") return type == "Van";
  if (evaluated == "Pedestrian") return type == "Person_sitting";
  return false;
}

int run_eval(const GlobalOptions& global, const std::string& gt_path, const std::string& det_path,
             const std::string& evaluated_class) {
  const vx::RunConfig config = load_config(global);
  const std::map<std::string, fs::path> gt_files = label_files(fs::path(gt_path));
  const std::map<std::string, fs::path> det_files = label_files(fs::path(det_path));

  std::vector<FramePair> frames;
  for (const auto& [name, path] : gt_files) {
    FramePair pair{name, path, {}};
    const auto det = det_files.find(name);
    if (det != det_files.end()) pair.detections = det->second;
    frames.push_back(std::move(pair));
  }
  for (const auto& [name, path] : det_files) {
    if (!gt_files.count(name)) frames.push_back({name, {}, path});
  }
  std::sort(frames.begin(), frames.end(),
            [](const FramePair& a, const FramePair& b) { return a.name < b.name; });
  if (frames.empty()) throw std::runtime_error("no label files found");

  const Eigen::Matrix4d mount = evaluation_mount();
  const std::vector<vx::Difficulty> difficulties{
      vx::Difficulty::kEasy, vx::Difficulty::kModerate, vx::Difficulty::kHard};

  std::printf("class=%s frames=%zu iou=%.2f\n", evaluated_class.c_str(), frames.size(),
              config.eval_iou_threshold);
  std::printf("%-10s %8s %8s\n", "difficulty", "ap_3d", "ap_bev");

  const char* difficulty_names[] = {"easy", "moderate", "hard"};
  for (std::size_t d = 0; d < difficulties.size(); ++d) {
    const vx::Difficulty difficulty = difficulties[d];
    std::vector<std::vector<vx::GroundTruth>> truths;
    std::vector<std::vector<vx::Detection>> detections;
    truths.reserve(frames.size());
    detections.reserve(frames.size());

    for (const FramePair& frame : frames) {
      std::vector<vx::GroundTruth> frame_truths;
      if (!frame.ground_truth.empty()) {
        for (const vx::KittiLabel& label :
             vx::parse_labels(vx::read_text_file(frame.ground_truth))) {
          if (label.type == "DontCare") continue;  // no 3D box to compare against
          const bool counted = counts_for_class(label.type, evaluated_class);
          const bool neighbor = neighbor_of_class(label.type, evaluated_class);
          if (!counted && !neighbor) continue;
          const double height_px = label.bottom - label.top;
          const bool in_difficulty =
              vx::within_difficulty(height_px, label.occlusion, label.truncation, difficulty);
          vx::GroundTruth truth{vx::box_from_label(label, mount), evaluated_class,
                                neighbor || !in_difficulty};
          frame_truths.push_back(std::move(truth));
        }
      }
      std::vector<vx::Detection> frame_detections;
      if (!frame.detections.empty()) {
        for (const vx::KittiLabel& label :
             vx::parse_labels(vx::read_text_file(frame.detections))) {
          if (!counts_for_class(label.type, evaluated_class)) continue;
          if (!label.score) throw std::runtime_error("detection row without a score in " +
                                                     frame.detections.string());
          // Boxes too small on screen for this difficulty are screened out
          // the same way ground truth is, so they cannot count as false
          // positives against it.
          if (!vx::within_difficulty(label.bottom - label.top, 0, 0.0, difficulty)) continue;
          frame_detections.push_back(
              {vx::box_from_label(label, mount), *label.score, evaluated_class});
        }
      }
      truths.push_back(std::move(frame_truths));
      detections.push_back(std::move(frame_detections));
    }

    vx::EvalConfig eval_3d;
    eval_3d.iou_threshold = config.eval_iou_threshold;
    eval_3d.mode = vx::IouMode::k3d;
    vx::EvalConfig eval_bev = eval_3d;
    eval_bev.mode = vx::IouMode::kBev;
    const double ap_3d = vx::average_precision(detections, truths, eval_3d);
    const double ap_bev = vx::average_precision(detections, truths, eval_bev);
    std::printf("%-10s %8.2f %8.2f\n", difficulty_names[d], ap_3d, ap_bev);
  }
  return 0;
}

// ---- selfcheck ----

int run_selfcheck_command(const GlobalOptions& global) {
  const std::vector<vx::CheckResult> results = vx::run_selfcheck(global.threads);
  std::size_t failed = 0;
  for (const vx::CheckResult& result : results) {
    if (result.passed) {
      std::cout << "ok " << result.name << ": " << result.detail << "\n";
    } else {
      ++failed;
      std::cout << "FAIL " << result.name << ": " << result.detail << "\n";
    }
  }
  std::cout << "selfcheck: " << (results.size() - failed) << " passed, " << failed
            << " failed\n";
  return static_cast<int>(failed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic camera-to-voxel geometry toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--config", global.config_path, "run configuration file (key = value lines)");
  app.add_option("--output", global.output_dir, "output directory")->capture_default_str();
  app.add_option("--threads", global.threads, "worker thread count")->capture_default_str()
      ->check(CLI::PositiveNumber);
  std::uint64_t seed_value = 0;
  CLI::Option* seed_option =
      app.add_option("--seed", seed_value, "override the configured random seed");

  // encode
  std::string encoder_name = "query";
  std::string values_text;
  std::string range_text;
  CLI::App* encode = app.add_subcommand("encode", "write encodings and their dot products");
  encode->add_option("--encoder", encoder_name, "query or orientation")->capture_default_str()
      ->check(CLI::IsMember({"query", "orientation"}));
  encode->add_option("--values", values_text, "comma-separated values to encode");
  encode->add_option("--range", range_text, "first:last:count sweep to encode");

  // project
  std::string calib_path;
  std::string camera = "left";
  CLI::App* project = app.add_subcommand("project", "project voxel centers through a camera");
  project->add_option("--calib", calib_path, "camera calibration file")->required();
  project->add_option("--camera", camera, "left or right")->capture_default_str()
      ->check(CLI::IsMember({"left", "right"}));

  // occupancy
  std::string cloud_path;
  bool naive = false;
  CLI::App* occupancy = app.add_subcommand("occupancy", "label voxels from a point cloud");
  occupancy->add_option("--cloud", cloud_path, "point cloud .bin file")->required();
  occupancy->add_flag("--naive", naive, "mark everything without a return free");

  // attention-demo
  std::string keys_path;
  std::string values_path;
  std::string attention_calib;
  std::string attention_camera = "left";
  bool softmax = false;
  CLI::App* attention =
      app.add_subcommand("attention-demo", "transfer image features into the voxel grid");
  attention->add_option("--keys", keys_path, "depth-key feature map (.fmp)")->required();
  attention->add_option("--values", values_path, "value feature map (.fmp)")->required();
  attention->add_option("--calib", attention_calib, "camera calibration file")->required();
  attention->add_option("--camera", attention_camera, "left or right")->capture_default_str()
      ->check(CLI::IsMember({"left", "right"}));
  attention->add_flag("--softmax", softmax, "normalize weights per pixel before weighting");

  // augment
  std::string augment_calib;
  std::string augment_labels;
  std::string augment_cloud;
  std::string augment_camera = "left";
  double theta_value = 0.0;
  bool flip = false;
  CLI::App* augment =
      app.add_subcommand("augment", "rotate or flip a calibrated frame about the up axis");
  augment->add_option("--calib", augment_calib, "camera calibration file")->required();
  augment->add_option("--labels", augment_labels, "object label file");
  augment->add_option("--cloud", augment_cloud, "point cloud .bin file");
  augment->add_option("--camera", augment_camera, "left or right")->capture_default_str()
      ->check(CLI::IsMember({"left", "right"}));
  CLI::Option* theta_option =
      augment->add_option("--theta", theta_value, "rotation angle, rad (default: sampled)");
  CLI::Option* flip_option = augment->add_flag(
      "--flip,!--no-flip", flip, "mirror the world across the forward axis (default: configured)");

  // eval
  std::string gt_path;
  std::string det_path;
  std::string evaluated_class = "Car";
  CLI::App* eval = app.add_subcommand("eval", "average precision of detections against labels");
  eval->add_option("--gt", gt_path, "ground-truth label file or directory")->required();
  eval->add_option("--det", det_path, "detection label file or directory")->required();
  eval->add_option("--class", evaluated_class, "object class to evaluate")->capture_default_str();

  // selfcheck
  CLI::App* selfcheck = app.add_subcommand("selfcheck", "run the consistency suite");

  CLI11_PARSE(app, argc, argv);
  if (seed_option->count()) global.seed = seed_value;

  try {
    if (encode->parsed()) return run_encode(global, encoder_name, values_text, range_text);
    if (project->parsed()) return run_project(global, calib_path, camera);
    if (occupancy->parsed()) return run_occupancy(global, cloud_path, naive);
    if (attention->parsed()) {
      return run_attention_demo(global, keys_path, values_path, attention_calib,
                                attention_camera, softmax);
    }
    if (augment->parsed()) {
      std::optional<double> theta;
      if (theta_option->count()) theta = theta_value;
      std::optional<bool> flip_setting;
      if (flip_option->count()) flip_setting = flip;
      return run_augment(global, augment_calib, augment_labels, augment_cloud, augment_camera,
                         theta, flip_setting);
    }
    if (eval->parsed()) return run_eval(global, gt_path, det_path, evaluated_class);
    if (selfcheck->parsed()) return run_selfcheck_command(global);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
