// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0
//
// Python bindings for the main library operations. Feature maps cross the
// boundary as (height, width, channels) float64 arrays; everything else maps
// onto plain classes. All functions copy their inputs; nothing aliases numpy
// memory.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

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

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace py = pybind11;
using namespace voxelray;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

FeatureMap map_from_array(const DoubleArray& array) {
  if (array.ndim() != 3) {
    throw std::invalid_argument("feature map must have shape (height, width, channels)");
  }
  FeatureMap map(static_cast<int>(array.shape(0)), static_cast<int>(array.shape(1)),
                 static_cast<int>(array.shape(2)));
  std::copy_n(array.data(), map.values().size(), map.values().data());
  return map;
}

py::array_t<double> array_from_map(const FeatureMap& map) {
  py::array_t<double> out({map.height(), map.width(), map.channels()});
  std::copy_n(map.values().data(), map.values().size(), out.mutable_data());
  return out;
}

PointCloud cloud_from_arrays(const DoubleArray& points, const DoubleArray& intensity) {
  if (points.ndim() != 2 || points.shape(1) != 3) {
    throw std::invalid_argument("points must have shape (n, 3)");
  }
  PointCloud cloud;
  const py::ssize_t n = points.shape(0);
  cloud.points.reserve(static_cast<std::size_t>(n));
  for (py::ssize_t i = 0; i < n; ++i) {
    cloud.points.emplace_back(points.at(i, 0), points.at(i, 1), points.at(i, 2));
  }
  if (intensity.size() > 0) {
    if (intensity.ndim() != 1 || intensity.shape(0) != n) {
      throw std::invalid_argument("intensity must have shape (n,)");
    }
    cloud.intensity.assign(intensity.data(), intensity.data() + n);
  }
  cloud.validate();
  return cloud;
}

py::array_t<double> points_array(const PointCloud& cloud) {
  py::array_t<double> out({static_cast<py::ssize_t>(cloud.points.size()), py::ssize_t(3)});
  auto view = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < view.shape(0); ++i) {
    const Eigen::Vector3d& p = cloud.points[static_cast<std::size_t>(i)];
    view(i, 0) = p.x();
    view(i, 1) = p.y();
    view(i, 2) = p.z();
  }
  return out;
}

py::array_t<std::uint8_t> labels_array(const OccupancyLabelGrid& grid) {
  py::array_t<std::uint8_t> out(static_cast<py::ssize_t>(grid.labels.size()));
  std::copy_n(grid.labels.data(), grid.labels.size(), out.mutable_data());
  return out;
}

py::array_t<double> voxel_values_array(const VoxelFeatures& features) {
  const py::ssize_t count =
      features.channels > 0
          ? static_cast<py::ssize_t>(features.values.size()) / features.channels
          : 0;
  py::array_t<double> out({count, static_cast<py::ssize_t>(features.channels)});
  std::copy_n(features.values.data(), features.values.size(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_voxelray, m) {
  m.doc() = "deterministic camera-to-voxel geometry kernels";

  // ---- encoding ----

  py::class_<GaussianEncoder>(m, "GaussianEncoder")
      .def(py::init<int, double, double, double>(), py::arg("size"), py::arg("x_first"),
           py::arg("x_last"), py::arg("sigma"))
      .def_property_readonly("size", &GaussianEncoder::size)
      .def_property_readonly("delta_x", &GaussianEncoder::delta_x)
      .def_property_readonly("sigma", &GaussianEncoder::sigma)
      .def("sample_point", &GaussianEncoder::sample_point, py::arg("index"))
      .def("density", &GaussianEncoder::density, py::arg("x"), py::arg("mean"))
      .def("encode", &GaussianEncoder::encode, py::arg("value"));

  m.def(
      "similarity",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return similarity(a, b);
      },
      py::arg("a"), py::arg("b"), "dot product of two encodings");
  m.def("sinusoidal_encode", &sinusoidal_encode, py::arg("size"), py::arg("value"),
        py::arg("base_wavelength") = 10000.0);

  // ---- geometry ----

  m.def("wrap_angle", &wrap_angle, py::arg("radians"), "wrap to (-pi, pi]");
  m.def("rotation_about_up", &rotation_about_up, py::arg("theta"));

  py::class_<Box3D>(m, "Box3D")
      .def(py::init<const Eigen::Vector3d&, double, double, double, double>(),
           py::arg("center"), py::arg("length"), py::arg("width"), py::arg("height"),
           py::arg("yaw"))
      .def_readonly("center", &Box3D::center)
      .def_readonly("length", &Box3D::length)
      .def_readonly("width", &Box3D::width)
      .def_readonly("height", &Box3D::height)
      .def_readonly("yaw", &Box3D::yaw);

  py::class_<PointCloud>(m, "PointCloud")
      .def(py::init(&cloud_from_arrays), py::arg("points"),
           py::arg("intensity") = DoubleArray())
      .def_property_readonly("points", &points_array)
      .def_property_readonly("intensity",
                             [](const PointCloud& cloud) { return cloud.intensity; })
      .def("__len__", [](const PointCloud& cloud) { return cloud.points.size(); });

  py::class_<ImageSize>(m, "ImageSize")
      .def(py::init([](int width, int height) { return ImageSize{width, height}; }),
           py::arg("width"), py::arg("height"))
      .def_readonly("width", &ImageSize::width)
      .def_readonly("height", &ImageSize::height);

  py::class_<CameraRig>(m, "CameraRig")
      .def(py::init<const CameraRig::Intrinsic&, const Eigen::Matrix4d&, int>(),
           py::arg("intrinsic"), py::arg("extrinsic"), py::arg("handedness") = +1)
      .def_property_readonly("intrinsic", &CameraRig::intrinsic,
                             py::return_value_policy::copy)
      .def_property_readonly("extrinsic", &CameraRig::extrinsic,
                             py::return_value_policy::copy)
      .def_property_readonly("handedness", &CameraRig::handedness);

  py::class_<OrientationDelta>(m, "OrientationDelta")
      .def(py::init([](double radians) { return OrientationDelta{radians}; }),
           py::arg("radians"))
      .def_readonly("radians", &OrientationDelta::radians);

  m.def("orientation_delta", &orientation_delta, py::arg("rig"));

  py::class_<WorldRotationResult>(m, "WorldRotationResult")
      .def_readonly("rig", &WorldRotationResult::rig)
      .def_readonly("boxes", &WorldRotationResult::boxes)
      .def_property_readonly(
          "cloud", [](const WorldRotationResult& result) { return result.cloud; });

  py::class_<WorldFlipResult>(m, "WorldFlipResult")
      .def_readonly("rig", &WorldFlipResult::rig)
      .def_readonly("boxes", &WorldFlipResult::boxes)
      .def_property_readonly("cloud",
                             [](const WorldFlipResult& result) { return result.cloud; })
      .def_readonly("image_flip_required", &WorldFlipResult::image_flip_required);

  m.def("apply_world_rotation", &apply_world_rotation, py::arg("rig"), py::arg("boxes"),
        py::arg("cloud"), py::arg("theta"));
  m.def("apply_world_flip", &apply_world_flip, py::arg("rig"), py::arg("boxes"),
        py::arg("cloud"));
  m.def("mirror_intrinsic", &mirror_intrinsic, py::arg("intrinsic"), py::arg("image_width"));
  m.def("with_mirrored_intrinsic", &with_mirrored_intrinsic, py::arg("rig"),
        py::arg("image_width"));
  m.def("scale_intrinsic", &scale_intrinsic, py::arg("intrinsic"), py::arg("scale_u"),
        py::arg("scale_v"));

  m.def("ego_to_camera",
        py::overload_cast<const CameraRig&, const Eigen::Vector3d&>(&ego_to_camera),
        py::arg("rig"), py::arg("point"));

  py::class_<PixelProjection>(m, "PixelProjection")
      .def_readonly("u", &PixelProjection::u)
      .def_readonly("v", &PixelProjection::v)
      .def_readonly("depth", &PixelProjection::depth)
      .def_readonly("valid", &PixelProjection::valid);

  m.def("project_to_image",
        py::overload_cast<const CameraRig&, const Eigen::Vector3d&, const ImageSize&>(
            &project_to_image),
        py::arg("rig"), py::arg("camera_point"), py::arg("image"));
  m.def("back_project", &back_project, py::arg("rig"), py::arg("u"), py::arg("v"),
        py::arg("depth"));

  // ---- voxel grid ----

  py::class_<VoxelGrid>(m, "VoxelGrid")
      .def(py::init<const Eigen::Vector3d&, const Eigen::Vector3d&, const Eigen::Vector3i&>(),
           py::arg("origin"), py::arg("voxel_size"), py::arg("dims"))
      .def_readonly("origin", &VoxelGrid::origin)
      .def_readonly("voxel_size", &VoxelGrid::voxel_size)
      .def_readonly("dims", &VoxelGrid::dims)
      .def("voxel_count", &VoxelGrid::voxel_count)
      .def("linear_index", &VoxelGrid::linear_index, py::arg("i"), py::arg("j"), py::arg("k"))
      .def("index_of", &VoxelGrid::index_of, py::arg("linear"))
      .def("center",
           py::overload_cast<int, int, int>(&VoxelGrid::center, py::const_), py::arg("i"),
           py::arg("j"), py::arg("k"))
      .def("center", py::overload_cast<std::size_t>(&VoxelGrid::center, py::const_),
           py::arg("linear"))
      .def("voxel_of", &VoxelGrid::voxel_of, py::arg("point"))
      .def("contains", &VoxelGrid::contains, py::arg("point"));

  m.def("voxel_centers", &voxel_centers, py::arg("grid"));

  m.def(
      "bilinear_sample",
      [](const DoubleArray& map, double u, double v) {
        const SampleResult result = bilinear_sample(map_from_array(map), u, v);
        return py::make_tuple(py::cast(result.values), result.valid);
      },
      py::arg("map"), py::arg("u"), py::arg("v"),
      "returns (values, valid); values are zero when the sample is out of bounds");

  // ---- attention ----

  py::class_<VoxelAttentionRecord>(m, "VoxelAttentionRecord")
      .def_readonly("u", &VoxelAttentionRecord::u)
      .def_readonly("v", &VoxelAttentionRecord::v)
      .def_readonly("depth", &VoxelAttentionRecord::depth)
      .def_readonly("weight", &VoxelAttentionRecord::weight)
      .def_readonly("valid", &VoxelAttentionRecord::valid);

  py::class_<AttentionResult>(m, "AttentionResult")
      .def_property_readonly(
          "values",
          [](const AttentionResult& result) { return voxel_values_array(result.features); },
          "(voxel_count, channels) array in linear-index order")
      .def_property_readonly(
          "channels", [](const AttentionResult& result) { return result.features.channels; })
      .def_readonly("records", &AttentionResult::records);

  m.def(
      "local_ray_attention",
      [](const DoubleArray& depth_keys, const DoubleArray& image_values, const VoxelGrid& grid,
         const CameraRig& rig, const GaussianEncoder& query_encoder, bool softmax_over_ray,
         int threads) {
        AttentionOptions options;
        options.softmax_over_ray = softmax_over_ray;
        options.threads = threads;
        return local_ray_attention(map_from_array(depth_keys), map_from_array(image_values),
                                   grid, rig, query_encoder, options);
      },
      py::arg("depth_keys"), py::arg("image_values"), py::arg("grid"), py::arg("rig"),
      py::arg("query_encoder"), py::arg("softmax_over_ray") = false, py::arg("threads") = 1);

  m.def(
      "append_orientation_encoding",
      [](const DoubleArray& image_features, double delta_radians,
         const GaussianEncoder& encoder) {
        return array_from_map(append_orientation_encoding(
            map_from_array(image_features), OrientationDelta{delta_radians}, encoder));
      },
      py::arg("image_features"), py::arg("delta_radians"), py::arg("encoder"));

  // ---- occupancy ----

  py::class_<OccupancyLabelGrid>(m, "OccupancyLabelGrid")
      .def_property_readonly("labels", &labels_array,
                             "uint8 per voxel: 0 free, 1 occupied, 255 unknown")
      .def_readonly("grid", &OccupancyLabelGrid::grid)
      .def("count", [](const OccupancyLabelGrid& grid, int label) {
        return grid.count(static_cast<OccupancyLabel>(label));
      });

  m.def(
      "traverse_ray",
      [](const VoxelGrid& grid, const Eigen::Vector3d& origin, const Eigen::Vector3d& endpoint) {
        return traverse_ray(grid, SensorOrigin{origin}, endpoint);
      },
      py::arg("grid"), py::arg("origin"), py::arg("endpoint"),
      "linear indices of voxels with positive chord, origin first, endpoint voxel excluded");

  m.def(
      "label_occupancy",
      [](const VoxelGrid& grid, const PointCloud& cloud, const Eigen::Vector3d& origin,
         int threads) { return label_occupancy(grid, cloud, SensorOrigin{origin}, threads); },
      py::arg("grid"), py::arg("cloud"), py::arg("origin"), py::arg("threads") = 1);
  m.def("label_occupancy_naive", &label_occupancy_naive, py::arg("grid"), py::arg("cloud"));

  // ---- eval ----

  py::enum_<Difficulty>(m, "Difficulty")
      .value("EASY", Difficulty::kEasy)
      .value("MODERATE", Difficulty::kModerate)
      .value("HARD", Difficulty::kHard);

  py::enum_<IouMode>(m, "IouMode").value("BEV", IouMode::kBev).value("BOX_3D", IouMode::k3d);

  m.def("iou_bev_rotated", &iou_bev_rotated, py::arg("a"), py::arg("b"));
  m.def("iou_3d", &iou_3d, py::arg("a"), py::arg("b"));
  m.def("within_difficulty", &within_difficulty, py::arg("box_height_px"), py::arg("occlusion"),
        py::arg("truncation"), py::arg("difficulty"));

  py::enum_<AnchorAssignmentKind>(m, "AnchorAssignmentKind")
      .value("NEGATIVE", AnchorAssignmentKind::kNegative)
      .value("IGNORE", AnchorAssignmentKind::kIgnore)
      .value("POSITIVE", AnchorAssignmentKind::kPositive);

  py::class_<AnchorAssignment>(m, "AnchorAssignment")
      .def_readonly("kind", &AnchorAssignment::kind)
      .def_readonly("target", &AnchorAssignment::target);

  m.def("assign_anchors", &assign_anchors, py::arg("anchors"), py::arg("ground_truths"),
        py::arg("positive_threshold") = 0.6, py::arg("negative_threshold") = 0.45,
        py::arg("force_best_anchor") = true);

  py::class_<Detection>(m, "Detection")
      .def(py::init([](const Box3D& box, double score, const std::string& label) {
             return Detection{box, score, label};
           }),
           py::arg("box"), py::arg("score"), py::arg("label"))
      .def_readonly("box", &Detection::box)
      .def_readonly("score", &Detection::score)
      .def_readonly("label", &Detection::label);

  py::class_<GroundTruth>(m, "GroundTruth")
      .def(py::init([](const Box3D& box, const std::string& label, bool ignored) {
             return GroundTruth{box, label, ignored};
           }),
           py::arg("box"), py::arg("label"), py::arg("ignored") = false)
      .def_readonly("box", &GroundTruth::box)
      .def_readonly("label", &GroundTruth::label)
      .def_readonly("ignored", &GroundTruth::ignored);

  py::class_<EvalConfig>(m, "EvalConfig")
      .def(py::init([](double iou_threshold, IouMode mode, int recall_positions) {
             EvalConfig config;
             config.iou_threshold = iou_threshold;
             config.mode = mode;
             config.recall_positions = recall_positions;
             return config;
           }),
           py::arg("iou_threshold") = 0.7, py::arg("mode") = IouMode::k3d,
           py::arg("recall_positions") = 40)
      .def_readonly("iou_threshold", &EvalConfig::iou_threshold)
      .def_readonly("mode", &EvalConfig::mode)
      .def_readonly("recall_positions", &EvalConfig::recall_positions);

  m.def("average_precision", &average_precision, py::arg("detections_per_frame"),
        py::arg("ground_truths_per_frame"), py::arg("config") = EvalConfig{});

  // ---- kitti io ----

  py::class_<KittiCalibration>(m, "KittiCalibration")
      .def(py::init<>())
      .def_readwrite("p2", &KittiCalibration::p2)
      .def_readwrite("p3", &KittiCalibration::p3)
      .def_readwrite("r0_rect", &KittiCalibration::r0_rect)
      .def_readwrite("tr_velo_to_cam", &KittiCalibration::tr_velo_to_cam);

  py::class_<KittiLabel>(m, "KittiLabel")
      .def(py::init<>())
      .def_readwrite("type", &KittiLabel::type)
      .def_readwrite("truncation", &KittiLabel::truncation)
      .def_readwrite("occlusion", &KittiLabel::occlusion)
      .def_readwrite("alpha", &KittiLabel::alpha)
      .def_readwrite("left", &KittiLabel::left)
      .def_readwrite("top", &KittiLabel::top)
      .def_readwrite("right", &KittiLabel::right)
      .def_readwrite("bottom", &KittiLabel::bottom)
      .def_readwrite("height", &KittiLabel::height)
      .def_readwrite("width", &KittiLabel::width)
      .def_readwrite("length", &KittiLabel::length)
      .def_readwrite("location", &KittiLabel::location)
      .def_readwrite("rotation_y", &KittiLabel::rotation_y)
      .def_readwrite("score", &KittiLabel::score);

  py::enum_<CameraSide>(m, "CameraSide")
      .value("LEFT", CameraSide::kLeft)
      .value("RIGHT", CameraSide::kRight);

  m.def("parse_calibration", &parse_calibration, py::arg("text"));
  m.def("write_calibration", &write_calibration, py::arg("calibration"));
  m.def("parse_labels", &parse_labels, py::arg("text"));
  m.def("write_labels", &write_labels, py::arg("labels"));
  m.def(
      "parse_point_cloud",
      [](py::bytes data) {
        std::string_view view = data;
        std::vector<std::uint8_t> bytes(view.begin(), view.end());
        return parse_point_cloud(bytes);
      },
      py::arg("data"));
  m.def(
      "write_point_cloud",
      [](const PointCloud& cloud) {
        const std::vector<std::uint8_t> bytes = write_point_cloud(cloud);
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      py::arg("cloud"));
  m.def("rig_from_calibration", &rig_from_calibration, py::arg("calibration"), py::arg("side"));
  m.def("box_from_label", &box_from_label, py::arg("label"), py::arg("extrinsic"));
  m.def("label_from_box", &label_from_box, py::arg("box"), py::arg("extrinsic"),
        py::arg("base"));

  // ---- config and selfcheck ----

  py::class_<RunConfig>(m, "RunConfig").def(py::init<>());
  m.def("load_run_config", &load_run_config, py::arg("path"));

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("name", &CheckResult::name)
      .def_readonly("passed", &CheckResult::passed)
      .def_readonly("detail", &CheckResult::detail)
      .def("__repr__", [](const CheckResult& result) {
        return (result.passed ? "<check ok " : "<check FAIL ") + result.name + ">";
      });

  m.def("run_selfcheck", &run_selfcheck, py::arg("threads") = 1);
}
