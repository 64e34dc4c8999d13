// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "voxelray/encoding.hpp"
#include "voxelray/geometry.hpp"
#include "voxelray/voxel_grid.hpp"

#include <cstddef>
#include <vector>

namespace voxelray {

// Query for one voxel: its camera depth encoded with the query encoder.
// Voxels that do not project into the image (behind the camera or outside
// the bounds used by the caller) are invalid and carry a zero encoding.
struct RayQuery {
  std::size_t voxel_index = 0;
  double depth = 0.0;
  Encoding encoding;
  bool valid = false;
};

// Per-voxel features pulled back from image space; values.size() equals
// grid.voxel_count() * channels, voxel-major with channels contiguous.
struct VoxelFeatures {
  VoxelGrid grid;
  int channels = 0;
  std::vector<double> values;
};

// Diagnostic record of where one voxel sampled the image.
struct VoxelAttentionRecord {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
  double weight = 0.0;
  bool valid = false;
};

struct AttentionOptions {
  // When set, weights of voxels that share a pixel (nearest-integer u, v)
  // are passed through a softmax before weighting the sampled values.
  // Off by default: the plain dot-product weight is already calibrated to
  // peak at 1 where the key depth matches the voxel depth, and the softmax
  // flattens that contrast along each ray.
  bool softmax_over_ray = false;
  int threads = 1;
};

// Builds one query per voxel against the image bounds implied by the key
// map dimensions: project the voxel center, and where it lands inside the
// map at depth > kEpsilonDepth, encode the depth.
std::vector<RayQuery> build_queries(const VoxelGrid& grid, const CameraRig& rig,
                                    const GaussianEncoder& query_encoder,
                                    const ImageSize& image);

struct AttentionResult {
  VoxelFeatures features;
  std::vector<VoxelAttentionRecord> records;  // one per voxel
};

// Feature transfer from image space to the voxel grid. For each voxel whose
// center projects into the map, sample the key map and the value map
// bilinearly at the projected pixel, weight the value vector by
// dot(key, encode(depth)), and write it at the voxel. Voxels that do not
// project are exactly zero. One writer per voxel, so results are identical
// for any thread count.
//
// depth_keys.channels() must equal query_encoder.size(); the two maps must
// share height and width. The projection matrix must be expressed at key-map
// resolution (see scale_intrinsic).
AttentionResult local_ray_attention(const FeatureMap& depth_keys, const FeatureMap& image_values,
                                    const VoxelGrid& grid, const CameraRig& rig,
                                    const GaussianEncoder& query_encoder,
                                    const AttentionOptions& options = {});

// Appends the encoded camera orientation delta to every pixel of a feature
// map: output channels = input channels + orientation_encoder.size(), and
// the appended block is identical across pixels.
FeatureMap append_orientation_encoding(const FeatureMap& image_features, OrientationDelta delta,
                                       const GaussianEncoder& orientation_encoder);

}  // namespace voxelray
