// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelray/attention.hpp"

#include "voxelray/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace voxelray {
namespace {

// Shared per-voxel projection step: camera depth plus pixel at key-map
// resolution. Valid when the depth clears kEpsilonDepth and the pixel lies
// inside the map (closed bounds, pixel centers).
PixelProjection project_center(const CameraRig& rig, const Eigen::Vector3d& center,
                               const ImageSize& image) {
  return project_to_image(rig, ego_to_camera(rig, center), image);
}

}  // namespace

std::vector<RayQuery> build_queries(const VoxelGrid& grid, const CameraRig& rig,
                                    const GaussianEncoder& query_encoder,
                                    const ImageSize& image) {
  std::vector<RayQuery> queries(grid.voxel_count());
  for (std::size_t index = 0; index < queries.size(); ++index) {
    RayQuery& query = queries[index];
    query.voxel_index = index;
    query.encoding.assign(static_cast<std::size_t>(query_encoder.size()), 0.0);
    const PixelProjection pixel = project_center(rig, grid.center(index), image);
    query.depth = pixel.depth;
    query.valid = pixel.valid;
    if (query.valid) query_encoder.encode_into(pixel.depth, query.encoding);
  }
  return queries;
}

AttentionResult local_ray_attention(const FeatureMap& depth_keys, const FeatureMap& image_values,
                                    const VoxelGrid& grid, const CameraRig& rig,
                                    const GaussianEncoder& query_encoder,
                                    const AttentionOptions& options) {
  if (depth_keys.channels() != query_encoder.size()) {
    throw std::invalid_argument("local_ray_attention: key channels (" +
                                std::to_string(depth_keys.channels()) +
                                ") do not match the encoder size (" +
                                std::to_string(query_encoder.size()) + ")");
  }
  if (depth_keys.height() != image_values.height() ||
      depth_keys.width() != image_values.width()) {
    throw std::invalid_argument("local_ray_attention: key and value maps differ in extent");
  }

  const ImageSize image{depth_keys.width(), depth_keys.height()};
  const std::size_t count = grid.voxel_count();
  const int channels = image_values.channels();

  AttentionResult result;
  result.features.grid = grid;
  result.features.channels = channels;
  result.features.values.assign(count * static_cast<std::size_t>(channels), 0.0);
  result.records.assign(count, VoxelAttentionRecord{});

  // Each chunk owns a disjoint range of voxels, and every output slot is
  // written by exactly the voxel that owns it, so the result does not depend
  // on the partition.
  parallel_chunks(count, options.threads, [&](int, std::size_t begin, std::size_t end) {
    std::vector<double> query(static_cast<std::size_t>(query_encoder.size()));
    std::vector<double> key(static_cast<std::size_t>(depth_keys.channels()));
    std::vector<double> value(static_cast<std::size_t>(channels));
    for (std::size_t index = begin; index < end; ++index) {
      const PixelProjection pixel = project_center(rig, grid.center(index), image);
      VoxelAttentionRecord& record = result.records[index];
      record.u = pixel.u;
      record.v = pixel.v;
      record.depth = pixel.depth;
      record.valid = pixel.valid;
      if (!pixel.valid) continue;

      bilinear_sample_into(depth_keys, pixel.u, pixel.v, key);
      bilinear_sample_into(image_values, pixel.u, pixel.v, value);
      query_encoder.encode_into(pixel.depth, query);
      record.weight = similarity(key, query);

      double* out = result.features.values.data() + index * static_cast<std::size_t>(channels);
      for (int c = 0; c < channels; ++c) out[c] = record.weight * value[c];
    }
  });

  if (options.softmax_over_ray) {
    // Group voxels by the integer pixel their center lands on and replace
    // raw weights with softmax weights within each group. Groups are
    // processed in pixel order and voxels within a group in index order, so
    // the result is independent of thread count (this pass is serial).
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>> rays;
    for (std::size_t index = 0; index < count; ++index) {
      const VoxelAttentionRecord& record = result.records[index];
      if (!record.valid) continue;
      rays[{std::llround(record.u), std::llround(record.v)}].push_back(index);
    }
    for (const auto& [pixel, members] : rays) {
      double max_weight = result.records[members.front()].weight;
      for (const std::size_t index : members) {
        max_weight = std::max(max_weight, result.records[index].weight);
      }
      double normalizer = 0.0;
      for (const std::size_t index : members) {
        normalizer += std::exp(result.records[index].weight - max_weight);
      }
      for (const std::size_t index : members) {
        VoxelAttentionRecord& record = result.records[index];
        const double raw = record.weight;
        record.weight = std::exp(raw - max_weight) / normalizer;
        double* out = result.features.values.data() + index * static_cast<std::size_t>(channels);
        const double rescale = raw == 0.0 ? 0.0 : record.weight / raw;
        if (raw == 0.0) {
          // The dot-product path wrote zeros; resample the value vector.
          std::vector<double> value(static_cast<std::size_t>(channels));
          bilinear_sample_into(image_values, record.u, record.v, value);
          for (int c = 0; c < channels; ++c) out[c] = record.weight * value[c];
        } else {
          for (int c = 0; c < channels; ++c) out[c] *= rescale;
        }
      }
    }
  }

  return result;
}

FeatureMap append_orientation_encoding(const FeatureMap& image_features, OrientationDelta delta,
                                       const GaussianEncoder& orientation_encoder) {
  const Encoding encoded = orientation_encoder.encode(delta.radians);
  const int in_channels = image_features.channels();
  const int out_channels = in_channels + orientation_encoder.size();
  FeatureMap out(image_features.height(), image_features.width(), out_channels);
  for (int v = 0; v < out.height(); ++v) {
    for (int u = 0; u < out.width(); ++u) {
      const std::span<const double> in_pixel = image_features.pixel(v, u);
      for (int c = 0; c < in_channels; ++c) out.at(v, u, c) = in_pixel[c];
      for (int c = 0; c < orientation_encoder.size(); ++c) {
        out.at(v, u, in_channels + c) = encoded[static_cast<std::size_t>(c)];
      }
    }
  }
  return out;
}

}  // namespace voxelray
