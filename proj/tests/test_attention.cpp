// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelray/attention.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

using voxelray::AttentionOptions;
using voxelray::AttentionResult;
using voxelray::CameraRig;
using voxelray::FeatureMap;
using voxelray::GaussianEncoder;
using voxelray::ImageSize;
using voxelray::VoxelGrid;

namespace {

// Forward-looking rig whose projection matrix is already expressed at the
// key-map resolution used below (32 x 24 pixels).
CameraRig demo_rig() {
  return CameraRig(vtest::simple_intrinsic(16.0, 15.5, 11.5),
                   vtest::make_extrinsic(vtest::forward_mount(), Eigen::Vector3d::Zero()));
}

// Grid straight ahead of the camera: ego x (the camera depth) spans
// [14, 26], which keeps every depth at least 4 sigma inside the encoder
// grid below.
VoxelGrid front_grid() {
  return VoxelGrid(Eigen::Vector3d(14.0, -2.0, -1.0), Eigen::Vector3d::Ones(),
                   Eigen::Vector3i(12, 4, 2));
}

GaussianEncoder domain_encoder() { return GaussianEncoder(81, 0.0, 40.0, 1.0); }

FeatureMap constant_key_map(int height, int width, const voxelray::Encoding& key) {
  FeatureMap map(height, width, static_cast<int>(key.size()));
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      for (std::size_t c = 0; c < key.size(); ++c) {
        map.at(v, u, static_cast<int>(c)) = key[c];
      }
    }
  }
  return map;
}

}  // namespace

TEST_CASE("queries encode the projected depth of visible voxels") {
  const VoxelGrid grid = front_grid();
  const CameraRig rig = demo_rig();
  const GaussianEncoder encoder = domain_encoder();
  const auto queries = voxelray::build_queries(grid, rig, encoder, ImageSize{32, 24});
  REQUIRE(queries.size() == grid.voxel_count());
  int valid = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    CHECK(queries[i].voxel_index == i);
    REQUIRE(queries[i].encoding.size() == static_cast<std::size_t>(encoder.size()));
    if (!queries[i].valid) {
      for (const double value : queries[i].encoding) CHECK(value == 0.0);
      continue;
    }
    ++valid;
    // Depth of a forward-mounted camera at the origin is the ego x of the
    // voxel center.
    CHECK(queries[i].depth == doctest::Approx(grid.center(i).x()).epsilon(1e-12));
    CHECK(queries[i].encoding == encoder.encode(queries[i].depth));
  }
  CHECK(valid > 0);
}

TEST_CASE("attention weight follows the gaussian similarity in depth") {
  const VoxelGrid grid = front_grid();
  const CameraRig rig = demo_rig();
  const GaussianEncoder encoder = domain_encoder();
  const double z_star = 20.0;
  const FeatureMap keys = constant_key_map(24, 32, encoder.encode(z_star));
  FeatureMap values(24, 32, 1);
  for (double& v : values.values()) v = 1.0;

  const AttentionResult result = voxelray::local_ray_attention(keys, values, grid, rig, encoder);
  REQUIRE(result.records.size() == grid.voxel_count());
  REQUIRE(result.features.channels == 1);
  int checked = 0;
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& record = result.records[i];
    if (!record.valid) continue;
    const double expected = std::exp(-(record.depth - z_star) * (record.depth - z_star) / 2.0);
    CHECK(std::abs(record.weight - expected) <= 2e-3);
    // With unit values the transferred feature is the weight times the
    // bilinear sample of an all-ones map, which is 1 only up to rounding.
    CHECK(result.features.values[i] == doctest::Approx(record.weight).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("attention weight slope matches the analytic derivative") {
  // One-voxel grids displaced by h along the optical axis give the weight
  // as a function of depth; the central difference must match the closed
  // form's derivative.
  const CameraRig rig = demo_rig();
  const GaussianEncoder encoder = domain_encoder();
  const double z_star = 20.0;
  const FeatureMap keys = constant_key_map(24, 32, encoder.encode(z_star));
  FeatureMap values(24, 32, 1);
  for (double& v : values.values()) v = 1.0;

  const auto weight_at = [&](double depth) {
    const VoxelGrid probe(Eigen::Vector3d(depth - 0.5, -0.5, -0.5), Eigen::Vector3d::Ones(),
                          Eigen::Vector3i(1, 1, 1));
    const AttentionResult result =
        voxelray::local_ray_attention(keys, values, probe, rig, encoder);
    REQUIRE(result.records[0].valid);
    return std::make_pair(result.records[0].weight, result.records[0].depth);
  };

  const double h = 1e-4;
  for (const double depth : {18.6, 19.5, 20.7, 21.4, 22.0}) {
    const auto [w_plus, d_plus] = weight_at(depth + h);
    const auto [w_minus, d_minus] = weight_at(depth - h);
    const double slope = (w_plus - w_minus) / (d_plus - d_minus);
    const double r = depth - z_star;
    const double analytic = -r * std::exp(-r * r / 2.0);
    CHECK(std::abs(slope - analytic) <= 1e-3 * std::abs(analytic));
  }
}

TEST_CASE("features are the sampled values scaled by the weight") {
  const VoxelGrid grid = front_grid();
  const CameraRig rig = demo_rig();
  const GaussianEncoder encoder = domain_encoder();
  vtest::SplitMix64 rng(103);
  FeatureMap keys(24, 32, encoder.size());
  for (double& v : keys.values()) v = rng.uniform(-0.5, 0.5);
  FeatureMap values(24, 32, 3);
  for (double& v : values.values()) v = rng.uniform(-2.0, 2.0);

  const AttentionResult result = voxelray::local_ray_attention(keys, values, grid, rig, encoder);
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& record = result.records[i];
    if (!record.valid) {
      for (int c = 0; c < 3; ++c) CHECK(result.features.values[i * 3 + c] == 0.0);
      CHECK(record.weight == 0.0);
      continue;
    }
    const auto sampled = voxelray::bilinear_sample(values, record.u, record.v);
    REQUIRE(sampled.valid);
    for (int c = 0; c < 3; ++c) {
      CHECK(result.features.values[i * 3 + c] ==
            doctest::Approx(record.weight * sampled.values[c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("attention is linear in the value map") {
  const VoxelGrid grid = front_grid();
  const CameraRig rig = demo_rig();
  const GaussianEncoder encoder = domain_encoder();
  vtest::SplitMix64 rng(107);
  FeatureMap keys(24, 32, encoder.size());
  for (double& v : keys.values()) v = rng.uniform(-0.5, 0.5);
  FeatureMap values(24, 32, 2);
  for (double& v : values.values()) v = rng.uniform(-1.0, 1.0);
  FeatureMap scaled_values = values;
  for (double& v : scaled_values.values()) v *= -2.5;

  const AttentionResult base = voxelray::local_ray_attention(keys, values, grid, rig, encoder);
  const AttentionResult scaled =
      voxelray::local_ray_attention(keys, scaled_values, grid, rig, encoder);
  for (std::size_t i = 0; i < base.features.values.size(); ++i) {
    CHECK(scaled.features.values[i] ==
          doctest::Approx(-2.5 * base.features.values[i]).epsilon(1e-12));
  }
  // Zero values transfer exactly zero, whatever the weights.
  FeatureMap zero_values(24, 32, 2);
  const AttentionResult zeros = voxelray::local_ray_attention(keys, zero_values, grid, rig, encoder);
  for (const double v : zeros.features.values) CHECK(v == 0.0);
}

TEST_CASE("attention rejects mismatched maps") {
  const VoxelGrid grid = front_grid();
  const CameraRig rig = demo_rig();
  const GaussianEncoder encoder = domain_encoder();
  const FeatureMap bad_keys(24, 32, encoder.size() - 1);
  const FeatureMap values(24, 32, 2);
  CHECK_THROWS_AS(voxelray::local_ray_attention(bad_keys, values, grid, rig, encoder),
                  std::invalid_argument);
  const FeatureMap keys(24, 32, encoder.size());
  const FeatureMap small_values(23, 32, 2);
  CHECK_THROWS_AS(voxelray::local_ray_attention(keys, small_values, grid, rig, encoder),
                  std::invalid_argument);
}

TEST_CASE("attention output is identical for any thread count") {
  const VoxelGrid grid = front_grid();
  const CameraRig rig = demo_rig();
  const GaussianEncoder encoder = domain_encoder();
  vtest::SplitMix64 rng(109);
  FeatureMap keys(24, 32, encoder.size());
  for (double& v : keys.values()) v = rng.uniform(-0.5, 0.5);
  FeatureMap values(24, 32, 4);
  for (double& v : values.values()) v = rng.uniform(-1.0, 1.0);

  AttentionOptions one;
  one.threads = 1;
  const AttentionResult base = voxelray::local_ray_attention(keys, values, grid, rig, encoder, one);
  for (const int threads : {2, 3, 8}) {
    AttentionOptions options;
    options.threads = threads;
    const AttentionResult other =
        voxelray::local_ray_attention(keys, values, grid, rig, encoder, options);
    CHECK(other.features.values == base.features.values);
    REQUIRE(other.records.size() == base.records.size());
    for (std::size_t i = 0; i < base.records.size(); ++i) {
      CHECK(other.records[i].weight == base.records[i].weight);
      CHECK(other.records[i].u == base.records[i].u);
      CHECK(other.records[i].valid == base.records[i].valid);
    }
  }
}

TEST_CASE("softmax renormalizes weights within each pixel group") {
  const VoxelGrid grid = front_grid();
  const CameraRig rig = demo_rig();
  const GaussianEncoder encoder = domain_encoder();
  vtest::SplitMix64 rng(113);
  FeatureMap keys(24, 32, encoder.size());
  for (double& v : keys.values()) v = rng.uniform(-0.5, 0.5);
  FeatureMap values(24, 32, 2);
  for (double& v : values.values()) v = rng.uniform(-1.0, 1.0);

  AttentionOptions options;
  options.softmax_over_ray = true;
  const AttentionResult result =
      voxelray::local_ray_attention(keys, values, grid, rig, encoder, options);

  std::map<std::pair<long long, long long>, double> weight_sums;
  for (const auto& record : result.records) {
    if (!record.valid) continue;
    weight_sums[{std::llround(record.u), std::llround(record.v)}] += record.weight;
  }
  REQUIRE(!weight_sums.empty());
  for (const auto& [pixel, sum] : weight_sums) {
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Features stay consistent with the renormalized weights.
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& record = result.records[i];
    if (!record.valid) continue;
    const auto sampled = voxelray::bilinear_sample(values, record.u, record.v);
    for (int c = 0; c < 2; ++c) {
      CHECK(result.features.values[i * 2 + c] ==
            doctest::Approx(record.weight * sampled.values[c]).epsilon(1e-9));
    }
  }
}

TEST_CASE("orientation encoding is appended uniformly to every pixel") {
  const GaussianEncoder orientation_encoder(16, -0.9, 0.9, 0.1);
  vtest::SplitMix64 rng(127);
  FeatureMap features(5, 7, 3);
  for (double& v : features.values()) v = rng.uniform(-1.0, 1.0);
  const voxelray::OrientationDelta delta{0.37};

  const FeatureMap extended =
      voxelray::append_orientation_encoding(features, delta, orientation_encoder);
  CHECK(extended.height() == 5);
  CHECK(extended.width() == 7);
  REQUIRE(extended.channels() == 3 + 16);
  const voxelray::Encoding encoded = orientation_encoder.encode(0.37);
  for (int v = 0; v < 5; ++v) {
    for (int u = 0; u < 7; ++u) {
      for (int c = 0; c < 3; ++c) CHECK(extended.at(v, u, c) == features.at(v, u, c));
      for (int c = 0; c < 16; ++c) CHECK(extended.at(v, u, 3 + c) == encoded[c]);
    }
  }
}
