// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace voxelray {

using Encoding = std::vector<double>;

// Positional encoder that samples a normalized Gaussian bump on a uniform
// grid of n points over [x_first, x_last]. Encodings are scaled so that for
// positions a few sigma inside the grid
//
//   dot(encode(d1), encode(d2)) ~= exp(-(d1 - d2)^2 / (2 sigma^2)),
//
// i.e. similarity is a smooth function of distance with peak 1 at d1 == d2.
// Pure value type, safe to share across threads after construction.
class GaussianEncoder {
 public:
  // Requires n >= 2, x_last > x_first, sigma > 0.
  GaussianEncoder(int n, double x_first, double x_last, double sigma);

  int size() const { return n_; }
  double x_first() const { return x_first_; }
  double x_last() const { return x_last_; }
  double sigma() const { return sigma_; }
  double delta_x() const { return delta_x_; }  // grid spacing
  double scale() const { return scale_; }      // sqrt(sqrt(2 pi) * sigma)

  // i-th grid point, x_first + i * delta_x, 0 <= i < n.
  double sample_point(int i) const;

  // Normalized density, integral over x equals 1 for any mu:
  // exp(-(x - mu)^2 / sigma^2) / (sqrt(pi) * sigma).
  double density(double x, double mu) const;

  // Encoding of position d: entry i is scale * density(x_i, d) * sqrt(delta_x).
  // Emits a once-per-process warning when d falls outside [x_first, x_last],
  // where the similarity approximation degrades.
  Encoding encode(double d) const;
  void encode_into(double d, std::span<double> out) const;

 private:
  int n_;
  double x_first_;
  double x_last_;
  double sigma_;
  double delta_x_;
  double scale_;
};

// Dot product of two equal-length vectors. Throws std::invalid_argument on
// length mismatch.
double similarity(std::span<const double> a, std::span<const double> b);

// Interleaved sine/cosine encoding at n/2 geometrically spaced frequencies:
// out[2i] = sin(d * w_i), out[2i+1] = cos(d * w_i), w_i = base^(-2i/n).
// Requires n >= 2 and even. Kept as a baseline: its dot products oscillate
// with distance instead of decaying, which is what the Gaussian encoder
// fixes.
Encoding sinusoidal_encode(int n, double d, double base_wavelength = 10000.0);

}  // namespace voxelray
