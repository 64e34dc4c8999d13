// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelray/encoding.hpp"

#include "voxelray/geometry.hpp"
#include "voxelray/log.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace voxelray {

GaussianEncoder::GaussianEncoder(int n, double x_first, double x_last, double sigma)
    : n_(n), x_first_(x_first), x_last_(x_last), sigma_(sigma) {
  if (n_ < 2) throw std::invalid_argument("GaussianEncoder: need at least 2 samples");
  if (!std::isfinite(x_first_) || !std::isfinite(x_last_) || !(x_last_ > x_first_)) {
    throw std::invalid_argument("GaussianEncoder: require x_last > x_first, both finite");
  }
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw std::invalid_argument("GaussianEncoder: sigma must be positive and finite");
  }
  delta_x_ = (x_last_ - x_first_) / static_cast<double>(n_ - 1);
  scale_ = std::sqrt(std::sqrt(2.0 * kPi) * sigma_);
}

double GaussianEncoder::sample_point(int i) const {
  if (i < 0 || i >= n_) throw std::out_of_range("GaussianEncoder: sample index out of range");
  return x_first_ + static_cast<double>(i) * delta_x_;
}

double GaussianEncoder::density(double x, double mu) const {
  const double z = (x - mu) / sigma_;
  return std::exp(-z * z) / (std::sqrt(kPi) * sigma_);
}

Encoding GaussianEncoder::encode(double d) const {
  Encoding out(static_cast<std::size_t>(n_));
  encode_into(d, out);
  return out;
}

void GaussianEncoder::encode_into(double d, std::span<double> out) const {
  if (out.size() != static_cast<std::size_t>(n_)) {
    throw std::invalid_argument("GaussianEncoder: output span has wrong length");
  }
  if (!std::isfinite(d)) throw std::invalid_argument("GaussianEncoder: non-finite position");
  if (d < x_first_ || d > x_last_) {
    log::warn_once("gaussian encoder: position outside the sample grid [" +
                   std::to_string(x_first_) + ", " + std::to_string(x_last_) +
                   "]; similarity degrades out of range (first offender " + std::to_string(d) +
                   ")");
  }
  const double amplitude = scale_ * std::sqrt(delta_x_);
  for (int i = 0; i < n_; ++i) {
    const double x = x_first_ + static_cast<double>(i) * delta_x_;
    out[static_cast<std::size_t>(i)] = amplitude * density(x, d);
  }
}

double similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("similarity: length mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

Encoding sinusoidal_encode(int n, double d, double base_wavelength) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("sinusoidal_encode: n must be even and at least 2");
  }
  if (!(base_wavelength > 0.0)) {
    throw std::invalid_argument("sinusoidal_encode: base wavelength must be positive");
  }
  if (!std::isfinite(d)) throw std::invalid_argument("sinusoidal_encode: non-finite position");
  Encoding out(static_cast<std::size_t>(n));
  for (int i = 0; i < n / 2; ++i) {
    const double omega =
        std::pow(base_wavelength, -2.0 * static_cast<double>(i) / static_cast<double>(n));
    out[static_cast<std::size_t>(2 * i)] = std::sin(d * omega);
    out[static_cast<std::size_t>(2 * i + 1)] = std::cos(d * omega);
  }
  return out;
}

}  // namespace voxelray
