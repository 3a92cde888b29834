#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "hbw/image_io.hpp"

namespace hbw::synthetic {

// 8-bit test content: every generator returns integer pixels in [0, 255], so
// an image saved as PGM and loaded back is unchanged.

namespace detail {
inline IntensityImage quantized(MatrixXd m) {
  m = m.array().round().min(255.0).max(0.0);
  return IntensityImage(std::move(m));
}
}  // namespace detail

// Smooth, wavelet-compressible.
inline IntensityImage gaussian(Eigen::Index rows, Eigen::Index cols, double sigma_fraction = 0.22) {
  MatrixXd m(rows, cols);
  const double cy = 0.5 * static_cast<double>(rows - 1);
  const double cx = 0.5 * static_cast<double>(cols - 1);
  const double sy = sigma_fraction * static_cast<double>(rows);
  const double sx = sigma_fraction * static_cast<double>(cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double dy = (static_cast<double>(r) - cy) / sy;
      const double dx = (static_cast<double>(c) - cx) / sx;
      m(r, c) = 20.0 + 215.0 * std::exp(-0.5 * (dx * dx + dy * dy));
    }
  }
  return detail::quantized(std::move(m));
}

// Axis-aligned rectangles and a disc on a flat background.
inline IntensityImage piecewise_constant(Eigen::Index rows, Eigen::Index cols) {
  MatrixXd m = MatrixXd::Constant(rows, cols, 40.0);
  const double h = static_cast<double>(rows);
  const double w = static_cast<double>(cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double y = static_cast<double>(r) / h;
      const double x = static_cast<double>(c) / w;
      if (x > 0.1 && x < 0.55 && y > 0.15 && y < 0.5) m(r, c) = 200.0;
      if (x > 0.4 && x < 0.9 && y > 0.6 && y < 0.85) m(r, c) = 120.0;
      if ((x - 0.72) * (x - 0.72) + (y - 0.3) * (y - 0.3) < 0.03) m(r, c) = 235.0;
    }
  }
  return detail::quantized(std::move(m));
}

// Sum of a few low-frequency sinusoids.
inline IntensityImage sinusoid_mix(Eigen::Index rows, Eigen::Index cols) {
  MatrixXd m(rows, cols);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double y = static_cast<double>(r) / static_cast<double>(rows);
      const double x = static_cast<double>(c) / static_cast<double>(cols);
      m(r, c) = 128.0 + 50.0 * std::sin(two_pi * 1.5 * x + 0.3) + 35.0 * std::cos(two_pi * 2.0 * y) +
                25.0 * std::sin(two_pi * (1.0 * x + 2.5 * y));
    }
  }
  return detail::quantized(std::move(m));
}

// Uniform integer noise in [0, 255]; incompressible.
inline IntensityImage noise(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = static_cast<double>(rng() % 256);
  return detail::quantized(std::move(m));
}

}  // namespace hbw::synthetic
