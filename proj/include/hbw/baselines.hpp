#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "hbw/image_io.hpp"
#include "hbw/types.hpp"

namespace hbw {

struct MetricsReport {
  double psnr_db = 0;
  double sparsity_ratio = 0;
  std::size_t nonzero_count = 0;
  std::string method;
  std::string domain;
  double runtime_seconds = 0;
};

// Orthonormal DCT-II matrix: row k is the k-th basis vector.
template <typename Scalar = double>
Matrix<Scalar> dct_matrix(Eigen::Index n) {
  Matrix<Scalar> c(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double w = k == 0 ? std::sqrt(1.0 / static_cast<double>(n)) : std::sqrt(2.0 / static_cast<double>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      c(k, j) = static_cast<Scalar>(w * std::cos(std::numbers::pi * (2.0 * static_cast<double>(j) + 1.0) *
                                                  static_cast<double>(k) / (2.0 * static_cast<double>(n))));
    }
  }
  return c;
}

// Block-wise separable DCT of a whole matrix.
MatrixXd blockwise_dct(const MatrixXd& m, Eigen::Index block_size);
MatrixXd blockwise_idct(const MatrixXd& m, Eigen::Index block_size);

// Keeps the k largest-magnitude entries (ties broken by lower column-major
// index) and zeroes the rest.
MatrixXd keep_largest(const MatrixXd& coeffs, std::size_t k);

// Smallest K whose reconstruction reaches target_psnr, found by bisection on
// K over the magnitude-sorted coefficients of the whole-image CDF97.
MetricsReport wt_threshold_baseline(const IntensityImage& img, int levels, double target_psnr);

// Same protocol over the coefficients of an orthonormal block DCT.
MetricsReport dct_threshold_baseline(const IntensityImage& img, Eigen::Index block_size, double target_psnr);

// Fixed-budget variants: keep exactly min(k, count) largest coefficients.
MetricsReport wt_budget_baseline(const IntensityImage& img, int levels, std::size_t k);
MetricsReport dct_budget_baseline(const IntensityImage& img, Eigen::Index block_size, std::size_t k);

}  // namespace hbw
