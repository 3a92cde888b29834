#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hbw/error.hpp"
#include "hbw/image_io.hpp"
#include "hbw/types.hpp"

namespace hbw {

// Reported PSNR never exceeds this; it stands in for "exact".
inline constexpr double kPsnrCap = 99.0;
inline constexpr double kPsnrPeak = 255.0;

// PSNR from a total squared error over n_pixels samples.
inline double psnr_from_error_energy(double error_energy, double n_pixels, double peak = kPsnrPeak) {
  if (std::sqrt(std::max(error_energy, 0.0)) < 1e-12) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak * n_pixels / error_energy));
}

// Largest total squared error that still meets the PSNR target.
inline double error_energy_for_psnr(double target_db, double n_pixels, double peak = kPsnrPeak) {
  return peak * peak * n_pixels * std::pow(10.0, -target_db / 10.0);
}

template <typename DerivedA, typename DerivedB>
double psnr(const Eigen::MatrixBase<DerivedA>& reference, const Eigen::MatrixBase<DerivedB>& approx,
            double peak = kPsnrPeak) {
  if (reference.rows() != approx.rows() || reference.cols() != approx.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "PSNR of " + std::to_string(reference.rows()) + "x" +
                                                   std::to_string(reference.cols()) + " against " +
                                                   std::to_string(approx.rows()) + "x" +
                                                   std::to_string(approx.cols()));
  }
  const double energy = static_cast<double>((reference - approx).squaredNorm());
  return psnr_from_error_energy(energy, static_cast<double>(reference.size()), peak);
}

// Peak is fixed at 255 regardless of the images' own peak values.
inline double psnr(const IntensityImage& reference, const IntensityImage& approx) {
  return psnr(reference.pixels, approx.pixels, kPsnrPeak);
}

inline double sparsity_ratio(std::size_t n_pixels, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::no_atoms_selected, "sparsity ratio undefined for K = 0");
  return static_cast<double>(n_pixels) / static_cast<double>(k);
}

// Same as sparsity_ratio but maps K = 0 to +inf for reporting.
inline double sparsity_ratio_or_inf(std::size_t n_pixels, std::size_t k) {
  return k == 0 ? std::numeric_limits<double>::infinity() : sparsity_ratio(n_pixels, k);
}

}  // namespace hbw
