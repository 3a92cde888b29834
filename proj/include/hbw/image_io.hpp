#pragma once

#include <filesystem>

#include "hbw/types.hpp"

namespace hbw {

inline constexpr double kDefaultPeak = 255.0;

// Spatial-domain grayscale image. Pixels are real-valued from the moment they
// are loaded; peak is the maximum representable intensity of the source.
struct IntensityImage {
  MatrixXd pixels;
  double peak = kDefaultPeak;

  IntensityImage() = default;
  explicit IntensityImage(MatrixXd p, double peak_value = kDefaultPeak)
      : pixels(std::move(p)), peak(peak_value) {}

  Eigen::Index rows() const { return pixels.rows(); }
  Eigen::Index cols() const { return pixels.cols(); }
  Eigen::Index pixel_count() const { return pixels.size(); }
};

// Reads a binary PGM (P5, maxval 255) or an 8-bit grayscale PNG. The format is
// chosen from the file's magic bytes, not its extension.
IntensityImage load_image(const std::filesystem::path& path);

// Writes a binary P5 PGM. Pixels are rounded to the nearest integer after
// clamping to [0, peak].
void save_image(const IntensityImage& img, const std::filesystem::path& path);

}  // namespace hbw
