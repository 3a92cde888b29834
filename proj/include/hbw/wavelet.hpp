#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "hbw/error.hpp"
#include "hbw/image_io.hpp"
#include "hbw/types.hpp"

namespace hbw {

// CDF 9/7 lifting constants (JPEG2000 irreversible filter).
namespace cdf97 {
inline constexpr double alpha = -1.586134342059924;
inline constexpr double beta = -0.052980118572961;
inline constexpr double gamma = 0.882911075530934;
inline constexpr double delta = 0.443506852043971;
inline constexpr double kappa = 1.230174104914001;
}  // namespace cdf97

inline constexpr int kDefaultWaveletLevels = 4;

// Coefficients in Mallat layout: after each level the LL band occupies the
// top-left quadrant, and the next level recurses on it.
struct TransformedImage {
  MatrixXd coeffs;
  int levels = 0;
  double peak = kDefaultPeak;

  Eigen::Index rows() const { return coeffs.rows(); }
  Eigen::Index cols() const { return coeffs.cols(); }
};

namespace detail {

// One lifting pass over the samples of one parity, with whole-sample
// symmetric extension: x[-1] = x[1], x[n] = x[n-2].
template <typename Scalar>
void lift(std::span<Scalar> x, std::size_t parity, Scalar weight) {
  const std::size_t n = x.size();
  for (std::size_t i = parity; i < n; i += 2) {
    const Scalar left = i >= 1 ? x[i - 1] : x[i + 1];
    const Scalar right = i + 1 < n ? x[i + 1] : x[i - 1];
    x[i] += weight * (left + right);
  }
}

template <typename Scalar>
Scalar low_gain() {
  return static_cast<Scalar>(std::sqrt(2.0) / cdf97::kappa);
}

// Forward 1D transform of an even-length signal; output is [low | high].
template <typename Scalar>
void forward_1d(std::span<Scalar> x, std::vector<Scalar>& scratch) {
  const std::size_t n = x.size();
  lift(x, 1, static_cast<Scalar>(cdf97::alpha));
  lift(x, 0, static_cast<Scalar>(cdf97::beta));
  lift(x, 1, static_cast<Scalar>(cdf97::gamma));
  lift(x, 0, static_cast<Scalar>(cdf97::delta));
  const Scalar lo = low_gain<Scalar>();
  scratch.resize(n);
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < half; ++i) {
    scratch[i] = x[2 * i] * lo;
    scratch[half + i] = x[2 * i + 1] / lo;
  }
  std::copy(scratch.begin(), scratch.end(), x.begin());
}

template <typename Scalar>
void inverse_1d(std::span<Scalar> x, std::vector<Scalar>& scratch) {
  const std::size_t n = x.size();
  const std::size_t half = n / 2;
  const Scalar lo = low_gain<Scalar>();
  scratch.resize(n);
  for (std::size_t i = 0; i < half; ++i) {
    scratch[2 * i] = x[i] / lo;
    scratch[2 * i + 1] = x[half + i] * lo;
  }
  std::copy(scratch.begin(), scratch.end(), x.begin());
  lift(x, 0, static_cast<Scalar>(-cdf97::delta));
  lift(x, 1, static_cast<Scalar>(-cdf97::gamma));
  lift(x, 0, static_cast<Scalar>(-cdf97::beta));
  lift(x, 1, static_cast<Scalar>(-cdf97::alpha));
}

inline void check_divisible(Eigen::Index rows, Eigen::Index cols, int levels) {
  if (levels < 0) throw Error(ErrorCode::invalid_dimensions, "negative decomposition depth");
  const Eigen::Index step = Eigen::Index{1} << levels;
  if (rows % step != 0 || cols % step != 0) {
    throw Error(ErrorCode::dimension_not_divisible,
                std::to_string(rows) + "x" + std::to_string(cols) + " is not divisible by 2^" +
                    std::to_string(levels));
  }
}

// Applies a 1D transform to every row, then every column, of the top-left
// rows x cols region.
template <typename Scalar, typename Transform1D>
void separable_pass(Matrix<Scalar>& m, Eigen::Index rows, Eigen::Index cols, Transform1D&& transform) {
  std::vector<Scalar> line;
  std::vector<Scalar> scratch;
  line.resize(static_cast<std::size_t>(cols));
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) line[c] = m(r, c);
    transform(std::span<Scalar>(line), scratch);
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = line[c];
  }
  for (Eigen::Index c = 0; c < cols; ++c) {
    // Columns are contiguous in column-major storage.
    transform(std::span<Scalar>(m.col(c).data(), static_cast<std::size_t>(rows)), scratch);
  }
}

}  // namespace detail

// In-place multi-level 2D forward transform of an Eigen matrix.
template <typename Scalar>
void cdf97_forward_inplace(Matrix<Scalar>& m, int levels) {
  detail::check_divisible(m.rows(), m.cols(), levels);
  Eigen::Index rows = m.rows();
  Eigen::Index cols = m.cols();
  for (int level = 0; level < levels; ++level) {
    detail::separable_pass(m, rows, cols, [](std::span<Scalar> x, std::vector<Scalar>& s) {
      detail::forward_1d(x, s);
    });
    rows /= 2;
    cols /= 2;
  }
}

template <typename Scalar>
void cdf97_inverse_inplace(Matrix<Scalar>& m, int levels) {
  detail::check_divisible(m.rows(), m.cols(), levels);
  for (int level = levels - 1; level >= 0; --level) {
    const Eigen::Index rows = m.rows() >> level;
    const Eigen::Index cols = m.cols() >> level;
    // Inverse order: columns first, then rows.
    std::vector<Scalar> line(static_cast<std::size_t>(cols));
    std::vector<Scalar> scratch;
    for (Eigen::Index c = 0; c < cols; ++c) {
      detail::inverse_1d(std::span<Scalar>(m.col(c).data(), static_cast<std::size_t>(rows)), scratch);
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) line[c] = m(r, c);
      detail::inverse_1d(std::span<Scalar>(line), scratch);
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = line[c];
    }
  }
}

inline TransformedImage cdf97_forward(const IntensityImage& img, int levels = kDefaultWaveletLevels) {
  TransformedImage t{img.pixels, levels, img.peak};
  cdf97_forward_inplace(t.coeffs, levels);
  return t;
}

inline IntensityImage cdf97_inverse(const TransformedImage& t) {
  MatrixXd pixels = t.coeffs;
  cdf97_inverse_inplace(pixels, t.levels);
  return IntensityImage(std::move(pixels), t.peak);
}

}  // namespace hbw
