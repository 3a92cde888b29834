#include "hbw/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <vector>

#include "hbw/error.hpp"
#include "hbw/metrics.hpp"
#include "hbw/wavelet.hpp"

namespace hbw {
namespace {

MatrixXd blockwise(const MatrixXd& m, Eigen::Index block_size, bool forward) {
  if (block_size < 1 || m.rows() % block_size != 0 || m.cols() % block_size != 0) {
    throw Error(ErrorCode::dimension_not_divisible,
                std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " is not divisible by block size " +
                    std::to_string(block_size));
  }
  const MatrixXd c = dct_matrix<double>(block_size);
  MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); r += block_size) {
    for (Eigen::Index col = 0; col < m.cols(); col += block_size) {
      const auto in = m.block(r, col, block_size, block_size);
      out.block(r, col, block_size, block_size) = forward ? MatrixXd(c * in * c.transpose())
                                                          : MatrixXd(c.transpose() * in * c);
    }
  }
  return out;
}

// Order of coefficient indices by decreasing magnitude; stable so equal
// magnitudes keep index order.
std::vector<Eigen::Index> magnitude_order(const MatrixXd& coeffs) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(coeffs.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(coeffs.data()[a]) > std::abs(coeffs.data()[b]);
  });
  return order;
}

MatrixXd keep_ordered(const MatrixXd& coeffs, const std::vector<Eigen::Index>& order, std::size_t k) {
  MatrixXd kept = MatrixXd::Zero(coeffs.rows(), coeffs.cols());
  for (std::size_t i = 0; i < k && i < order.size(); ++i) kept.data()[order[i]] = coeffs.data()[order[i]];
  return kept;
}

// Bisection for the smallest K in [0, n] with psnr_of(K) >= target.
// Invariant: psnr_of(lo) < target <= psnr_of(hi).
std::size_t smallest_passing_k(std::size_t n, double target, const std::function<double(std::size_t)>& psnr_of) {
  if (psnr_of(0) >= target) return 0;
  if (psnr_of(n) < target) {
    throw Error(ErrorCode::target_unreachable, "target PSNR " + std::to_string(target) +
                                                   " dB is not reached even with every coefficient");
  }
  std::size_t lo = 0, hi = n;
  while (hi > lo + 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (psnr_of(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

MetricsReport threshold_baseline(const IntensityImage& img, double target_psnr, const std::string& method,
                                 const MatrixXd& coeffs, const std::function<MatrixXd(const MatrixXd&)>& inverse) {
  if (target_psnr > kPsnrCap) {
    throw Error(ErrorCode::target_unreachable, "target exceeds the PSNR cap of " + std::to_string(kPsnrCap));
  }
  const auto start = std::chrono::steady_clock::now();
  const auto order = magnitude_order(coeffs);
  auto psnr_of = [&](std::size_t k) { return psnr(img.pixels, inverse(keep_ordered(coeffs, order, k))); };
  const std::size_t k = smallest_passing_k(order.size(), target_psnr, psnr_of);

  MetricsReport report;
  report.nonzero_count = k;
  report.psnr_db = psnr_of(k);
  report.sparsity_ratio = sparsity_ratio_or_inf(static_cast<std::size_t>(img.pixel_count()), k);
  report.method = method;
  report.domain = method == "wt" ? "wavelet" : "intensity";
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

MetricsReport budget_baseline(const IntensityImage& img, std::size_t k, const std::string& method,
                              const MatrixXd& coeffs, const std::function<MatrixXd(const MatrixXd&)>& inverse) {
  const auto start = std::chrono::steady_clock::now();
  const auto order = magnitude_order(coeffs);
  k = std::min(k, order.size());
  MetricsReport report;
  report.nonzero_count = k;
  report.psnr_db = psnr(img.pixels, inverse(keep_ordered(coeffs, order, k)));
  report.sparsity_ratio = sparsity_ratio_or_inf(static_cast<std::size_t>(img.pixel_count()), k);
  report.method = method;
  report.domain = method == "wt" ? "wavelet" : "intensity";
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace

MatrixXd blockwise_dct(const MatrixXd& m, Eigen::Index block_size) { return blockwise(m, block_size, true); }
MatrixXd blockwise_idct(const MatrixXd& m, Eigen::Index block_size) { return blockwise(m, block_size, false); }

MatrixXd keep_largest(const MatrixXd& coeffs, std::size_t k) {
  return keep_ordered(coeffs, magnitude_order(coeffs), k);
}

MetricsReport wt_threshold_baseline(const IntensityImage& img, int levels, double target_psnr) {
  const auto t = cdf97_forward(img, levels);
  return threshold_baseline(img, target_psnr, "wt", t.coeffs, [&](const MatrixXd& kept) {
    return cdf97_inverse(TransformedImage{kept, levels, img.peak}).pixels;
  });
}

MetricsReport dct_threshold_baseline(const IntensityImage& img, Eigen::Index block_size, double target_psnr) {
  const MatrixXd coeffs = blockwise_dct(img.pixels, block_size);
  return threshold_baseline(img, target_psnr, "dct", coeffs,
                            [&](const MatrixXd& kept) { return blockwise_idct(kept, block_size); });
}

MetricsReport wt_budget_baseline(const IntensityImage& img, int levels, std::size_t k) {
  const auto t = cdf97_forward(img, levels);
  return budget_baseline(img, k, "wt", t.coeffs, [&](const MatrixXd& kept) {
    return cdf97_inverse(TransformedImage{kept, levels, img.peak}).pixels;
  });
}

MetricsReport dct_budget_baseline(const IntensityImage& img, Eigen::Index block_size, std::size_t k) {
  const MatrixXd coeffs = blockwise_dct(img.pixels, block_size);
  return budget_baseline(img, k, "dct", coeffs, [&](const MatrixXd& kept) { return blockwise_idct(kept, block_size); });
}

}  // namespace hbw
