#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "hbw/image_io.hpp"
#include "hbw/pursuit.hpp"
#include "hbw/wavelet.hpp"

namespace hbw {

enum class Domain { intensity, wavelet };
enum class Method { mp, omp, hbw_mp, hbw_omp, wt_baseline, dct_baseline };

std::string_view to_string(Domain d);
std::string_view to_string(Method m);
std::optional<Domain> parse_domain(std::string_view s);
std::optional<Method> parse_method(std::string_view s);

inline bool is_pursuit(Method m) { return m != Method::wt_baseline && m != Method::dct_baseline; }
inline bool is_hbw(Method m) { return m == Method::hbw_mp || m == Method::hbw_omp; }
inline PursuitKind pursuit_kind(Method m) {
  return (m == Method::mp || m == Method::hbw_mp) ? PursuitKind::mp : PursuitKind::omp;
}

struct Segmentation {
  std::size_t count = 1;
  std::uint64_t seed = 0;
};

// Defaults follow the reference protocol: 8x8 blocks, PSNR target 45 dB.
struct PipelineConfig {
  Domain domain = Domain::wavelet;
  int wavelet_levels = kDefaultWaveletLevels;
  int block_size = 8;
  Method method = Method::hbw_omp;
  StopRule stop = PsnrTarget{45.0};
  std::optional<Segmentation> segments;
};

struct Approximation {
  IntensityImage image;
  PursuitResult<double> result;
};

// Runs one pursuit method on the pixels (intensity domain) or on the CDF97
// coefficients (wavelet domain). PSNR is always measured against `img` in the
// intensity domain.
Approximation approximate_image(const IntensityImage& img, const PipelineConfig& config);

// HBW on randomly permuted, independently processed segments of the wavelet
// coefficient blocks. Budgets are split evenly (remainder to the first
// segments); PSNR targets are applied per segment on the coefficient-domain
// residual energy, raised and re-run (up to 8 rounds) while the true PSNR
// falls more than 0.1 dB short.
Approximation approximate_segmented(const IntensityImage& img, const PipelineConfig& config,
                                    std::size_t n_segments, std::uint64_t seed);

void validate(const PipelineConfig& config);

}  // namespace hbw
