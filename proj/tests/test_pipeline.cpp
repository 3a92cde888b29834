#include <doctest.h>

#include "hbw/metrics.hpp"
#include "hbw/partition.hpp"
#include "hbw/pipeline.hpp"
#include "hbw/synthetic.hpp"

using hbw::Domain;
using hbw::Method;
using hbw::PipelineConfig;

namespace {

PipelineConfig config(Domain domain, Method method, hbw::StopRule stop, int block = 8) {
  PipelineConfig c;
  c.domain = domain;
  c.method = method;
  c.stop = stop;
  c.block_size = block;
  return c;
}

}  // namespace

TEST_CASE("method and domain names round-trip") {
  for (Method m : {Method::mp, Method::omp, Method::hbw_mp, Method::hbw_omp, Method::wt_baseline, Method::dct_baseline}) {
    CHECK(hbw::parse_method(hbw::to_string(m)) == m);
  }
  CHECK(hbw::parse_method("dct-baseline") == Method::dct_baseline);
  CHECK_FALSE(hbw::parse_method("ksvd"));
  CHECK(hbw::parse_domain("wavelet") == Domain::wavelet);
  CHECK_FALSE(hbw::parse_domain("fourier"));
}

TEST_CASE("defaults follow the 8x8, 45 dB protocol") {
  const PipelineConfig c;
  CHECK(c.block_size == 8);
  CHECK(c.wavelet_levels == 4);
  CHECK(std::get<hbw::PsnrTarget>(c.stop).db == 45.0);
}

TEST_CASE("full budget reconstructs exactly in both domains") {
  const auto img = hbw::synthetic::sinusoid_mix(32, 32);
  for (Domain d : {Domain::intensity, Domain::wavelet}) {
    const auto r = hbw::approximate_image(img, config(d, Method::hbw_omp, hbw::AtomBudget{32 * 32}));
    CHECK(r.result.achieved_psnr > 90.0);
    CHECK((r.image.pixels - img.pixels).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("intensity-domain independent OMP meets the target") {
  const auto img = hbw::synthetic::gaussian(32, 32);
  const auto r = hbw::approximate_image(img, config(Domain::intensity, Method::omp, hbw::PsnrTarget{45.0}));
  CHECK(r.result.achieved_psnr >= 44.9);
  CHECK(r.result.achieved_psnr == doctest::Approx(hbw::psnr(img, r.image)));
}

TEST_CASE("wavelet-domain runs land on the PSNR band") {
  const auto img = hbw::synthetic::gaussian(64, 64);
  for (Method m : {Method::omp, Method::hbw_omp, Method::mp, Method::hbw_mp}) {
    const auto r = hbw::approximate_image(img, config(Domain::wavelet, m, hbw::PsnrTarget{45.0}));
    CHECK(r.result.achieved_psnr >= 44.9);
    // A run left above the band says so.
    if (!hbw::is_hbw(m) && r.result.achieved_psnr > 45.1) CHECK_FALSE(r.result.warnings.empty());
    CHECK(r.result.achieved_psnr == doctest::Approx(hbw::psnr(img, r.image)));
    CHECK(r.result.sparsity_ratio * static_cast<double>(r.result.total_atoms) == doctest::Approx(4096.0));
  }
}

TEST_CASE("HBW-OMP is at least as sparse as OMP on smooth wavelet content") {
  const auto img = hbw::synthetic::gaussian(64, 64);
  const auto omp = hbw::approximate_image(img, config(Domain::wavelet, Method::omp, hbw::PsnrTarget{45.0}));
  const auto hbw_omp = hbw::approximate_image(img, config(Domain::wavelet, Method::hbw_omp, hbw::PsnrTarget{45.0}));
  CHECK(hbw_omp.result.sparsity_ratio >= omp.result.sparsity_ratio);
}

TEST_CASE("one segment reproduces the whole-image run at the same budget") {
  const auto img = hbw::synthetic::piecewise_constant(64, 64);
  const auto c = config(Domain::wavelet, Method::hbw_omp, hbw::AtomBudget{300});
  const auto seg = hbw::approximate_segmented(img, c, 1, 99);
  const auto whole = hbw::approximate_image(img, c);
  REQUIRE(seg.result.trace.size() == whole.result.trace.size());
  for (std::size_t t = 0; t < whole.result.trace.size(); ++t) {
    CHECK(seg.result.trace[t].block_id == whole.result.trace[t].block_id);
    CHECK(seg.result.trace[t].atom == whole.result.trace[t].atom);
  }
  for (std::size_t i = 0; i < whole.result.states.size(); ++i) CHECK(seg.result.states[i].block_id == i);
  CHECK(seg.image.pixels == whole.image.pixels);
}

TEST_CASE("segmented PSNR runs stay close to the whole image at the same K") {
  const auto img = hbw::synthetic::sinusoid_mix(64, 64);
  const auto seg = hbw::approximate_segmented(img, config(Domain::wavelet, Method::hbw_omp, hbw::PsnrTarget{45.0}), 4, 7);
  CHECK(seg.result.achieved_psnr >= 44.9);
  const auto whole =
      hbw::approximate_image(img, config(Domain::wavelet, Method::hbw_omp, hbw::AtomBudget{seg.result.total_atoms}));
  CHECK(std::abs(seg.result.achieved_psnr - whole.result.achieved_psnr) < 1.0);
  const auto again = hbw::approximate_segmented(img, config(Domain::wavelet, Method::hbw_omp, hbw::PsnrTarget{45.0}), 4, 7);
  CHECK(again.image.pixels == seg.image.pixels);
}

TEST_CASE("segmented budgets are split with the remainder first") {
  const auto img = hbw::synthetic::sinusoid_mix(64, 64);
  const auto seg = hbw::approximate_segmented(img, config(Domain::wavelet, Method::hbw_mp, hbw::AtomBudget{203}), 4, 3);
  CHECK(seg.result.total_atoms == 203);
  std::vector<std::size_t> per(64, 0);
  for (const auto& e : seg.result.trace) ++per[e.block_id];
  std::size_t sum = 0;
  for (auto v : per) sum += v;
  CHECK(sum == 203);
}

TEST_CASE("segmentation rejects bad configurations") {
  const auto img = hbw::synthetic::gaussian(64, 64);
  CHECK_THROWS_AS(hbw::approximate_segmented(img, config(Domain::intensity, Method::hbw_omp, hbw::AtomBudget{10}), 4, 1),
                  hbw::Error);
  CHECK_THROWS_AS(hbw::approximate_segmented(img, config(Domain::wavelet, Method::omp, hbw::AtomBudget{10}), 4, 1),
                  hbw::Error);
  CHECK_THROWS_AS(hbw::approximate_segmented(img, config(Domain::wavelet, Method::hbw_omp, hbw::AtomBudget{10}), 5, 1),
                  hbw::Error);
}

TEST_CASE("invalid configurations are rejected") {
  const auto img = hbw::synthetic::gaussian(32, 32);
  CHECK_THROWS_AS(hbw::approximate_image(img, config(Domain::wavelet, Method::omp, hbw::AtomBudget{1}, 1)), hbw::Error);
  CHECK_THROWS_AS(hbw::approximate_image(img, config(Domain::wavelet, Method::wt_baseline, hbw::AtomBudget{1})),
                  hbw::Error);
  CHECK_THROWS_AS(hbw::approximate_image(img, config(Domain::intensity, Method::omp, hbw::AtomBudget{1}, 6)),
                  hbw::Error);
}
