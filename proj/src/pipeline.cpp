#include "hbw/pipeline.hpp"

#include <array>
#include <utility>

#include "hbw/metrics.hpp"
#include "hbw/partition.hpp"

namespace hbw {
namespace {

constexpr std::array<std::pair<Method, std::string_view>, 6> kMethodNames = {{
    {Method::mp, "mp"},
    {Method::omp, "omp"},
    {Method::hbw_mp, "hbw-mp"},
    {Method::hbw_omp, "hbw-omp"},
    {Method::wt_baseline, "wt"},
    {Method::dct_baseline, "dct"},
}};

MatrixXd pursuit_domain_matrix(const IntensityImage& img, const PipelineConfig& config) {
  if (config.domain == Domain::intensity) return img.pixels;
  return cdf97_forward(img, config.wavelet_levels).coeffs;
}

IntensityImage to_intensity(MatrixXd coeffs, const IntensityImage& reference, const PipelineConfig& config) {
  if (config.domain == Domain::intensity) return IntensityImage(std::move(coeffs), reference.peak);
  return cdf97_inverse(TransformedImage{std::move(coeffs), config.wavelet_levels, reference.peak});
}

BlockPartition<double> with_blocks(const BlockPartition<double>& layout, std::vector<MatrixXd> blocks) {
  BlockPartition<double> p;
  p.block_size = layout.block_size;
  p.grid_rows = layout.grid_rows;
  p.grid_cols = layout.grid_cols;
  p.origins = layout.origins;
  p.blocks = std::move(blocks);
  return p;
}

void finish(Approximation& out, const IntensityImage& img) {
  auto& r = out.result;
  r.total_atoms = r.trace.size();
  r.achieved_psnr = psnr(img, out.image);
  r.no_atoms_selected = r.total_atoms == 0;
  r.sparsity_ratio = sparsity_ratio_or_inf(static_cast<std::size_t>(img.pixel_count()), r.total_atoms);
}

}  // namespace

std::string_view to_string(Domain d) { return d == Domain::intensity ? "intensity" : "wavelet"; }

std::string_view to_string(Method m) {
  for (const auto& [method, name] : kMethodNames)
    if (method == m) return name;
  return "unknown";
}

std::optional<Domain> parse_domain(std::string_view s) {
  if (s == "intensity") return Domain::intensity;
  if (s == "wavelet") return Domain::wavelet;
  return std::nullopt;
}

std::optional<Method> parse_method(std::string_view s) {
  for (const auto& [method, name] : kMethodNames)
    if (s == name) return method;
  if (s == "wt-baseline") return Method::wt_baseline;
  if (s == "dct-baseline") return Method::dct_baseline;
  return std::nullopt;
}

void validate(const PipelineConfig& config) {
  if (config.block_size < 2) throw Error(ErrorCode::invalid_config, "block size must be at least 2");
  if (config.wavelet_levels < 0) throw Error(ErrorCode::invalid_config, "wavelet levels must be non-negative");
  if (const auto* b = std::get_if<PsnrTarget>(&config.stop); b && !(b->db >= 0)) {
    throw Error(ErrorCode::invalid_config, "PSNR target must be non-negative");
  }
  if (config.segments && config.segments->count == 0) {
    throw Error(ErrorCode::invalid_config, "segment count must be positive");
  }
}

Approximation approximate_image(const IntensityImage& img, const PipelineConfig& config) {
  validate(config);
  if (!is_pursuit(config.method)) {
    throw Error(ErrorCode::invalid_config, "approximate_image runs pursuit methods only");
  }
  const auto partition = partition_blocks(pursuit_domain_matrix(img, config), config.block_size);
  const auto dict = build_rdcdb<double>(config.block_size);

  PursuitOptions<double> options;
  options.peak = kPsnrPeak;
  if (config.domain == Domain::wavelet) {
    options.evaluator = [&](const std::vector<MatrixXd>& blocks) {
      return psnr(img, to_intensity(assemble_blocks(with_blocks(partition, blocks)), img, config));
    };
  }

  Approximation out;
  const PursuitKind kind = pursuit_kind(config.method);
  out.result = is_hbw(config.method) ? run_hbw(partition, dict, kind, config.stop, options)
                                     : run_independent(partition, dict, kind, config.stop, options);
  out.image = to_intensity(assemble_blocks(with_blocks(partition, out.result.approximations())), img, config);
  finish(out, img);
  return out;
}

Approximation approximate_segmented(const IntensityImage& img, const PipelineConfig& config,
                                    std::size_t n_segments, std::uint64_t seed) {
  validate(config);
  if (config.domain != Domain::wavelet) {
    throw Error(ErrorCode::invalid_config, "segmented approximation runs in the wavelet domain");
  }
  if (!is_hbw(config.method)) {
    throw Error(ErrorCode::invalid_config, "segmented approximation runs HBW methods only");
  }
  if (std::holds_alternative<PerBlockError>(config.stop)) {
    throw Error(ErrorCode::invalid_config, "segmented approximation needs an atom budget or a PSNR target");
  }

  const auto partition = partition_blocks(pursuit_domain_matrix(img, config), config.block_size);
  const auto dict = build_rdcdb<double>(config.block_size);
  const auto [permuted, perm] = permute_blocks(partition, seed);
  const auto segments = segment_blocks(permuted, n_segments);
  const std::size_t per = permuted.size() / n_segments;

  auto run = [&](const StopRule& rule) {
    Approximation out;
    auto& merged = out.result;
    merged.states.reserve(permuted.size());
    for (std::size_t s = 0; s < n_segments; ++s) {
      const std::vector<std::size_t> ids(perm.mapping.begin() + static_cast<std::ptrdiff_t>(s * per),
                                         perm.mapping.begin() + static_cast<std::ptrdiff_t>((s + 1) * per));
      StopRule stop = rule;
      if (const auto* budget = std::get_if<AtomBudget>(&rule)) {
        const std::size_t share = budget->atoms / n_segments + (s < budget->atoms % n_segments ? 1 : 0);
        stop = AtomBudget{share};
      }
      auto part = run_hbw(segments[s], dict, pursuit_kind(config.method), stop, PursuitOptions<double>{}, &ids);
      for (auto& e : part.trace) {
        e.step = merged.trace.size();
        merged.trace.push_back(e);
      }
      for (auto& w : part.warnings) merged.warnings.push_back("segment " + std::to_string(s) + ": " + w);
      for (auto& st : part.states) merged.states.push_back(std::move(st));
    }

    // Back to source order. States carry their original block ids.
    auto permuted_approx = permuted;
    permuted_approx.blocks = merged.approximations();
    const auto restored = unpermute_blocks(permuted_approx, perm);
    std::vector<BlockState<double>> ordered(merged.states.size());
    for (std::size_t i = 0; i < merged.states.size(); ++i) ordered[perm.mapping[i]] = std::move(merged.states[i]);
    merged.states = std::move(ordered);
    merged.residual_energy = detail::total_energy(merged.states);

    out.image = to_intensity(assemble_blocks(restored), img, config);
    finish(out, img);
    return out;
  };

  const auto* target = std::get_if<PsnrTarget>(&config.stop);
  if (!target) return run(config.stop);

  // Segments stop on the coefficient-domain energy. When the true PSNR falls
  // short, the segment target is raised by the miss and the run repeated.
  const PursuitOptions<double> defaults;
  double segment_db = target->db;
  Approximation out = run(PsnrTarget{segment_db});
  for (int round = 1; round <= defaults.max_tightening_rounds &&
                      out.result.achieved_psnr < target->db - defaults.psnr_tolerance_db;
       ++round) {
    segment_db += target->db - out.result.achieved_psnr;
    if (segment_db > kPsnrCap) break;
    out = run(PsnrTarget{segment_db});
  }
  if (out.result.achieved_psnr < target->db - defaults.psnr_tolerance_db) {
    out.result.warnings.push_back("segmented run did not reach the PSNR target");
  }
  return out;
}

}  // namespace hbw
