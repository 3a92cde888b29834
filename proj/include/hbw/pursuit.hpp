#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "hbw/block_state.hpp"
#include "hbw/dictionary.hpp"
#include "hbw/max_tracker.hpp"
#include "hbw/metrics.hpp"
#include "hbw/partition.hpp"

namespace hbw {

struct AtomBudget {
  std::size_t atoms = 0;
};
struct PsnrTarget {
  double db = 45.0;
};
struct PerBlockError {
  double epsilon = 0.0;  // RMS error per pixel
};
using StopRule = std::variant<AtomBudget, PsnrTarget, PerBlockError>;

std::string describe(const StopRule& rule);

struct TraceEntry {
  std::size_t step = 0;
  std::size_t block_id = 0;
  AtomPair atom;
  double magnitude = 0;
};

template <typename Scalar>
struct BlockDecomposition {
  std::size_t block_id = 0;
  std::vector<std::pair<AtomPair, Scalar>> terms;
};

template <typename Scalar>
struct PursuitResult {
  std::vector<BlockState<Scalar>> states;  // positional, same order as the input partition
  std::vector<TraceEntry> trace;
  std::size_t total_atoms = 0;
  double residual_energy = 0;
  double achieved_psnr = 0;
  double sparsity_ratio = 0;
  bool no_atoms_selected = false;
  std::vector<std::string> warnings;

  std::vector<BlockDecomposition<Scalar>> decompositions() const {
    std::vector<BlockDecomposition<Scalar>> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back({s.block_id, merged_decomposition(s)});
    return out;
  }

  // Approximated blocks in partition order.
  std::vector<Matrix<Scalar>> approximations() const {
    std::vector<Matrix<Scalar>> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(s.approximation());
    return out;
  }
};

// Maps approximated blocks (partition order) to the true PSNR of the image
// they reconstruct. Used when the pursuit domain is not the pixel domain.
template <typename Scalar>
using PsnrEvaluator = std::function<double(const std::vector<Matrix<Scalar>>&)>;

template <typename Scalar>
struct PursuitOptions {
  double peak = kPsnrPeak;
  PsnrEvaluator<Scalar> evaluator;
  // Accepted band around a PSNR target for runs verified through the
  // evaluator.
  double psnr_tolerance_db = 0.1;
  int max_tightening_rounds = 8;
};

namespace detail {

template <typename Scalar>
double total_energy(const std::vector<BlockState<Scalar>>& states) {
  double e = 0;
  for (const auto& s : states) e += static_cast<double>(s.residual_energy());
  return e;
}

template <typename Scalar>
std::size_t pixel_count(const BlockPartition<Scalar>& blocks) {
  return blocks.size() * static_cast<std::size_t>(blocks.block_size * blocks.block_size);
}

template <typename Scalar>
void finalize(PursuitResult<Scalar>& r, std::size_t n_pixels, const PursuitOptions<Scalar>& opt) {
  r.total_atoms = r.trace.size();
  r.residual_energy = total_energy(r.states);
  r.achieved_psnr = opt.evaluator ? opt.evaluator(r.approximations())
                                  : psnr_from_error_energy(r.residual_energy, static_cast<double>(n_pixels), opt.peak);
  r.no_atoms_selected = r.total_atoms == 0;
  r.sparsity_ratio = sparsity_ratio_or_inf(n_pixels, r.total_atoms);
}

template <typename Scalar>
std::vector<BlockState<Scalar>> init_states(const BlockPartition<Scalar>& blocks,
                                            const SeparableDictionary<Scalar>& dict, PursuitKind kind,
                                            const std::vector<std::size_t>* ids) {
  if (blocks.block_size != dict.block_size()) {
    throw Error(ErrorCode::dimension_mismatch, "partition block size " + std::to_string(blocks.block_size) +
                                                   " differs from dictionary atom size " +
                                                   std::to_string(dict.block_size()));
  }
  std::vector<BlockState<Scalar>> states;
  states.reserve(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    states.push_back(make_block_state(ids ? (*ids)[i] : i, blocks.blocks[i], dict, kind));
  }
  return states;
}

// Independent pursuit at a fixed per-block error bound.
template <typename Scalar>
PursuitResult<Scalar> independent_at(const BlockPartition<Scalar>& blocks, const SeparableDictionary<Scalar>& dict,
                                     PursuitKind kind, double epsilon, const std::vector<std::size_t>* ids) {
  PursuitResult<Scalar> r;
  r.states = init_states(blocks, dict, kind, ids);
  const double bound = epsilon * epsilon * static_cast<double>(blocks.block_size * blocks.block_size);
  for (auto& s : r.states) {
    while (!s.saturated && static_cast<double>(s.residual_energy()) > bound) {
      r.trace.push_back({r.trace.size(), s.block_id, s.best.atom, static_cast<double>(s.best.magnitude)});
      pursuit_step(s, dict);
    }
  }
  return r;
}

}  // namespace detail

// Block-independent MP/OMP: every block runs until its own squared residual
// is at most epsilon^2 * N_b^2, or it saturates. A PSNR target is converted
// to the uniform per-pixel error epsilon^2 = peak^2 10^(-PSNR/10); with an
// evaluator, epsilon is then tightened until the verified PSNR lands within
// the tolerance band.
template <typename Scalar>
PursuitResult<Scalar> run_independent(const BlockPartition<Scalar>& blocks, const SeparableDictionary<Scalar>& dict,
                                      PursuitKind kind, const StopRule& stop,
                                      const PursuitOptions<Scalar>& opt = {},
                                      const std::vector<std::size_t>* block_ids = nullptr) {
  const std::size_t n_pixels = detail::pixel_count(blocks);
  if (const auto* e = std::get_if<PerBlockError>(&stop)) {
    auto r = detail::independent_at(blocks, dict, kind, e->epsilon, block_ids);
    detail::finalize(r, n_pixels, opt);
    return r;
  }
  const auto* target = std::get_if<PsnrTarget>(&stop);
  if (!target) {
    throw Error(ErrorCode::invalid_config, "independent pursuit accepts a per-block error or a PSNR target");
  }

  double log_eps = 0.5 * std::log(opt.peak * opt.peak * std::pow(10.0, -target->db / 10.0));
  auto r = detail::independent_at(blocks, dict, kind, std::exp(log_eps), block_ids);
  detail::finalize(r, n_pixels, opt);
  if (!opt.evaluator) return r;

  // log(epsilon) search. PSNR falls as epsilon grows; until a bracket exists
  // the step is the dB miss converted to a log-epsilon shift.
  auto in_band = [&](double p) { return std::abs(p - target->db) <= opt.psnr_tolerance_db; };
  std::optional<double> pass_log;  // PSNR above the band
  std::optional<double> fail_log;  // PSNR below the band
  PursuitResult<Scalar> best = r;
  for (int round = 1; round <= opt.max_tightening_rounds && !in_band(r.achieved_psnr); ++round) {
    if (r.achieved_psnr > target->db) {
      pass_log = log_eps;
    } else {
      fail_log = log_eps;
    }
    if (pass_log && fail_log) {
      log_eps = 0.5 * (*pass_log + *fail_log);
    } else {
      log_eps += (r.achieved_psnr - target->db) * std::log(10.0) / 20.0;
    }
    r = detail::independent_at(blocks, dict, kind, std::exp(log_eps), block_ids);
    detail::finalize(r, n_pixels, opt);
    const bool r_ok = r.achieved_psnr >= target->db - opt.psnr_tolerance_db;
    const bool best_ok = best.achieved_psnr >= target->db - opt.psnr_tolerance_db;
    if (in_band(r.achieved_psnr) || (r_ok && !best_ok) ||
        (r_ok == best_ok && std::abs(r.achieved_psnr - target->db) < std::abs(best.achieved_psnr - target->db))) {
      best = r;
    }
  }
  if (!in_band(best.achieved_psnr)) {
    best.warnings.push_back("independent run did not reach the PSNR band after " +
                            std::to_string(opt.max_tightening_rounds) + " tightening rounds");
  }
  return best;
}

// Hierarchized block-wise pursuit. Each iteration takes the (block, atom)
// pair with the largest |<D, R_q>_F| over all non-saturated blocks and
// advances only that block; the per-block maxima live in a tournament tree,
// so selecting the block costs O(log Q).
//
// Ties between blocks go to the lower block id; `block_ids` overrides the
// default ids (positions) when the partition has been permuted.
template <typename Scalar>
PursuitResult<Scalar> run_hbw(const BlockPartition<Scalar>& blocks, const SeparableDictionary<Scalar>& dict,
                              PursuitKind kind, const StopRule& stop, const PursuitOptions<Scalar>& opt = {},
                              const std::vector<std::size_t>* block_ids = nullptr) {
  if (std::holds_alternative<PerBlockError>(stop)) {
    throw Error(ErrorCode::invalid_config, "HBW pursuit accepts an atom budget or a PSNR target");
  }
  const std::size_t n_pixels = detail::pixel_count(blocks);
  PursuitResult<Scalar> r;
  r.states = detail::init_states(blocks, dict, kind, block_ids);

  std::vector<Scalar> maxima(r.states.size());
  std::vector<std::size_t> keys(r.states.size());
  for (std::size_t i = 0; i < r.states.size(); ++i) {
    const auto& s = r.states[i];
    maxima[i] = s.saturated ? MaxTracker<Scalar>::kInactive : s.best.magnitude;
    keys[i] = s.block_id;
  }
  MaxTracker<Scalar> tracker(std::move(maxima), std::move(keys));
  double energy = detail::total_energy(r.states);

  // Advances the globally best block by one atom. False when all saturated.
  auto advance = [&]() {
    const std::size_t slot = tracker.top();
    if (slot == MaxTracker<Scalar>::npos) return false;
    auto& s = r.states[slot];
    r.trace.push_back({r.trace.size(), s.block_id, s.best.atom, static_cast<double>(s.best.magnitude)});
    const double before = static_cast<double>(s.residual_energy());
    pursuit_step(s, dict);
    energy += static_cast<double>(s.residual_energy()) - before;
    tracker.update(slot, s.saturated ? MaxTracker<Scalar>::kInactive : s.best.magnitude);
    return true;
  };

  if (const auto* budget = std::get_if<AtomBudget>(&stop)) {
    const std::size_t capacity = n_pixels;
    if (budget->atoms > capacity) {
      std::ostringstream msg;
      msg << "budget-exceeds-capacity: K=" << budget->atoms << " > " << capacity << "; stopping at saturation";
      r.warnings.push_back(msg.str());
    }
    while (r.trace.size() < budget->atoms && advance()) {
    }
    detail::finalize(r, n_pixels, opt);
    return r;
  }

  const double target_db = std::get<PsnrTarget>(stop).db;
  const double energy_goal = error_energy_for_psnr(target_db, static_cast<double>(n_pixels), opt.peak);
  while (energy > energy_goal && advance()) {
  }
  if (!opt.evaluator) {
    // Residual energy is the exact error here, so the first prefix meeting
    // the goal is the smallest.
    if (energy > energy_goal) r.warnings.push_back("all blocks saturated before the PSNR target");
    detail::finalize(r, n_pixels, opt);
    return r;
  }

  // The residual energy is only a surrogate. Confirm with the evaluator,
  // extending in increments until the true PSNR meets the target, then cut
  // back to the shortest trace prefix that still meets it.
  const std::size_t increment = std::max<std::size_t>(r.states.size() / 100, 1);
  std::optional<std::size_t> failing_prefix;
  for (;;) {
    if (opt.evaluator(r.approximations()) >= target_db) break;
    failing_prefix = r.trace.size();
    bool any = false;
    for (std::size_t i = 0; i < increment && advance(); ++i) any = true;
    if (!any) {
      r.warnings.push_back("all blocks saturated before the PSNR target");
      detail::finalize(r, n_pixels, opt);
      return r;
    }
  }

  // Slot of each trace entry, for rebuilding prefixes.
  std::vector<std::size_t> entry_slot(r.trace.size());
  {
    std::vector<std::pair<std::size_t, std::size_t>> ids;
    ids.reserve(r.states.size());
    for (std::size_t i = 0; i < r.states.size(); ++i) ids.emplace_back(r.states[i].block_id, i);
    std::sort(ids.begin(), ids.end());
    for (std::size_t t = 0; t < r.trace.size(); ++t) {
      const auto it = std::lower_bound(ids.begin(), ids.end(), std::make_pair(r.trace[t].block_id, std::size_t{0}));
      entry_slot[t] = it->second;
    }
  }
  auto counts_at = [&](std::size_t prefix) {
    std::vector<std::size_t> counts(r.states.size(), 0);
    for (std::size_t t = 0; t < prefix; ++t) ++counts[entry_slot[t]];
    return counts;
  };
  auto psnr_at = [&](std::size_t prefix) {
    const auto counts = counts_at(prefix);
    std::vector<Matrix<Scalar>> approx;
    approx.reserve(r.states.size());
    for (std::size_t i = 0; i < r.states.size(); ++i) approx.push_back(partial_approximation(r.states[i], dict, counts[i]));
    return opt.evaluator(approx);
  };

  std::size_t hi = r.trace.size();
  std::size_t lo;
  if (failing_prefix) {
    lo = *failing_prefix;
  } else {
    // The surrogate was pessimistic; walk back until a prefix fails.
    std::size_t back = increment;
    for (;;) {
      if (hi == 0) {
        lo = 0;
        break;
      }
      const std::size_t probe = hi > back ? hi - back : 0;
      if (psnr_at(probe) >= target_db) {
        hi = probe;
        if (probe == 0) {
          lo = 0;
          break;
        }
        back *= 2;
      } else {
        lo = probe;
        break;
      }
    }
  }
  // Invariant: prefix `hi` meets the target, prefix `lo` does not (or lo == hi == 0).
  while (hi > lo + 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (psnr_at(mid) >= target_db) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  // One atom can overshoot the band; the prefix just short of the target is
  // taken instead when it still lies inside it.
  if (hi > 0 && psnr_at(hi) > target_db + opt.psnr_tolerance_db &&
      psnr_at(hi - 1) >= target_db - opt.psnr_tolerance_db) {
    --hi;
  }
  if (hi < r.trace.size()) {
    const auto counts = counts_at(hi);
    for (std::size_t i = 0; i < r.states.size(); ++i) truncate_block(r.states[i], dict, counts[i]);
    r.trace.resize(hi);
  }
  detail::finalize(r, n_pixels, opt);
  return r;
}

inline std::string describe(const StopRule& rule) {
  std::ostringstream out;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, AtomBudget>) {
          out << "budget:" << v.atoms;
        } else if constexpr (std::is_same_v<T, PsnrTarget>) {
          out << "psnr:" << v.db;
        } else {
          out << "epsilon:" << v.epsilon;
        }
      },
      rule);
  return out.str();
}

}  // namespace hbw
