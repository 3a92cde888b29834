#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "hbw/dictionary.hpp"
#include "hbw/error.hpp"
#include "hbw/types.hpp"

namespace hbw {

enum class PursuitKind { mp, omp };

template <typename Scalar>
struct Candidate {
  AtomPair atom;
  Scalar value = 0;      // signed correlation <D, R>_F
  Scalar magnitude = 0;  // |value|
};

// Per-block pursuit state. Matrices of the selected atoms, the orthonormal
// basis of their span and the biorthogonal duals are held vectorized
// (column-major, one N_b^2 column per selected atom) so that coefficient and
// projection updates are plain matrix-vector products.
template <typename Scalar>
struct BlockState {
  std::size_t block_id = 0;
  PursuitKind kind = PursuitKind::omp;
  Matrix<Scalar> target;
  Matrix<Scalar> residual;
  std::vector<AtomPair> selected;
  // OMP: least-squares coefficients of `selected`. MP: coefficient spent at
  // each step (an atom may appear more than once).
  Vector<Scalar> coeffs;
  Matrix<Scalar> atom_vecs;
  Matrix<Scalar> ortho_basis;
  Matrix<Scalar> duals;
  Candidate<Scalar> best;
  bool saturated = false;
  Scalar target_norm = 0;
  std::vector<bool> used;  // OMP only: atoms already in the span

  std::size_t k() const { return selected.size(); }
  Eigen::Index dim() const { return target.size(); }
  Scalar residual_energy() const { return residual.squaredNorm(); }
  Matrix<Scalar> approximation() const { return target - residual; }
};

inline constexpr double kSaturationTolerance = 1e-9;
inline constexpr double kDegenerateTolerance = 1e-10;

namespace detail {

template <typename Scalar>
Matrix<Scalar> as_block(const Vector<Scalar>& v, Eigen::Index n) {
  return Eigen::Map<const Matrix<Scalar>>(v.data(), n, n);
}

template <typename Scalar>
Vector<Scalar> vectorized(const Matrix<Scalar>& m) {
  return Eigen::Map<const Vector<Scalar>>(m.data(), m.size());
}

// Argmax of |corr| scanning pairs in lexicographic order; strict comparison
// keeps the first (smallest) pair among ties. `excluded` may be empty.
template <typename Scalar>
bool argmax_correlation(const Matrix<Scalar>& corr, const std::vector<bool>& excluded, Candidate<Scalar>& out) {
  const Eigen::Index count = corr.rows();
  bool found = false;
  Scalar best = -1;
  for (Eigen::Index p = 0; p < count; ++p) {
    for (Eigen::Index q = 0; q < count; ++q) {
      const auto n = static_cast<std::size_t>(p * count + q);
      if (!excluded.empty() && excluded[n]) continue;
      const Scalar mag = std::abs(corr(p, q));
      if (mag > best) {
        best = mag;
        out = Candidate<Scalar>{{p, q}, corr(p, q), mag};
        found = true;
      }
    }
  }
  return found;
}

template <typename Scalar>
void update_saturation(BlockState<Scalar>& s) {
  const auto tol = static_cast<Scalar>(kSaturationTolerance) * (1 + s.target_norm);
  s.saturated = s.k() >= static_cast<std::size_t>(s.dim()) || s.residual.norm() <= tol;
}

template <typename Scalar>
void refresh_best(BlockState<Scalar>& s, const SeparableDictionary<Scalar>& dict) {
  s.best = Candidate<Scalar>{};
  if (s.saturated) return;
  const Matrix<Scalar> corr = all_correlations(dict, s.residual);
  if (!argmax_correlation(corr, s.used, s.best)) s.saturated = true;
}

// Adds `atom` to the OMP span. Returns false (state untouched) when the atom
// is numerically inside the current span.
template <typename Scalar>
bool omp_append(BlockState<Scalar>& s, const SeparableDictionary<Scalar>& dict, AtomPair atom) {
  const Eigen::Index n = dict.block_size();
  const Eigen::Index k = static_cast<Eigen::Index>(s.k());
  const Vector<Scalar> d = vectorized(dict.atom(atom));

  // Gram-Schmidt against the current basis plus one re-orthogonalization pass.
  Vector<Scalar> psi = d;
  if (k > 0) {
    const auto basis = s.ortho_basis.leftCols(k);
    psi -= basis * (basis.transpose() * psi);
    psi -= basis * (basis.transpose() * psi);
  }
  const Scalar psi_norm = psi.norm();
  if (psi_norm < static_cast<Scalar>(kDegenerateTolerance)) return false;

  const Vector<Scalar> new_dual = psi / (psi_norm * psi_norm);
  s.ortho_basis.conservativeResize(n * n, k + 1);
  s.ortho_basis.col(k) = psi / psi_norm;
  s.duals.conservativeResize(n * n, k + 1);
  if (k > 0) {
    // Old duals lose their component along the new atom.
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> overlaps = d.transpose() * s.duals.leftCols(k);
    s.duals.leftCols(k) -= new_dual * overlaps;
  }
  s.duals.col(k) = new_dual;
  s.atom_vecs.conservativeResize(n * n, k + 1);
  s.atom_vecs.col(k) = d;
  s.selected.push_back(atom);
  s.used[static_cast<std::size_t>(dict.linear_index(atom))] = true;

  const Vector<Scalar> t = vectorized(s.target);
  s.coeffs = s.duals.transpose() * t;
  const Vector<Scalar> r = t - s.atom_vecs * s.coeffs;
  s.residual = as_block<Scalar>(r, n);
  return true;
}

template <typename Scalar>
void mp_append(BlockState<Scalar>& s, const SeparableDictionary<Scalar>& dict, AtomPair atom, Scalar coefficient) {
  const Eigen::Index k = static_cast<Eigen::Index>(s.k());
  const Matrix<Scalar> a = dict.atom(atom);
  s.residual -= coefficient * a;
  s.selected.push_back(atom);
  s.coeffs.conservativeResize(k + 1);
  s.coeffs(k) = coefficient;
}

}  // namespace detail

// R^0 = target; the first correlation scan is done here so the cached best
// candidate is valid from the start.
template <typename Scalar, typename Derived>
BlockState<Scalar> make_block_state(std::size_t block_id, const Eigen::MatrixBase<Derived>& target,
                                    const SeparableDictionary<Scalar>& dict, PursuitKind kind) {
  if (target.rows() != dict.block_size() || target.cols() != dict.block_size()) {
    throw Error(ErrorCode::dimension_mismatch, "block and dictionary sizes differ");
  }
  BlockState<Scalar> s;
  s.block_id = block_id;
  s.kind = kind;
  s.target = target;
  s.residual = target;
  s.target_norm = s.target.norm();
  s.coeffs.resize(0);
  if (kind == PursuitKind::omp) s.used.assign(static_cast<std::size_t>(dict.atom_count()), false);
  detail::update_saturation(s);
  detail::refresh_best(s, dict);
  return s;
}

// One matching pursuit step: the cached best atom gets its raw correlation as
// coefficient. Atoms may be selected again on later steps.
template <typename Scalar>
void mp_step(BlockState<Scalar>& s, const SeparableDictionary<Scalar>& dict) {
  if (s.saturated) throw Error(ErrorCode::saturated_block, "block " + std::to_string(s.block_id));
  detail::mp_append(s, dict, s.best.atom, s.best.value);
  detail::update_saturation(s);
  detail::refresh_best(s, dict);
}

// One orthogonal matching pursuit step. A candidate that is numerically in
// the span of the selected atoms is skipped for the next best one; when no
// candidate remains the block is marked saturated and nothing is added.
template <typename Scalar>
void omp_step(BlockState<Scalar>& s, const SeparableDictionary<Scalar>& dict) {
  if (s.saturated) throw Error(ErrorCode::saturated_block, "block " + std::to_string(s.block_id));
  if (detail::omp_append(s, dict, s.best.atom)) {
    detail::update_saturation(s);
    detail::refresh_best(s, dict);
    return;
  }
  const Matrix<Scalar> corr = all_correlations(dict, s.residual);
  std::vector<bool> excluded = s.used;
  excluded[static_cast<std::size_t>(dict.linear_index(s.best.atom))] = true;
  Candidate<Scalar> next;
  while (detail::argmax_correlation(corr, excluded, next)) {
    if (detail::omp_append(s, dict, next.atom)) {
      detail::update_saturation(s);
      detail::refresh_best(s, dict);
      return;
    }
    excluded[static_cast<std::size_t>(dict.linear_index(next.atom))] = true;
  }
  s.saturated = true;
  s.best = Candidate<Scalar>{};
}

template <typename Scalar>
void pursuit_step(BlockState<Scalar>& s, const SeparableDictionary<Scalar>& dict) {
  if (s.kind == PursuitKind::omp) {
    omp_step(s, dict);
  } else {
    mp_step(s, dict);
  }
}

// Rebuilds a block state from a forced atom sequence using the same update
// arithmetic as the steps, so a replayed prefix matches the original run.
template <typename Scalar, typename Derived>
BlockState<Scalar> replay_block(std::size_t block_id, const Eigen::MatrixBase<Derived>& target,
                                const SeparableDictionary<Scalar>& dict, PursuitKind kind,
                                const std::vector<AtomPair>& atoms, const Vector<Scalar>& mp_coeffs = {}) {
  BlockState<Scalar> s;
  s.block_id = block_id;
  s.kind = kind;
  s.target = target;
  s.residual = target;
  s.target_norm = s.target.norm();
  if (kind == PursuitKind::omp) s.used.assign(static_cast<std::size_t>(dict.atom_count()), false);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (kind == PursuitKind::omp) {
      if (!detail::omp_append(s, dict, atoms[i])) {
        throw Error(ErrorCode::invalid_config, "replayed atom is degenerate");
      }
    } else {
      detail::mp_append(s, dict, atoms[i], mp_coeffs(static_cast<Eigen::Index>(i)));
    }
  }
  detail::update_saturation(s);
  detail::refresh_best(s, dict);
  return s;
}

// Keeps only the first j selections of a block.
template <typename Scalar>
void truncate_block(BlockState<Scalar>& s, const SeparableDictionary<Scalar>& dict, std::size_t j) {
  if (j >= s.k()) return;
  std::vector<AtomPair> atoms(s.selected.begin(), s.selected.begin() + static_cast<std::ptrdiff_t>(j));
  Vector<Scalar> mp_coeffs;
  if (s.kind == PursuitKind::mp) mp_coeffs = s.coeffs.head(static_cast<Eigen::Index>(j));
  const Matrix<Scalar> target = s.target;
  s = replay_block(s.block_id, target, dict, s.kind, atoms, mp_coeffs);
}

// Approximation the block had after its first j selections. For OMP this is
// the projection of the target onto the first j orthonormal basis vectors;
// the basis is nested, so no refit is needed.
template <typename Scalar>
Matrix<Scalar> partial_approximation(const BlockState<Scalar>& s, const SeparableDictionary<Scalar>& dict,
                                     std::size_t j) {
  const Eigen::Index n = dict.block_size();
  if (j >= s.k()) return s.approximation();
  if (j == 0) return Matrix<Scalar>::Zero(n, n);
  const auto jj = static_cast<Eigen::Index>(j);
  if (s.kind == PursuitKind::omp) {
    const Vector<Scalar> t = detail::vectorized(s.target);
    const auto basis = s.ortho_basis.leftCols(jj);
    const Vector<Scalar> proj = basis * (basis.transpose() * t);
    return detail::as_block<Scalar>(proj, n);
  }
  Matrix<Scalar> approx = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index i = 0; i < jj; ++i) approx += s.coeffs(i) * dict.atom(s.selected[static_cast<std::size_t>(i)]);
  return approx;
}

// Final atomic decomposition: one coefficient per distinct atom, atoms in
// lexicographic order. Repeated MP selections are summed.
template <typename Scalar>
std::vector<std::pair<AtomPair, Scalar>> merged_decomposition(const BlockState<Scalar>& s) {
  std::map<AtomPair, Scalar> merged;
  for (std::size_t i = 0; i < s.k(); ++i) merged[s.selected[i]] += s.coeffs(static_cast<Eigen::Index>(i));
  return {merged.begin(), merged.end()};
}

}  // namespace hbw
