#pragma once

#include <cmath>
#include <compare>
#include <numbers>
#include <string>

#include "hbw/error.hpp"
#include "hbw/types.hpp"

namespace hbw {

// A bank of 1D atoms stored one per column, each with unit Euclidean norm.
template <typename Scalar>
struct AtomBank {
  Matrix<Scalar> atoms;

  Eigen::Index atom_len() const { return atoms.rows(); }
  Eigen::Index count() const { return atoms.cols(); }
};

// A 2D atom is identified by the ordered pair (p, q) of 1D atoms; the atom
// matrix is column_p * column_q^T. Pairs order lexicographically, which is
// the tie-break order used by every argmax in the pursuits.
struct AtomPair {
  Eigen::Index p = 0;
  Eigen::Index q = 0;

  friend auto operator<=>(const AtomPair&, const AtomPair&) = default;
};

// Redundant discrete cosine bank: atom i has entries
// w_i cos(pi (2j-1)(i-1) / (2m)), j = 1..n, normalized to unit norm.
template <typename Scalar = double>
AtomBank<Scalar> build_rdc(Eigen::Index n, Eigen::Index m) {
  if (n < 1 || m < n) {
    throw Error(ErrorCode::invalid_dimensions,
                "RDC bank needs n >= 1 and m >= n (got n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")");
  }
  AtomBank<Scalar> bank{Matrix<Scalar>(n, m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double arg = std::numbers::pi * static_cast<double>(2 * j + 1) * static_cast<double>(i) /
                         (2.0 * static_cast<double>(m));
      bank.atoms(j, i) = static_cast<Scalar>(std::cos(arg));
    }
    bank.atoms.col(i).normalize();
  }
  return bank;
}

template <typename Scalar = double>
AtomBank<Scalar> build_dirac(Eigen::Index n) {
  if (n < 1) throw Error(ErrorCode::invalid_dimensions, "Dirac basis needs n >= 1");
  return AtomBank<Scalar>{Matrix<Scalar>::Identity(n, n)};
}

// Separable 2D dictionary: every 2D atom is the tensor product of two columns
// of the same 1D bank. The dictionary is immutable once built.
template <typename Scalar>
class SeparableDictionary {
 public:
  explicit SeparableDictionary(AtomBank<Scalar> bank) : bank_(std::move(bank)) {}

  const AtomBank<Scalar>& bank() const { return bank_; }
  const Matrix<Scalar>& atoms() const { return bank_.atoms; }
  Eigen::Index block_size() const { return bank_.atom_len(); }
  Eigen::Index bank_count() const { return bank_.count(); }
  Eigen::Index atom_count() const { return bank_.count() * bank_.count(); }

  Eigen::Index linear_index(AtomPair a) const { return a.p * bank_.count() + a.q; }
  AtomPair pair_index(Eigen::Index n) const { return {n / bank_.count(), n % bank_.count()}; }

  Matrix<Scalar> atom(AtomPair a) const { return bank_.atoms.col(a.p) * bank_.atoms.col(a.q).transpose(); }

 private:
  AtomBank<Scalar> bank_;
};

// RDC bank with redundancy two joined with the Dirac basis: 3n 1D atoms.
template <typename Scalar = double>
SeparableDictionary<Scalar> build_rdcdb(Eigen::Index n) {
  const auto rdc = build_rdc<Scalar>(n, 2 * n);
  const auto dirac = build_dirac<Scalar>(n);
  Matrix<Scalar> atoms(n, rdc.count() + dirac.count());
  atoms << rdc.atoms, dirac.atoms;
  return SeparableDictionary<Scalar>(AtomBank<Scalar>{std::move(atoms)});
}

// Entry (p, q) is <column_p column_q^T, block>_F = column_p^T block column_q,
// evaluated as bank^T * block * bank without forming any 2D atom.
template <typename Scalar, typename Derived>
Matrix<Scalar> all_correlations(const SeparableDictionary<Scalar>& dict, const Eigen::MatrixBase<Derived>& block) {
  const Eigen::Index n = dict.block_size();
  if (block.rows() != n || block.cols() != n) {
    throw Error(ErrorCode::dimension_mismatch, "block is " + std::to_string(block.rows()) + "x" +
                                                   std::to_string(block.cols()) + ", dictionary expects " +
                                                   std::to_string(n) + "x" + std::to_string(n));
  }
  return dict.atoms().transpose() * block * dict.atoms();
}

}  // namespace hbw
