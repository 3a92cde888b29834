#pragma once

#include <Eigen/Dense>

namespace hbw {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

// Frobenius inner product <a, b>_F.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar frobenius_dot(const Eigen::MatrixBase<DerivedA>& a,
                                        const Eigen::MatrixBase<DerivedB>& b) {
  return a.cwiseProduct(b).sum();
}

}  // namespace hbw
