#pragma once

// Point-matrix helpers shared by the bound and reachability code.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "ureach/interval.hpp"

namespace ureach {

/// exp(M) by Pade scaling and squaring.
template <typename Derived>
MatrixX<typename Derived::Scalar> expm(const Eigen::MatrixBase<Derived>& m) {
  return m.eval().exp();
}

/// Largest real part among the eigenvalues.
template <typename Derived>
typename Derived::Scalar spectral_abscissa(const Eigen::MatrixBase<Derived>& m) {
  Eigen::EigenSolver<MatrixX<typename Derived::Scalar>> es(m.eval(), false);
  return es.eigenvalues().real().maxCoeff();
}

/// Euclidean radius of the smallest origin-centred ball containing a box.
template <typename Scalar>
Scalar max_norm_over_box(const IntervalVector<Scalar>& box) {
  return box.unaryExpr([](const Interval<Scalar>& x) { return x.mag(); }).eval().norm();
}

}  // namespace ureach
