#pragma once

// Generalized stars <a, G, P> with box predicates c_lo <= alpha <= c_hi.
//
// With a box predicate every star is a zonotope, so support functions and
// bounding boxes have closed forms and no LP is ever needed.

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ureach/errors.hpp"
#include "ureach/interval.hpp"

namespace ureach {

/// Axis-aligned box, one interval per coordinate.
template <typename Scalar>
using Box = IntervalVector<Scalar>;
using Boxd = Box<double>;

template <typename Scalar>
class Star {
 public:
  using Vector = VectorX<Scalar>;
  using Matrix = MatrixX<Scalar>;

  Star() = default;

  /// Generators are the columns of `generators`; alpha_j in [lower(j), upper(j)].
  Star(Vector anchor, Matrix generators, Vector coeff_lower, Vector coeff_upper)
      : anchor_(std::move(anchor)),
        generators_(std::move(generators)),
        lower_(std::move(coeff_lower)),
        upper_(std::move(coeff_upper)) {
    if (generators_.rows() != anchor_.size() && generators_.cols() > 0) {
      throw DimensionMismatch("Star: generator length differs from anchor dimension");
    }
    if (generators_.cols() == 0) generators_.resize(anchor_.size(), 0);
    if (lower_.size() != generators_.cols() || upper_.size() != generators_.cols()) {
      throw DimensionMismatch("Star: one coefficient bound per generator required");
    }
    for (Eigen::Index j = 0; j < lower_.size(); ++j) {
      if (!(lower_(j) <= upper_(j))) {
        throw InvalidArgument("Star: empty coefficient interval for generator " +
                              std::to_string(j));
      }
    }
  }

  /// A single point, no generators.
  static Star point(const Vector& x) {
    return Star(x, Matrix(x.size(), 0), Vector(0), Vector(0));
  }

  /// <0, I_n, box>, the form interval reduction produces.
  static Star from_box(const Box<Scalar>& box) {
    const Eigen::Index n = box.size();
    return Star(Vector::Zero(n), Matrix::Identity(n, n), ureach::lower(box), ureach::upper(box));
  }

  Eigen::Index dim() const { return anchor_.size(); }
  Eigen::Index num_generators() const { return generators_.cols(); }

  const Vector& anchor() const { return anchor_; }
  const Matrix& generators() const { return generators_; }
  const Vector& coeff_lower() const { return lower_; }
  const Vector& coeff_upper() const { return upper_; }
  Interval<Scalar> coeff(Eigen::Index j) const { return {lower_(j), upper_(j)}; }

  /// a + G alpha for a coefficient vector (no bound check).
  Vector evaluate(const Vector& alpha) const { return anchor_ + generators_ * alpha; }

  friend bool operator==(const Star& a, const Star& b) {
    return a.anchor_ == b.anchor_ && a.generators_ == b.generators_ && a.lower_ == b.lower_ &&
           a.upper_ == b.upper_;
  }

 private:
  Vector anchor_;
  Matrix generators_;
  Vector lower_;
  Vector upper_;
};

using Stard = Star<double>;

namespace detail {

template <typename Scalar>
void require_dim(const Star<Scalar>& s, Eigen::Index n, const char* what) {
  if (s.dim() != n) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(n) +
                            ", star has " + std::to_string(s.dim()));
  }
}

// Per-axis interval sum a + sum_j [c_lo, c_hi] g_j, written back as bounds.
template <typename Scalar>
void axis_hull(const VectorX<Scalar>& anchor, const MatrixX<Scalar>& gens,
               const VectorX<Scalar>& lo, const VectorX<Scalar>& hi, VectorX<Scalar>& out_lo,
               VectorX<Scalar>& out_hi) {
  const auto a = gens.array().rowwise() * lo.transpose().array();
  const auto b = gens.array().rowwise() * hi.transpose().array();
  out_lo = anchor + a.min(b).rowwise().sum().matrix();
  out_hi = anchor + a.max(b).rowwise().sum().matrix();
}

}  // namespace detail

/// A <a, G, P> = <A a, A G, P>.
template <typename Scalar, typename Derived>
Star<Scalar> linear_map(const Eigen::MatrixBase<Derived>& a, const Star<Scalar>& s) {
  if (a.cols() != s.dim()) {
    throw DimensionMismatch("linear_map: matrix has " + std::to_string(a.cols()) +
                            " columns, star dimension " + std::to_string(s.dim()));
  }
  return Star<Scalar>(a * s.anchor(), a * s.generators(), s.coeff_lower(), s.coeff_upper());
}

/// <a1 + a2, G1 u G2, P1 ^ P2>; coefficient variables stay disjoint.
template <typename Scalar>
Star<Scalar> minkowski_sum(const Star<Scalar>& s1, const Star<Scalar>& s2) {
  detail::require_dim(s2, s1.dim(), "minkowski_sum");
  const Eigen::Index m1 = s1.num_generators(), m2 = s2.num_generators();
  MatrixX<Scalar> g(s1.dim(), m1 + m2);
  g << s1.generators(), s2.generators();
  VectorX<Scalar> lo(m1 + m2), hi(m1 + m2);
  lo << s1.coeff_lower(), s2.coeff_lower();
  hi << s1.coeff_upper(), s2.coeff_upper();
  return Star<Scalar>(s1.anchor() + s2.anchor(), std::move(g), std::move(lo), std::move(hi));
}

/// max over x in S of dir . x.
template <typename Scalar, typename Derived>
Scalar support(const Star<Scalar>& s, const Eigen::MatrixBase<Derived>& dir) {
  if (dir.size() != s.dim()) throw DimensionMismatch("support: direction dimension");
  const VectorX<Scalar> d = s.generators().transpose() * dir;
  const Scalar base = dir.dot(s.anchor());
  if (d.size() == 0) return base;
  return base +
         (s.coeff_lower().cwiseProduct(d)).cwiseMax(s.coeff_upper().cwiseProduct(d)).sum();
}

/// Tightest axis-aligned box around the star.
template <typename Scalar>
Box<Scalar> bounding_box(const Star<Scalar>& s) {
  VectorX<Scalar> lo, hi;
  detail::axis_hull(s.anchor(), s.generators(), s.coeff_lower(), s.coeff_upper(), lo, hi);
  Box<Scalar> box(s.dim());
  for (Eigen::Index i = 0; i < s.dim(); ++i) box(i) = {lo(i), std::max(lo(i), hi(i))};
  return box;
}

/// Box u = <0, I_n, d> containing E x for every E in `lambda` and x in `s`,
/// with d the interval product of `lambda` and the box hull of `s`.
/// Evaluating on the hull keeps the map inclusion-monotone: a star inside
/// another never gets a larger image, which reduction relies on.
template <typename Scalar>
Star<Scalar> interval_image(const IntervalMatrix<Scalar>& lambda, const Star<Scalar>& s) {
  if (lambda.rows() != lambda.cols() || lambda.cols() != s.dim()) {
    throw DimensionMismatch("interval_image: interval matrix is " +
                            std::to_string(lambda.rows()) + "x" + std::to_string(lambda.cols()) +
                            ", star dimension " + std::to_string(s.dim()));
  }
  const IntervalMatrix<Scalar> hull = bounding_box(s);
  const IntervalMatrix<Scalar> d = multiply(lambda, hull);
  const Eigen::Index n = s.dim();
  const VectorX<Scalar> lo = lower(d);
  const VectorX<Scalar> hi = upper(d);
  return Star<Scalar>(VectorX<Scalar>::Zero(n), MatrixX<Scalar>::Identity(n, n), lo, hi);
}

/// Replaces all generators by the n axis-aligned ones of the box hull.
template <typename Scalar>
Star<Scalar> interval_reduce(const Star<Scalar>& s) {
  return Star<Scalar>::from_box(bounding_box(s));
}

/// Order reduction to at most `target` generators: the (target - n)
/// largest-norm generators are kept (ties keep the lower index) and the
/// remainder is replaced by the axis-aligned box hull of its interval sum.
template <typename Scalar>
Star<Scalar> zonotope_reduce(const Star<Scalar>& s, Eigen::Index target) {
  const Eigen::Index n = s.dim();
  if (target < n) {
    throw InvalidArgument("zonotope_reduce: target " + std::to_string(target) +
                          " below dimension " + std::to_string(n));
  }
  const Eigen::Index m = s.num_generators();
  if (m <= target) return s;

  const VectorX<Scalar> norms = s.generators().colwise().norm().transpose();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return norms(a) > norms(b); });

  const Eigen::Index keep = target - n;
  std::vector<Eigen::Index> kept(order.begin(), order.begin() + keep);
  std::sort(kept.begin(), kept.end());
  std::vector<Eigen::Index> merged(order.begin() + keep, order.end());

  const MatrixX<Scalar> gm = s.generators()(Eigen::all, merged);
  const VectorX<Scalar> lm = s.coeff_lower()(merged);
  const VectorX<Scalar> hm = s.coeff_upper()(merged);
  VectorX<Scalar> box_lo, box_hi;
  detail::axis_hull(VectorX<Scalar>::Zero(n).eval(), gm, lm, hm, box_lo, box_hi);

  MatrixX<Scalar> g(n, target);
  g << s.generators()(Eigen::all, kept), MatrixX<Scalar>::Identity(n, n);
  VectorX<Scalar> lo(target), hi(target);
  lo << s.coeff_lower()(kept), box_lo;
  hi << s.coeff_upper()(kept), box_hi.cwiseMax(box_lo);
  return Star<Scalar>(s.anchor(), std::move(g), std::move(lo), std::move(hi));
}

}  // namespace ureach
