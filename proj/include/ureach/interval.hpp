#pragma once

// Closed real intervals and dense interval matrices.
//
// Interval<Scalar> plugs into Eigen as a custom scalar, so interval matrices
// are plain Eigen::Matrix<Interval<Scalar>, ...> and the usual expression
// syntax (sums, products, blocks) applies. Arithmetic is exact real interval
// arithmetic evaluated in floating point; no directed rounding is performed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "ureach/errors.hpp"

namespace ureach {

template <typename Scalar>
class Interval {
 public:
  constexpr Interval() = default;

  // Implicit on purpose: Eigen builds Scalar(0) and Scalar(1) from literals.
  constexpr Interval(Scalar value) : lo_(value), hi_(value) {}  // NOLINT

  Interval(Scalar lo, Scalar hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) {
      throw InvalidArgument("invalid interval [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
    }
  }

  static Interval centered(Scalar mid, Scalar rad) { return {mid - rad, mid + rad}; }

  constexpr Scalar lo() const { return lo_; }
  constexpr Scalar hi() const { return hi_; }
  constexpr Scalar mid() const { return (lo_ + hi_) / Scalar(2); }
  constexpr Scalar rad() const { return (hi_ - lo_) / Scalar(2); }
  constexpr Scalar width() const { return hi_ - lo_; }
  /// Largest absolute value attained.
  Scalar mag() const { return std::max(std::abs(lo_), std::abs(hi_)); }
  constexpr bool is_point() const { return lo_ == hi_; }

  bool contains(Scalar x, Scalar tol = Scalar(0)) const {
    return lo_ - tol <= x && x <= hi_ + tol;
  }
  bool contains(const Interval& other, Scalar tol = Scalar(0)) const {
    return lo_ - tol <= other.lo_ && other.hi_ <= hi_ + tol;
  }

  Interval& operator+=(const Interval& o) {
    lo_ += o.lo_;
    hi_ += o.hi_;
    return *this;
  }
  Interval& operator-=(const Interval& o) {
    const Scalar lo = lo_ - o.hi_;
    hi_ = hi_ - o.lo_;
    lo_ = lo;
    return *this;
  }
  Interval& operator*=(const Interval& o) {
    const Scalar a = lo_ * o.lo_, b = lo_ * o.hi_, c = hi_ * o.lo_, d = hi_ * o.hi_;
    lo_ = std::min(std::min(a, b), std::min(c, d));
    hi_ = std::max(std::max(a, b), std::max(c, d));
    return *this;
  }
  /// Division by an interval not containing zero.
  Interval& operator/=(const Interval& o) {
    if (o.lo_ <= Scalar(0) && o.hi_ >= Scalar(0)) {
      throw InvalidArgument("interval division by an interval containing zero");
    }
    return *this *= Interval(Scalar(1) / o.hi_, Scalar(1) / o.lo_);
  }

  friend Interval operator+(Interval a, const Interval& b) { return a += b; }
  friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
  friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
  friend Interval operator/(Interval a, const Interval& b) { return a /= b; }
  friend Interval operator-(const Interval& a) {
    Interval r;
    r.lo_ = -a.hi_;
    r.hi_ = -a.lo_;
    return r;
  }

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }
  friend bool operator!=(const Interval& a, const Interval& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const Interval& x) {
    return os << '[' << x.lo_ << ", " << x.hi_ << ']';
  }

 private:
  Scalar lo_ = Scalar(0);
  Scalar hi_ = Scalar(0);
};

/// Smallest interval containing both arguments.
template <typename Scalar>
Interval<Scalar> hull(const Interval<Scalar>& a, const Interval<Scalar>& b) {
  return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

/// Outward widening of both endpoints by `slack`.
template <typename Scalar>
Interval<Scalar> widen(const Interval<Scalar>& x, Scalar slack) {
  return {x.lo() - slack, x.hi() + slack};
}

// Needed by Eigen reductions (norms are never taken on interval matrices
// directly, but Eigen instantiates these for some expressions).
template <typename Scalar>
Interval<Scalar> abs(const Interval<Scalar>& x) {
  if (x.lo() >= Scalar(0)) return x;
  if (x.hi() <= Scalar(0)) return -x;
  return {Scalar(0), x.mag()};
}
template <typename Scalar>
const Interval<Scalar>& conj(const Interval<Scalar>& x) {
  return x;
}
template <typename Scalar>
const Interval<Scalar>& real(const Interval<Scalar>& x) {
  return x;
}
template <typename Scalar>
Interval<Scalar> imag(const Interval<Scalar>&) {
  return Interval<Scalar>(Scalar(0));
}
template <typename Scalar>
Interval<Scalar> abs2(const Interval<Scalar>& x) {
  const Interval<Scalar> a = abs(x);
  return a * a;
}

}  // namespace ureach

namespace Eigen {

template <typename Scalar>
struct NumTraits<ureach::Interval<Scalar>> : NumTraits<Scalar> {
  using Real = ureach::Interval<Scalar>;
  using NonInteger = ureach::Interval<Scalar>;
  using Nested = ureach::Interval<Scalar>;
  using Literal = Scalar;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 2,
    MulCost = 8
  };
};

}  // namespace Eigen

namespace ureach {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using IntervalMatrix = Eigen::Matrix<Interval<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using IntervalVector = Eigen::Matrix<Interval<Scalar>, Eigen::Dynamic, 1>;

using Intervald = Interval<double>;
using IntervalMatrixd = IntervalMatrix<double>;
using IntervalVectord = IntervalVector<double>;

// ---------------------------------------------------------------------------
// Conversions between interval and point views.

template <typename Derived>
auto to_interval(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  return m.template cast<Interval<Scalar>>().eval();
}

/// Builds [lower, upper] entrywise; throws if any lower > upper.
template <typename Scalar>
IntervalMatrix<Scalar> from_bounds(const MatrixX<Scalar>& lower, const MatrixX<Scalar>& upper) {
  if (lower.rows() != upper.rows() || lower.cols() != upper.cols()) {
    throw DimensionMismatch("from_bounds: shape mismatch");
  }
  IntervalMatrix<Scalar> out(lower.rows(), lower.cols());
  for (Eigen::Index j = 0; j < lower.cols(); ++j)
    for (Eigen::Index i = 0; i < lower.rows(); ++i) out(i, j) = {lower(i, j), upper(i, j)};
  return out;
}

template <typename Scalar>
IntervalMatrix<Scalar> from_center_radius(const MatrixX<Scalar>& center,
                                          const MatrixX<Scalar>& radius) {
  return from_bounds<Scalar>(center - radius, center + radius);
}

template <typename Derived>
auto lower(const Eigen::MatrixBase<Derived>& m) {
  return m.unaryExpr([](const auto& x) { return x.lo(); }).eval();
}
template <typename Derived>
auto upper(const Eigen::MatrixBase<Derived>& m) {
  return m.unaryExpr([](const auto& x) { return x.hi(); }).eval();
}
/// C = (A_min + A_max) / 2.
template <typename Derived>
auto center(const Eigen::MatrixBase<Derived>& m) {
  return m.unaryExpr([](const auto& x) { return x.mid(); }).eval();
}
/// Delta = (A_max - A_min) / 2.
template <typename Derived>
auto radius(const Eigen::MatrixBase<Derived>& m) {
  return m.unaryExpr([](const auto& x) { return x.rad(); }).eval();
}

template <typename Derived>
bool is_point(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!m(i, j).is_point()) return false;
  return true;
}

/// True when every entry of the point matrix lies in the matching interval.
template <typename Scalar, typename Derived>
bool contains(const IntervalMatrix<Scalar>& box, const Eigen::MatrixBase<Derived>& point,
              Scalar tol = Scalar(0)) {
  if (box.rows() != point.rows() || box.cols() != point.cols()) return false;
  for (Eigen::Index j = 0; j < box.cols(); ++j)
    for (Eigen::Index i = 0; i < box.rows(); ++i)
      if (!box(i, j).contains(point(i, j), tol)) return false;
  return true;
}

template <typename Scalar>
IntervalMatrix<Scalar> widen(const IntervalMatrix<Scalar>& m, Scalar slack) {
  return m.unaryExpr([slack](const Interval<Scalar>& x) { return widen(x, slack); });
}

// ---------------------------------------------------------------------------
// Arithmetic.

/// Interval matrix product; entry (i,j) is the interval sum of L1(i,k)*L2(k,j).
template <typename Scalar>
IntervalMatrix<Scalar> multiply(const IntervalMatrix<Scalar>& lhs,
                                const IntervalMatrix<Scalar>& rhs) {
  if (lhs.cols() != rhs.rows()) {
    throw DimensionMismatch("interval product: inner dimensions " +
                            std::to_string(lhs.cols()) + " and " + std::to_string(rhs.rows()));
  }
  IntervalMatrix<Scalar> out(lhs.rows(), rhs.cols());
  for (Eigen::Index j = 0; j < rhs.cols(); ++j) {
    for (Eigen::Index i = 0; i < lhs.rows(); ++i) {
      Interval<Scalar> acc;
      for (Eigen::Index k = 0; k < lhs.cols(); ++k) acc += lhs(i, k) * rhs(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

/// Interval matrix times nonnegative real.
template <typename Scalar>
IntervalMatrix<Scalar> scale(const IntervalMatrix<Scalar>& m, Scalar factor) {
  return m.unaryExpr([factor](const Interval<Scalar>& x) { return x * Interval<Scalar>(factor); });
}

// ---------------------------------------------------------------------------
// Norms.

/// sup over E in L of ||E||_F, attained at |C| + Delta.
template <typename Scalar>
Scalar frobenius_sup(const IntervalMatrix<Scalar>& m) {
  return (center(m).cwiseAbs() + radius(m)).norm();
}

/// Largest singular value of a point matrix.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Scalar(0);
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(m.eval());
  return svd.singularValues()(0);
}

inline constexpr int kDefaultSignEnumerationLimit = 8;

/// sup over E in L of ||E||_2, by enumerating the sign matrices
/// C + (y z^T) o Delta with y, z in {+-1}^n. Pairs (y,z) and (-y,-z) give the
/// same matrix, so y(0) is pinned to +1.
template <typename Scalar>
Scalar two_norm_sup(const IntervalMatrix<Scalar>& m,
                    int max_dim = kDefaultSignEnumerationLimit) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  if (rows == 0 || cols == 0) return Scalar(0);
  if (rows > max_dim || cols > max_dim) {
    throw DimensionTooLarge("two_norm_sup: dimension " + std::to_string(std::max(rows, cols)) +
                            " exceeds enumeration limit " + std::to_string(max_dim));
  }
  const MatrixX<Scalar> c = center(m);
  const MatrixX<Scalar> d = radius(m);
  if (d.isZero(0)) return spectral_norm(c);

  const std::uint64_t ny = std::uint64_t{1} << (rows - 1);
  const std::uint64_t nz = std::uint64_t{1} << cols;
  VectorX<Scalar> y(rows), z(cols);
  Scalar best = Scalar(0);
  for (std::uint64_t ym = 0; ym < ny; ++ym) {
    y(0) = Scalar(1);
    for (Eigen::Index i = 1; i < rows; ++i) y(i) = (ym >> (i - 1)) & 1U ? Scalar(-1) : Scalar(1);
    for (std::uint64_t zm = 0; zm < nz; ++zm) {
      for (Eigen::Index j = 0; j < cols; ++j) z(j) = (zm >> j) & 1U ? Scalar(-1) : Scalar(1);
      const MatrixX<Scalar> candidate = c + (y * z.transpose()).cwiseProduct(d);
      best = std::max(best, spectral_norm(candidate));
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Exponential.

struct ExpOptions {
  int order = 20;
  double rounding_slack = 0.0;
};

/// Interval enclosure of { exp(E t) : E in L }.
///
/// Truncated interval Taylor series through `order`, plus a remainder r added
/// symmetrically to every entry, r = th^(K+1) / ((K+1)! (1 - th/(K+2))) with
/// th = ||L||_F t. Requires th < K+2.
template <typename Scalar>
IntervalMatrix<Scalar> interval_exp(const IntervalMatrix<Scalar>& m, Scalar t,
                                    const ExpOptions& opts = {}) {
  if (m.rows() != m.cols()) throw DimensionMismatch("interval_exp: matrix is not square");
  if (t < Scalar(0)) throw InvalidArgument("interval_exp: negative time");
  if (opts.order < 0) throw InvalidArgument("interval_exp: negative order");

  const int order = opts.order;
  const Scalar theta = frobenius_sup(m) * t;
  if (!(theta < Scalar(order + 2))) {
    throw RemainderDiverges("interval_exp: ||L||_F t = " + std::to_string(theta) +
                            " must be below order + 2 = " + std::to_string(order + 2));
  }

  const Eigen::Index n = m.rows();
  const IntervalMatrix<Scalar> scaled = scale(m, t);
  IntervalMatrix<Scalar> sum = to_interval(MatrixX<Scalar>::Identity(n, n));
  IntervalMatrix<Scalar> term = sum;
  for (int k = 1; k <= order; ++k) {
    term = scale(multiply(term, scaled), Scalar(1) / Scalar(k));
    sum += term;
  }

  Scalar remainder = Scalar(0);
  if (theta > Scalar(0)) {
    // th^(K+1)/(K+1)! accumulated as a product to avoid overflow.
    Scalar lead = Scalar(1);
    for (int k = 1; k <= order + 1; ++k) lead *= theta / Scalar(k);
    remainder = lead / (Scalar(1) - theta / Scalar(order + 2));
  }
  const Scalar pad = remainder + Scalar(opts.rounding_slack);
  if (pad > Scalar(0)) sum = widen(sum, pad);
  return sum;
}

}  // namespace ureach
