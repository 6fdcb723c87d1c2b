#include "ureach/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include "ureach/errors.hpp"

namespace ureach {

namespace {

struct TopSingularPair {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
};

TopSingularPair top_pair(const Eigen::MatrixXd& a, double rel_gap) {
  if (a.size() == 0) throw DimensionMismatch("sensitivity: empty matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s.size() > 1 && s(0) - s(1) < rel_gap * s(0)) {
    throw DegenerateSV("largest singular value is not simple (sigma1 = " + std::to_string(s(0)) +
                       ", sigma2 = " + std::to_string(s(1)) + ")");
  }
  return {svd.matrixU().col(0), svd.matrixV().col(0)};
}

}  // namespace

double sv_change(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double rel_gap) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("sv_change: A and B differ in shape");
  }
  const TopSingularPair p = top_pair(a, rel_gap);
  return std::abs(p.u.dot(b * p.v));
}

OrdMatrix order_cells(const Eigen::MatrixXd& a, double rel_gap) {
  const TopSingularPair p = top_pair(a, rel_gap);
  OrdMatrix out;
  out.scores = (a.array() * (p.u.cwiseAbs() * p.v.cwiseAbs().transpose()).array()).abs().matrix();

  out.ranking.reserve(static_cast<std::size_t>(a.size()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.ranking.push_back({i, j});
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [&](const Cell& x, const Cell& y) { return out.score(x) > out.score(y); });
  return out;
}

double max_sv_radius(const IntervalMatrixd& lambda, int sign_enumeration_limit) {
  if (lambda.rows() != lambda.cols()) throw DimensionMismatch("max_sv_radius: not square");
  return two_norm_sup(lambda, sign_enumeration_limit);
}

}  // namespace ureach
