#include "ureach/bounds.hpp"

#include <cmath>
#include <limits>

#include "ureach/errors.hpp"
#include "ureach/linalg.hpp"

namespace ureach {

std::string_view to_string(BoundMethod m) {
  switch (m) {
    case BoundMethod::Kagstrom1:
      return "kagstrom1";
    case BoundMethod::Kagstrom2:
      return "kagstrom2";
    case BoundMethod::Loan:
      return "loan";
  }
  return "?";
}

std::string_view to_string(NormKind k) { return k == NormKind::Two ? "two" : "frobenius"; }

BoundMethod parse_bound_method(std::string_view name) {
  if (name == "kagstrom1") return BoundMethod::Kagstrom1;
  if (name == "kagstrom2") return BoundMethod::Kagstrom2;
  if (name == "loan") return BoundMethod::Loan;
  throw InvalidArgument("unknown bound method '" + std::string(name) + "'");
}

NormKind parse_norm_kind(std::string_view name) {
  if (name == "two") return NormKind::Two;
  if (name == "frobenius") return NormKind::Frobenius;
  throw InvalidArgument("unknown norm '" + std::string(name) + "'");
}

SpectralData SpectralData::of(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("spectral data: matrix is not square");
  SpectralData sd;
  sd.dim = a.rows();
  if (sd.dim == 0) return sd;
  sd.two_norm = spectral_norm(a);

  Eigen::EigenSolver<Eigen::MatrixXd> es(a, true);
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
  sd.abscissa = es.eigenvalues().real().maxCoeff();
  sd.eps = es.eigenvalues().cwiseAbs().maxCoeff();

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  sd.eigvec_cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  if (!std::isfinite(sd.eigvec_cond)) sd.eigvec_cond = std::numeric_limits<double>::infinity();
  return sd;
}

double partial_exp_sum(int terms, double x) {
  if (terms < 1) throw InvalidArgument("partial_exp_sum: need at least one term");
  double sum = 1.0, term = 1.0;
  for (int k = 1; k < terms; ++k) {
    term *= x / k;
    sum += term;
  }
  return sum;
}

double kagstrom1(const SpectralData& sd, double lambda_norm, double t) {
  const double p = partial_exp_sum(static_cast<int>(std::max<Eigen::Index>(sd.dim, 1)),
                                   sd.two_norm * t);
  return p * std::expm1(p * lambda_norm * t);
}

double kagstrom1(const Eigen::MatrixXd& a, double lambda_norm, double t) {
  return kagstrom1(SpectralData::of(a), lambda_norm, t);
}

double kagstrom2(const SpectralData& sd, double lambda_norm, double t, double cond_max) {
  if (!(sd.eigvec_cond <= cond_max)) {
    throw Defective("kagstrom2: eigenvector matrix condition number " +
                    std::to_string(sd.eigvec_cond) + " exceeds " + std::to_string(cond_max) +
                    " (matrix is defective or nearly so)");
  }
  const double k = sd.eigvec_cond;
  return k * std::exp(sd.eps * t) * std::expm1(k * lambda_norm * t);
}

double kagstrom2(const Eigen::MatrixXd& a, double lambda_norm, double t, double cond_max) {
  return kagstrom2(SpectralData::of(a), lambda_norm, t, cond_max);
}

double loan(const SpectralData& sd, double lambda_norm, double t) {
  if (t == 0.0 || lambda_norm == 0.0) return 0.0;
  return t * lambda_norm * std::exp((sd.two_norm - sd.abscissa + lambda_norm) * t);
}

double loan(const Eigen::MatrixXd& a, double lambda_norm, double t) {
  return loan(SpectralData::of(a), lambda_norm, t);
}

double bound_value(BoundMethod method, const SpectralData& sd, double lambda_norm, double t,
                   double cond_max) {
  switch (method) {
    case BoundMethod::Kagstrom1:
      return kagstrom1(sd, lambda_norm, t);
    case BoundMethod::Kagstrom2:
      return kagstrom2(sd, lambda_norm, t, cond_max);
    case BoundMethod::Loan:
      return loan(sd, lambda_norm, t);
  }
  return 0.0;
}

double interval_norm(const IntervalMatrixd& lambda, NormKind kind, int sign_enumeration_limit) {
  return kind == NormKind::Two ? two_norm_sup(lambda, sign_enumeration_limit)
                               : frobenius_sup(lambda);
}

namespace {

void check_inputs(const Eigen::MatrixXd& a, const IntervalMatrixd& perturbation,
                  const std::vector<double>& times) {
  if (a.rows() != a.cols()) throw DimensionMismatch("dynamics matrix is not square");
  if (perturbation.rows() != a.rows() || perturbation.cols() != a.cols()) {
    throw DimensionMismatch("perturbation shape differs from dynamics");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && times[i] < times[i - 1])) {
      throw InvalidArgument("time grid must be nonnegative and ascending");
    }
  }
}

}  // namespace

BloatSeries bloat_series(const Eigen::MatrixXd& a, const IntervalMatrixd& perturbation,
                         const std::vector<double>& times, BoundMethod method, NormKind norm,
                         const BoundOptions& opts) {
  check_inputs(a, perturbation, times);
  BloatSeries out{method, norm, times, {}};
  if (times.empty()) return out;
  const SpectralData sd = SpectralData::of(a);
  const double lambda_norm = interval_norm(perturbation, norm, opts.sign_enumeration_limit);
  out.phi.reserve(times.size());
  for (double t : times) out.phi.push_back(bound_value(method, sd, lambda_norm, t, opts.cond_max));
  return out;
}

std::vector<SymbolicStep> symbolic_reach(const Eigen::MatrixXd& a,
                                         const IntervalMatrixd& perturbation, const Boxd& theta,
                                         const std::vector<double>& times, BoundMethod method,
                                         NormKind norm, const BoundOptions& opts) {
  if (theta.size() != a.rows()) throw DimensionMismatch("initial box dimension");
  const BloatSeries series = bloat_series(a, perturbation, times, method, norm, opts);
  const Stard initial = Stard::from_box(theta);
  const double x_max = max_norm_over_box(theta);

  std::vector<SymbolicStep> out;
  out.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Eigen::MatrixXd flow = expm((a * times[i]).eval());
    SymbolicStep step;
    step.t = times[i];
    step.phi = series.phi[i];
    step.nominal = linear_map(flow, initial);
    step.radius = step.phi == 0.0 ? 0.0 : step.phi * spectral_norm(flow) * x_max;
    out.push_back(std::move(step));
  }
  return out;
}

Boxd bloated_box(const SymbolicStep& step) {
  Boxd box = bounding_box(step.nominal);
  return box.unaryExpr([r = step.radius](const Intervald& x) { return widen(x, r); });
}

}  // namespace ureach
