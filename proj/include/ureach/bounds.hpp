#pragma once

// Symbolic bloating factors phi_(A,L)(t): closed-form upper bounds on
//   sup_{E in L} ||exp((A+E)t) - exp(At)|| / ||exp(At)||
// and the bloated-nominal reach pipeline built on them.

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ureach/interval.hpp"
#include "ureach/star.hpp"

namespace ureach {

enum class BoundMethod { Kagstrom1, Kagstrom2, Loan };
enum class NormKind { Two, Frobenius };

std::string_view to_string(BoundMethod m);
std::string_view to_string(NormKind k);
BoundMethod parse_bound_method(std::string_view name);
NormKind parse_norm_kind(std::string_view name);

inline constexpr double kDefaultCondMax = 1e8;

/// Spectral quantities of the nominal dynamics used by the closed forms.
struct SpectralData {
  Eigen::Index dim = 0;
  double two_norm = 0.0;     // ||A||_2
  double abscissa = 0.0;     // alpha(A)
  double eigvec_cond = 1.0;  // cond_2(S), A = S J S^-1; +inf if S is singular
  double eps = 0.0;          // max |lambda_i| = ||J||_2 with D = I

  static SpectralData of(const Eigen::MatrixXd& a);
};

/// sum_{k=0}^{terms-1} x^k / k!.
double partial_exp_sum(int terms, double x);

double kagstrom1(const SpectralData& sd, double lambda_norm, double t);
double kagstrom1(const Eigen::MatrixXd& a, double lambda_norm, double t);

/// Throws Defective when cond(S) > cond_max.
double kagstrom2(const SpectralData& sd, double lambda_norm, double t,
                 double cond_max = kDefaultCondMax);
double kagstrom2(const Eigen::MatrixXd& a, double lambda_norm, double t,
                 double cond_max = kDefaultCondMax);

double loan(const SpectralData& sd, double lambda_norm, double t);
double loan(const Eigen::MatrixXd& a, double lambda_norm, double t);

double bound_value(BoundMethod method, const SpectralData& sd, double lambda_norm, double t,
                   double cond_max = kDefaultCondMax);

struct BoundOptions {
  int sign_enumeration_limit = kDefaultSignEnumerationLimit;
  double cond_max = kDefaultCondMax;
};

/// ||L||_2 (sign enumeration) or ||L||_F of an interval matrix.
double interval_norm(const IntervalMatrixd& lambda, NormKind kind,
                     int sign_enumeration_limit = kDefaultSignEnumerationLimit);

struct BloatSeries {
  BoundMethod method = BoundMethod::Kagstrom1;
  NormKind norm = NormKind::Two;
  std::vector<double> times;
  std::vector<double> phi;
};

/// Evaluates one bound over a time grid; the interval norm of `perturbation`
/// is computed once.
BloatSeries bloat_series(const Eigen::MatrixXd& a, const IntervalMatrixd& perturbation,
                         const std::vector<double>& times, BoundMethod method, NormKind norm,
                         const BoundOptions& opts = {});

struct SymbolicStep {
  double t = 0.0;
  double phi = 0.0;
  Stard nominal;        // exp(At) theta
  double radius = 0.0;  // delta(t) = phi ||exp(At)||_2 max_{x in theta} ||x||_2
};

/// The uncertain reach set at t lies in nominal (+) B_radius(0).
std::vector<SymbolicStep> symbolic_reach(const Eigen::MatrixXd& a,
                                         const IntervalMatrixd& perturbation, const Boxd& theta,
                                         const std::vector<double>& times, BoundMethod method,
                                         NormKind norm, const BoundOptions& opts = {});

/// Bounding box of nominal widened by the bloat radius on every axis.
Boxd bloated_box(const SymbolicStep& step);

}  // namespace ureach
