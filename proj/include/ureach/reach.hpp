#pragma once

// Reachability pipelines for x+ = (A + L) x: discretization of the continuous
// uncertain system, the over-approximate star recurrence
//   ORS_0 = Theta,  ORS_k = A ORS_{k-1} (+) u_k,  L ORS_{k-1} in u_k,
// the nominal flowpipe, and half-space safety checks.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ureach/bounds.hpp"
#include "ureach/interval.hpp"
#include "ureach/star.hpp"

namespace ureach {

enum class ReductionMethod { None, Interval, Zonotope };

std::string_view to_string(ReductionMethod m);
ReductionMethod parse_reduction_method(std::string_view name);

inline constexpr int kDefaultReductionPeriod = 500;

struct ReductionPolicy {
  ReductionMethod method = ReductionMethod::None;
  int period = kDefaultReductionPeriod;
  /// Generator budget for zonotope reduction; 0 means 2n.
  Eigen::Index target = 0;

  friend bool operator==(const ReductionPolicy&, const ReductionPolicy&) = default;
};

/// Unsafe region { x : normal . x >= offset }.
struct HalfSpace {
  Eigen::VectorXd normal;
  double offset = 0.0;

  friend bool operator==(const HalfSpace& a, const HalfSpace& b) {
    return a.normal == b.normal && a.offset == b.offset;
  }
};

/// One uncertain entry of the dynamics: either a relative spread
/// A(i,j) * [1 - r, 1 + r] (radius r |A(i,j)|) or an explicit interval.
struct UncertainCell {
  int row = 0;
  int col = 0;
  std::variant<double, Intervald> spec = 0.0;

  friend bool operator==(const UncertainCell&, const UncertainCell&) = default;
};

struct ModelSpec {
  std::string name;
  std::vector<std::string> notes;
  Eigen::MatrixXd a;
  std::vector<UncertainCell> uncertainty;
  bool continuous = true;
  double step = 0.01;
  int horizon = 1;
  Boxd initial;
  std::vector<HalfSpace> unsafe;
  ReductionPolicy reduction;

  Eigen::Index dim() const { return a.rows(); }

  /// Throws InvalidArgument / DimensionMismatch on any inconsistency.
  void validate() const;

  /// A + L: nominal point matrix with the listed cells widened.
  IntervalMatrixd uncertain_dynamics() const;
  /// L = (A + L) - A.
  IntervalMatrixd perturbation() const;

  friend bool operator==(const ModelSpec& x, const ModelSpec& y);
};

/// Discrete-time uncertain system x+ = (a + perturbation) x.
struct DiscreteSystem {
  Eigen::MatrixXd a;
  IntervalMatrixd perturbation;
};

/// Abar = exp(A h), Lbar = interval_exp(A + L, h) - Abar, so every
/// exp((A+E)h) with E in L lies in Abar + Lbar. A point L gives Lbar = 0.
DiscreteSystem discretize(const Eigen::MatrixXd& a, const IntervalMatrixd& perturbation, double h,
                          const ExpOptions& opts = {});

/// The model as a discrete system (discretizing continuous models).
DiscreteSystem discrete_system(const ModelSpec& model, const ExpOptions& opts = {});

struct ReachResult {
  std::string method;
  double seconds = 0.0;
  /// Per step; `sets` is empty when the run was streamed without keeping sets.
  std::vector<Stard> sets;
  std::vector<Boxd> boxes;
  std::vector<Eigen::Index> generator_counts;

  std::size_t num_steps() const { return boxes.size(); }
};

struct ReachOptions {
  bool keep_sets = true;
  /// Called with (k, ORS_k) after each step; returning false stops the run.
  std::function<bool(std::size_t, const Stard&)> on_step;
};

ReachResult ors_reach(const DiscreteSystem& sys, const Boxd& initial, int horizon,
                      const ReductionPolicy& reduction, const ReachOptions& opts = {});
ReachResult ors_reach(const ModelSpec& model, const ReachOptions& opts = {});

/// Abar^k Theta for k = 0..horizon.
ReachResult nominal_reach(const Eigen::MatrixXd& a, const Boxd& initial, int horizon,
                          const ReachOptions& opts = {});

struct SafetyVerdict {
  bool safe = true;
  std::size_t step = 0;
  std::size_t halfspace = 0;

  friend bool operator==(const SafetyVerdict&, const SafetyVerdict&) = default;
};

/// Index of the first half-space whose support test support(S, n) >= b fires.
std::optional<std::size_t> first_violation(const Stard& set, const std::vector<HalfSpace>& unsafe);

/// First (step, half-space) at which the over-approximation meets the unsafe set.
SafetyVerdict safety_check(const ReachResult& result, const std::vector<HalfSpace>& unsafe);

/// Same check on a bloated nominal flowpipe: support(nominal, n) + radius ||n|| >= b.
SafetyVerdict safety_check(const std::vector<SymbolicStep>& steps,
                           const std::vector<HalfSpace>& unsafe);

/// t_k = k h for k = 0..horizon.
std::vector<double> time_grid(double h, int horizon);

/// symbolic_reach on a continuous model over its own time grid.
std::vector<SymbolicStep> symbolic_reach(const ModelSpec& model, BoundMethod method, NormKind norm,
                                         const BoundOptions& opts = {});

}  // namespace ureach
