#pragma once

// Budget distribution over dynamics cells and the incremental search for the
// largest uncertainty budget that keeps the over-approximation safe.

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ureach/bounds.hpp"
#include "ureach/interval.hpp"
#include "ureach/reach.hpp"
#include "ureach/sensitivity.hpp"

namespace ureach {

enum class BudgetScheme { Proportional, Harmonic, Equal };

std::string_view to_string(BudgetScheme s);
BudgetScheme parse_budget_scheme(std::string_view name);

inline constexpr double kHarmonicFloor = 1e-12;

struct DistributionOptions {
  /// Proportional weight of a cell = sum of the Ord values of listed cells
  /// strictly less sensitive than it. The default instead ranks inversely:
  /// weight = 1 + number of listed cells strictly more sensitive.
  bool literal_proportional = false;
  double harmonic_floor = kHarmonicFloor;
};

/// Normalized weights (sum 1) over `cells`.
std::vector<double> budget_weights(const std::vector<Cell>& cells, const OrdMatrix& ord,
                                   BudgetScheme scheme, const DistributionOptions& opts = {});

/// Radius p |cells| w(i,j) |A(i,j)| for each listed cell, zero elsewhere.
/// Under Equal this is p |A(i,j)|, i.e. +-p relative on each listed cell.
Eigen::MatrixXd budget_radii(const Eigen::MatrixXd& a, const std::vector<Cell>& cells,
                             const OrdMatrix& ord, double budget, BudgetScheme scheme,
                             const DistributionOptions& opts = {});

/// The perturbation L = [-radii, radii].
IntervalMatrixd distribute_perturbation(const Eigen::MatrixXd& a, const std::vector<Cell>& cells,
                                        const OrdMatrix& ord, double budget, BudgetScheme scheme,
                                        const DistributionOptions& opts = {});

/// A + L with L from distribute_perturbation; unlisted entries stay points.
IntervalMatrixd distribute(const Eigen::MatrixXd& a, const std::vector<Cell>& cells,
                           const OrdMatrix& ord, double budget, BudgetScheme scheme,
                           const DistributionOptions& opts = {});

enum class ThresholdStatus { Found, CapReached, AlreadyUnsafe };
std::string_view to_string(ThresholdStatus s);

struct TraceEntry {
  double budget = 0.0;
  bool safe = true;
  double norm = 0.0;  // Frobenius sup of the perturbation at this budget
};

struct ThresholdReport {
  BudgetScheme scheme = BudgetScheme::Equal;
  std::vector<Cell> cells;
  ThresholdStatus status = ThresholdStatus::Found;
  double final_budget = 0.0;
  IntervalMatrixd safe_dynamics;      // A + L_old
  IntervalMatrixd safe_perturbation;  // L_old
  double norm = 0.0;                  // ||L_old||_F
  int iterations = 0;
  std::vector<TraceEntry> trace;
};

struct RobustnessOptions {
  int cap = 200;
  DistributionOptions distribution;
  /// nullopt: numeric star pipeline. Otherwise the bloated-nominal pipeline
  /// with this bound, which is more conservative (never overestimates).
  std::optional<BoundMethod> symbolic;
  NormKind norm = NormKind::Two;
  BoundOptions bound_options;
  /// Rank cells on exp(A h) rather than on A (continuous models only).
  bool order_on_discrete = false;
};

/// True when the model with dynamics A + `perturbation` stays clear of its
/// unsafe set over the horizon.
bool is_safe(const ModelSpec& model, const IntervalMatrixd& perturbation,
             const RobustnessOptions& opts = {});

ThresholdReport robustness_threshold(const ModelSpec& model, const std::vector<Cell>& cells,
                                     BudgetScheme scheme, double step,
                                     const RobustnessOptions& opts = {});

}  // namespace ureach
