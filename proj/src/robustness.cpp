#include "ureach/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ureach/errors.hpp"
#include "ureach/linalg.hpp"

namespace ureach {

std::string_view to_string(BudgetScheme s) {
  switch (s) {
    case BudgetScheme::Proportional:
      return "proportional";
    case BudgetScheme::Harmonic:
      return "harmonic";
    case BudgetScheme::Equal:
      return "equal";
  }
  return "?";
}

BudgetScheme parse_budget_scheme(std::string_view name) {
  if (name == "proportional") return BudgetScheme::Proportional;
  if (name == "harmonic") return BudgetScheme::Harmonic;
  if (name == "equal") return BudgetScheme::Equal;
  throw InvalidArgument("unknown budget scheme '" + std::string(name) + "'");
}

std::string_view to_string(ThresholdStatus s) {
  switch (s) {
    case ThresholdStatus::Found:
      return "found";
    case ThresholdStatus::CapReached:
      return "cap_reached";
    case ThresholdStatus::AlreadyUnsafe:
      return "already_unsafe";
  }
  return "?";
}

namespace {

void check_cells(const std::vector<Cell>& cells, Eigen::Index n) {
  if (cells.empty()) throw InvalidArgument("no cells to perturb");
  std::set<Cell> seen;
  for (const Cell& c : cells) {
    if (c.row < 0 || c.row >= n || c.col < 0 || c.col >= n) {
      throw InvalidArgument("cell (" + std::to_string(c.row) + ", " + std::to_string(c.col) +
                            ") out of range");
    }
    if (!seen.insert(c).second) {
      throw InvalidArgument("cell (" + std::to_string(c.row) + ", " + std::to_string(c.col) +
                            ") listed twice");
    }
  }
}

}  // namespace

std::vector<double> budget_weights(const std::vector<Cell>& cells, const OrdMatrix& ord,
                                   BudgetScheme scheme, const DistributionOptions& opts) {
  if (cells.empty()) throw InvalidArgument("no cells to perturb");
  const std::size_t m = cells.size();
  std::vector<double> w(m, 1.0);

  if (scheme == BudgetScheme::Harmonic) {
    for (std::size_t k = 0; k < m; ++k) w[k] = 1.0 / std::max(ord.score(cells[k]), opts.harmonic_floor);
  } else if (scheme == BudgetScheme::Proportional) {
    for (std::size_t k = 0; k < m; ++k) {
      const double own = ord.score(cells[k]);
      double acc = opts.literal_proportional ? 0.0 : 1.0;
      for (const Cell& other : cells) {
        const double s = ord.score(other);
        if (opts.literal_proportional) {
          if (s < own) acc += s;
        } else if (s > own) {
          acc += 1.0;
        }
      }
      w[k] = acc;
    }
  }

  double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) {
    std::fill(w.begin(), w.end(), 1.0);
    total = static_cast<double>(m);
  }
  for (double& x : w) x /= total;
  return w;
}

Eigen::MatrixXd budget_radii(const Eigen::MatrixXd& a, const std::vector<Cell>& cells,
                             const OrdMatrix& ord, double budget, BudgetScheme scheme,
                             const DistributionOptions& opts) {
  if (!(budget >= 0.0)) throw InvalidArgument("budget must be nonnegative");
  check_cells(cells, a.rows());
  const std::vector<double> w = budget_weights(cells, ord, scheme, opts);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  const double m = static_cast<double>(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const Cell& c = cells[k];
    const double mag = std::abs(a(c.row, c.col));
    out(c.row, c.col) = scheme == BudgetScheme::Equal ? budget * mag : budget * m * w[k] * mag;
  }
  return out;
}

IntervalMatrixd distribute_perturbation(const Eigen::MatrixXd& a, const std::vector<Cell>& cells,
                                        const OrdMatrix& ord, double budget, BudgetScheme scheme,
                                        const DistributionOptions& opts) {
  const Eigen::MatrixXd r = budget_radii(a, cells, ord, budget, scheme, opts);
  return from_bounds<double>(-r, r);
}

IntervalMatrixd distribute(const Eigen::MatrixXd& a, const std::vector<Cell>& cells,
                           const OrdMatrix& ord, double budget, BudgetScheme scheme,
                           const DistributionOptions& opts) {
  const Eigen::MatrixXd r = budget_radii(a, cells, ord, budget, scheme, opts);
  return from_bounds<double>(a - r, a + r);
}

bool is_safe(const ModelSpec& model, const IntervalMatrixd& perturbation,
             const RobustnessOptions& opts) {
  if (opts.symbolic) {
    if (!model.continuous) throw InvalidArgument("symbolic pipeline needs a continuous model");
    const auto steps =
        symbolic_reach(model.a, perturbation, model.initial, time_grid(model.step, model.horizon),
                       *opts.symbolic, opts.norm, opts.bound_options);
    return safety_check(steps, model.unsafe).safe;
  }

  const DiscreteSystem sys = model.continuous ? discretize(model.a, perturbation, model.step)
                                              : DiscreteSystem{model.a, perturbation};
  bool safe = true;
  ReachOptions ro;
  ro.keep_sets = false;
  ro.on_step = [&](std::size_t, const Stard& set) {
    if (first_violation(set, model.unsafe)) safe = false;
    return safe;
  };
  ors_reach(sys, model.initial, model.horizon, model.reduction, ro);
  return safe;
}

ThresholdReport robustness_threshold(const ModelSpec& model, const std::vector<Cell>& cells,
                                     BudgetScheme scheme, double step,
                                     const RobustnessOptions& opts) {
  model.validate();
  check_cells(cells, model.dim());
  if (!(step > 0.0)) throw InvalidArgument("budget step must be positive");
  if (opts.cap < 1) throw InvalidArgument("iteration cap must be at least 1");

  OrdMatrix ord;
  if (scheme == BudgetScheme::Equal) {
    ord.scores = Eigen::MatrixXd::Zero(model.dim(), model.dim());
  } else if (opts.order_on_discrete && model.continuous) {
    ord = order_cells(expm((model.a * model.step).eval()));
  } else {
    ord = order_cells(model.a);
  }

  ThresholdReport report;
  report.scheme = scheme;
  report.cells = cells;
  report.safe_dynamics = to_interval(model.a);
  report.safe_perturbation = IntervalMatrixd::Zero(model.dim(), model.dim());

  for (int k = 0; k < opts.cap; ++k) {
    // k * step rather than a running sum keeps budgets free of drift.
    const double budget = k * step;
    const Eigen::MatrixXd r = budget_radii(model.a, cells, ord, budget, scheme, opts.distribution);
    const IntervalMatrixd perturbation = from_bounds<double>(-r, r);
    const IntervalMatrixd dynamics = from_bounds<double>(model.a - r, model.a + r);
    const bool safe = is_safe(model, perturbation, opts);
    const double norm = frobenius_sup(perturbation);
    report.trace.push_back({budget, safe, norm});
    report.iterations = k + 1;

    if (!safe) {
      report.status = k == 0 ? ThresholdStatus::AlreadyUnsafe : ThresholdStatus::Found;
      return report;
    }
    report.final_budget = budget;
    report.safe_dynamics = dynamics;
    report.safe_perturbation = perturbation;
    report.norm = norm;
  }
  report.status = ThresholdStatus::CapReached;
  return report;
}

}  // namespace ureach
