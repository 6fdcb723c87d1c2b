#include "ureach/reach.hpp"

#include <chrono>
#include <cmath>

#include "ureach/errors.hpp"
#include "ureach/linalg.hpp"

namespace ureach {

std::string_view to_string(ReductionMethod m) {
  switch (m) {
    case ReductionMethod::None:
      return "none";
    case ReductionMethod::Interval:
      return "interval";
    case ReductionMethod::Zonotope:
      return "zonotope";
  }
  return "?";
}

ReductionMethod parse_reduction_method(std::string_view name) {
  if (name == "none") return ReductionMethod::None;
  if (name == "interval") return ReductionMethod::Interval;
  if (name == "zonotope") return ReductionMethod::Zonotope;
  throw InvalidArgument("unknown reduction method '" + std::string(name) + "'");
}

void ModelSpec::validate() const {
  const Eigen::Index n = a.rows();
  if (n == 0 || a.cols() != n) throw DimensionMismatch("dynamics matrix must be square, nonempty");
  if (!a.allFinite()) throw InvalidArgument("dynamics matrix has non-finite entries");
  if (initial.size() != n) throw DimensionMismatch("initial box dimension differs from dynamics");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(initial(i).lo()) || !std::isfinite(initial(i).hi())) {
      throw InvalidArgument("initial box must be bounded");
    }
  }
  if (horizon < 1) throw InvalidArgument("horizon must be at least 1");
  if (continuous && !(step > 0.0 && std::isfinite(step))) {
    throw InvalidArgument("step must be positive for continuous models");
  }
  for (const auto& cell : uncertainty) {
    if (cell.row < 0 || cell.row >= n || cell.col < 0 || cell.col >= n) {
      throw InvalidArgument("uncertain cell (" + std::to_string(cell.row) + ", " +
                            std::to_string(cell.col) + ") out of range");
    }
    if (const double* r = std::get_if<double>(&cell.spec)) {
      if (!(*r >= 0.0) || !std::isfinite(*r)) {
        throw InvalidArgument("relative uncertainty must be finite and nonnegative");
      }
    } else {
      const auto& iv = std::get<Intervald>(cell.spec);
      if (!std::isfinite(iv.lo()) || !std::isfinite(iv.hi())) {
        throw InvalidArgument("uncertainty interval must be finite");
      }
    }
  }
  for (const auto& h : unsafe) {
    if (h.normal.size() != n) throw DimensionMismatch("unsafe half-space normal dimension");
    if (!h.normal.allFinite() || !std::isfinite(h.offset)) {
      throw InvalidArgument("unsafe half-space has non-finite values");
    }
    if (h.normal.isZero(0)) throw InvalidArgument("unsafe half-space normal is zero");
  }
  if (reduction.period < 1) throw InvalidArgument("reduction period must be positive");
  if (reduction.target != 0 && reduction.target < n) {
    throw InvalidArgument("zonotope reduction target below dimension");
  }
}

IntervalMatrixd ModelSpec::uncertain_dynamics() const {
  IntervalMatrixd out = to_interval(a);
  for (const auto& cell : uncertainty) {
    const double nominal = a(cell.row, cell.col);
    if (const double* r = std::get_if<double>(&cell.spec)) {
      out(cell.row, cell.col) = Intervald::centered(nominal, *r * std::abs(nominal));
    } else {
      out(cell.row, cell.col) = std::get<Intervald>(cell.spec);
    }
  }
  return out;
}

IntervalMatrixd ModelSpec::perturbation() const {
  return uncertain_dynamics() - to_interval(a);
}

bool operator==(const ModelSpec& x, const ModelSpec& y) {
  return x.name == y.name && x.notes == y.notes && x.a == y.a && x.uncertainty == y.uncertainty &&
         x.continuous == y.continuous && x.step == y.step && x.horizon == y.horizon &&
         x.initial == y.initial && x.unsafe == y.unsafe && x.reduction == y.reduction;
}

DiscreteSystem discretize(const Eigen::MatrixXd& a, const IntervalMatrixd& perturbation, double h,
                          const ExpOptions& opts) {
  if (!(h > 0.0)) throw InvalidArgument("discretize: step must be positive");
  if (a.rows() != a.cols() || perturbation.rows() != a.rows() ||
      perturbation.cols() != a.cols()) {
    throw DimensionMismatch("discretize: shape mismatch");
  }
  DiscreteSystem out;
  out.a = expm((a * h).eval());
  if (is_point(perturbation) && lower(perturbation).isZero(0)) {
    out.perturbation = IntervalMatrixd::Zero(a.rows(), a.cols());
    return out;
  }
  const IntervalMatrixd enclosure = interval_exp(IntervalMatrixd(to_interval(a) + perturbation), h, opts);
  out.perturbation = enclosure - to_interval(out.a);
  return out;
}

DiscreteSystem discrete_system(const ModelSpec& model, const ExpOptions& opts) {
  if (model.continuous) return discretize(model.a, model.perturbation(), model.step, opts);
  return {model.a, model.perturbation()};
}

namespace {

using Clock = std::chrono::steady_clock;

bool is_zero(const IntervalMatrixd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j).lo() != 0.0 || m(i, j).hi() != 0.0) return false;
  return true;
}

Stard reduce(const Stard& s, const ReductionPolicy& policy) {
  switch (policy.method) {
    case ReductionMethod::None:
      return s;
    case ReductionMethod::Interval:
      return interval_reduce(s);
    case ReductionMethod::Zonotope:
      return zonotope_reduce(s, policy.target > 0 ? policy.target : 2 * s.dim());
  }
  return s;
}

// Records step k; returns false if the observer asked to stop.
bool record(ReachResult& out, std::size_t k, const Stard& set, const ReachOptions& opts) {
  out.boxes.push_back(bounding_box(set));
  out.generator_counts.push_back(set.num_generators());
  if (opts.keep_sets) out.sets.push_back(set);
  return !opts.on_step || opts.on_step(k, set);
}

}  // namespace

ReachResult ors_reach(const DiscreteSystem& sys, const Boxd& initial, int horizon,
                      const ReductionPolicy& reduction, const ReachOptions& opts) {
  const Eigen::Index n = sys.a.rows();
  if (sys.a.cols() != n || sys.perturbation.rows() != n || sys.perturbation.cols() != n) {
    throw DimensionMismatch("ors_reach: system shape mismatch");
  }
  if (initial.size() != n) throw DimensionMismatch("ors_reach: initial box dimension");
  if (horizon < 0) throw InvalidArgument("ors_reach: negative horizon");
  if (reduction.method != ReductionMethod::None && reduction.period < 1) {
    throw InvalidArgument("ors_reach: reduction period must be positive");
  }

  const auto start = Clock::now();
  ReachResult out;
  out.method = "numeric";
  out.boxes.reserve(static_cast<std::size_t>(horizon) + 1);
  out.generator_counts.reserve(static_cast<std::size_t>(horizon) + 1);

  const bool certain = is_zero(sys.perturbation);
  Stard current = Stard::from_box(initial);
  bool go = record(out, 0, current, opts);
  for (int k = 1; go && k <= horizon; ++k) {
    Stard next = linear_map(sys.a, current);
    if (!certain) next = minkowski_sum(next, interval_image(sys.perturbation, current));
    if (reduction.method != ReductionMethod::None && k % reduction.period == 0) {
      next = reduce(next, reduction);
    }
    current = std::move(next);
    go = record(out, static_cast<std::size_t>(k), current, opts);
  }
  out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

ReachResult ors_reach(const ModelSpec& model, const ReachOptions& opts) {
  model.validate();
  return ors_reach(discrete_system(model), model.initial, model.horizon, model.reduction, opts);
}

ReachResult nominal_reach(const Eigen::MatrixXd& a, const Boxd& initial, int horizon,
                          const ReachOptions& opts) {
  const Eigen::Index n = a.rows();
  ReachResult out = ors_reach(DiscreteSystem{a, IntervalMatrixd::Zero(n, n)}, initial, horizon,
                              ReductionPolicy{}, opts);
  out.method = "nominal";
  return out;
}

std::optional<std::size_t> first_violation(const Stard& set, const std::vector<HalfSpace>& unsafe) {
  for (std::size_t h = 0; h < unsafe.size(); ++h) {
    if (support(set, unsafe[h].normal) >= unsafe[h].offset) return h;
  }
  return std::nullopt;
}

SafetyVerdict safety_check(const ReachResult& result, const std::vector<HalfSpace>& unsafe) {
  if (result.sets.size() != result.num_steps()) {
    throw InvalidArgument("safety_check: reach result was computed without keeping sets");
  }
  for (std::size_t k = 0; k < result.sets.size(); ++k) {
    if (auto h = first_violation(result.sets[k], unsafe)) return {false, k, *h};
  }
  return {};
}

SafetyVerdict safety_check(const std::vector<SymbolicStep>& steps,
                           const std::vector<HalfSpace>& unsafe) {
  for (std::size_t k = 0; k < steps.size(); ++k) {
    for (std::size_t h = 0; h < unsafe.size(); ++h) {
      const double reach = support(steps[k].nominal, unsafe[h].normal) +
                           steps[k].radius * unsafe[h].normal.norm();
      if (reach >= unsafe[h].offset) return {false, k, h};
    }
  }
  return {};
}

std::vector<double> time_grid(double h, int horizon) {
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(std::max(horizon, 0)) + 1);
  for (int k = 0; k <= horizon; ++k) times.push_back(k * h);
  return times;
}

std::vector<SymbolicStep> symbolic_reach(const ModelSpec& model, BoundMethod method, NormKind norm,
                                         const BoundOptions& opts) {
  model.validate();
  if (!model.continuous) {
    throw InvalidArgument("symbolic bounds apply to continuous-time models only");
  }
  return symbolic_reach(model.a, model.perturbation(), model.initial,
                        time_grid(model.step, model.horizon), method, norm, opts);
}

}  // namespace ureach
