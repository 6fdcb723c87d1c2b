#include "doctest.h"

#include <numeric>

#include "test_util.hpp"
#include "ureach/robustness.hpp"

using namespace ureach;
using namespace ureach::testing;

namespace {

OrdMatrix ord_from(Eigen::MatrixXd scores) {
  OrdMatrix o;
  o.scores = std::move(scores);
  return o;
}

// x+ = [1 + L] x from {1}, unsafe x >= 1.25 within two steps.
ModelSpec growth_model() {
  ModelSpec m;
  m.name = "growth";
  m.a = Eigen::MatrixXd::Constant(1, 1, 1.0);
  m.continuous = false;
  m.horizon = 2;
  m.initial = Boxd::Constant(1, Intervald(1.0));
  m.unsafe = {{Eigen::VectorXd::Constant(1, 1.0), 1.25}};
  return m;
}

ModelSpec damped_model() {
  ModelSpec m;
  m.name = "damped";
  m.a = Eigen::MatrixXd(2, 2);
  m.a << -1, -4, 2, -1;
  m.step = 0.01;
  m.horizon = 150;
  m.initial.resize(2);
  m.initial << Intervald(0.9, 1.1), Intervald(-0.1, 0.1);
  m.unsafe = {{Eigen::Vector2d(1, 0), 1.3}};
  return m;
}

}  // namespace

TEST_CASE("scheme names") {
  for (auto s : {BudgetScheme::Proportional, BudgetScheme::Harmonic, BudgetScheme::Equal})
    CHECK(parse_budget_scheme(to_string(s)) == s);
  CHECK_THROWS_AS(parse_budget_scheme("greedy"), InvalidArgument);
  CHECK(to_string(ThresholdStatus::CapReached) == "cap_reached");
}

TEST_CASE("budget weights") {
  const std::vector<Cell> cells{{0, 0}, {0, 1}};
  Eigen::MatrixXd s(2, 2);
  s << 1, 3, 0, 0;
  const OrdMatrix ord = ord_from(s);

  SUBCASE("equal") {
    const auto w = budget_weights(cells, ord, BudgetScheme::Equal);
    CHECK(w[0] == 0.5);
    CHECK(w[1] == 0.5);
  }
  SUBCASE("harmonic") {
    const auto w = budget_weights(cells, ord, BudgetScheme::Harmonic);
    CHECK(w[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("harmonic floor gives zero-score cells the largest share") {
    const auto w = budget_weights({{0, 0}, {1, 0}}, ord, BudgetScheme::Harmonic);
    CHECK(w[1] > 0.999);
  }
  SUBCASE("proportional gives less to more sensitive cells") {
    const auto w = budget_weights(cells, ord, BudgetScheme::Proportional);
    CHECK(w[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("literal proportional reading") {
    DistributionOptions lit;
    lit.literal_proportional = true;
    const std::vector<Cell> three{{0, 0}, {0, 1}, {1, 1}};
    Eigen::MatrixXd t(2, 2);
    t << 1, 3, 0, 2;
    const auto w = budget_weights(three, ord_from(t), BudgetScheme::Proportional, lit);
    // Smaller scores: (0,0) none, (0,1) 1 + 2, (1,1) 1.
    CHECK(w[0] == 0.0);
    CHECK(w[1] == doctest::Approx(0.75));
    CHECK(w[2] == doctest::Approx(0.25));
    const auto flat = budget_weights(cells, ord_from(Eigen::MatrixXd::Ones(2, 2)),
                                     BudgetScheme::Proportional, lit);
    CHECK(flat[0] == 0.5);
    CHECK(flat[1] == 0.5);
  }
  SUBCASE("weights sum to one") {
    Rng rng(70);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = uniform_int(rng, 2, 5);
      Eigen::MatrixXd sc = random_matrix(rng, n, n).cwiseAbs();
      if (trial % 4 == 0) sc(0, 0) = 0.0;
      std::vector<Cell> cs;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (uniform(rng, 0, 1) < 0.5) cs.push_back({i, j});
      if (cs.empty()) cs.push_back({0, 0});
      for (auto scheme : {BudgetScheme::Proportional, BudgetScheme::Harmonic, BudgetScheme::Equal}) {
        for (bool lit : {false, true}) {
          DistributionOptions o;
          o.literal_proportional = lit;
          const auto w = budget_weights(cs, ord_from(sc), scheme, o);
          REQUIRE(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) <= 1e-12);
          if (scheme == BudgetScheme::Equal)
            for (double x : w) REQUIRE(x == w[0]);
        }
      }
    }
  }
}

TEST_CASE("distribute") {
  Eigen::MatrixXd a(2, 2);
  a << 2, 4, 1, 1;
  const std::vector<Cell> cells{{0, 0}, {0, 1}};
  const OrdMatrix zero = ord_from(Eigen::MatrixXd::Zero(2, 2));

  CHECK(distribute(a, cells, zero, 0.0, BudgetScheme::Equal) == to_interval(a));

  const IntervalMatrixd eq = distribute(a, cells, zero, 0.1, BudgetScheme::Equal);
  CHECK(eq(0, 0).rad() == doctest::Approx(0.2));
  CHECK(eq(0, 1).rad() == doctest::Approx(0.4));
  CHECK(eq(1, 0) == Intervald(1.0));
  CHECK(eq(0, 0).mid() == doctest::Approx(2.0));

  Eigen::MatrixXd s(2, 2);
  s << 1, 3, 0, 0;
  const IntervalMatrixd ones = distribute(Eigen::MatrixXd::Ones(2, 2), cells, ord_from(s), 0.1,
                                          BudgetScheme::Harmonic);
  CHECK(ones(0, 0).rad() == doctest::Approx(0.15));
  CHECK(ones(0, 1).rad() == doctest::Approx(0.05));

  const IntervalMatrixd lp = distribute_perturbation(a, cells, zero, 0.1, BudgetScheme::Equal);
  CHECK(lp(0, 0) == Intervald(-0.2, 0.2));
  CHECK(lp(1, 1) == Intervald(0.0));

  Eigen::MatrixXd zcell = a;
  zcell(0, 0) = 0.0;
  CHECK(distribute(zcell, cells, zero, 0.5, BudgetScheme::Equal)(0, 0) == Intervald(0.0));

  CHECK_THROWS_AS(distribute(a, {}, zero, 0.1, BudgetScheme::Equal), InvalidArgument);
  CHECK_THROWS_AS(distribute(a, {{2, 0}}, zero, 0.1, BudgetScheme::Equal), InvalidArgument);
  CHECK_THROWS_AS(distribute(a, {{0, 0}, {0, 0}}, zero, 0.1, BudgetScheme::Equal),
                  InvalidArgument);
  CHECK_THROWS_AS(distribute(a, cells, zero, -0.1, BudgetScheme::Equal), InvalidArgument);
}

TEST_CASE("perturbation norm grows with the budget") {
  Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd a = random_matrix(rng, 3, 3);
    const OrdMatrix ord = ord_from(random_matrix(rng, 3, 3).cwiseAbs());
    const std::vector<Cell> cells{{0, 0}, {1, 2}, {2, 1}};
    for (auto scheme : {BudgetScheme::Proportional, BudgetScheme::Harmonic, BudgetScheme::Equal}) {
      double prev = -1.0;
      for (int k = 0; k < 20; ++k) {
        const double norm =
            frobenius_sup(distribute_perturbation(a, cells, ord, 0.01 * k, scheme));
        REQUIRE(norm >= prev);
        prev = norm;
      }
    }
  }
}

TEST_CASE("threshold on the scalar growth example") {
  const ModelSpec m = growth_model();
  const auto r = robustness_threshold(m, {{0, 0}}, BudgetScheme::Equal, 0.05);
  CHECK(r.status == ThresholdStatus::Found);
  CHECK(r.norm == 0.1);
  CHECK(r.final_budget == doctest::Approx(0.1).epsilon(1e-15));
  REQUIRE(r.trace.size() == 4);
  CHECK(r.trace[0].safe);
  CHECK(r.trace[1].safe);
  CHECK(r.trace[2].safe);
  CHECK_FALSE(r.trace[3].safe);
  CHECK(r.trace[3].budget == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(r.iterations == 4);
  CHECK(r.safe_perturbation(0, 0) == Intervald(-0.1, 0.1));
  CHECK(r.safe_dynamics(0, 0).lo() == doctest::Approx(0.9));

  // Every other scheme agrees on a single cell.
  for (auto scheme : {BudgetScheme::Proportional, BudgetScheme::Harmonic})
    CHECK(robustness_threshold(m, {{0, 0}}, scheme, 0.05).norm == r.norm);
}

TEST_CASE("threshold status paths") {
  SUBCASE("already unsafe") {
    ModelSpec m = growth_model();
    m.unsafe[0].offset = 0.5;
    const auto r = robustness_threshold(m, {{0, 0}}, BudgetScheme::Equal, 0.05);
    CHECK(r.status == ThresholdStatus::AlreadyUnsafe);
    CHECK(r.norm == 0.0);
    CHECK(r.iterations == 1);
  }
  SUBCASE("cap reached") {
    ModelSpec m = growth_model();
    m.unsafe[0].offset = 100.0;
    RobustnessOptions o;
    o.cap = 5;
    const auto r = robustness_threshold(m, {{0, 0}}, BudgetScheme::Equal, 0.05, o);
    CHECK(r.status == ThresholdStatus::CapReached);
    CHECK(r.iterations == 5);
    CHECK(r.norm == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(r.norm == r.trace.back().norm);
  }
  SUBCASE("argument errors") {
    const ModelSpec m = growth_model();
    CHECK_THROWS_AS(robustness_threshold(m, {{0, 0}}, BudgetScheme::Equal, 0.0), InvalidArgument);
    CHECK_THROWS_AS(robustness_threshold(m, {}, BudgetScheme::Equal, 0.1), InvalidArgument);
    RobustnessOptions o;
    o.cap = 0;
    CHECK_THROWS_AS(robustness_threshold(m, {{0, 0}}, BudgetScheme::Equal, 0.1, o),
                    InvalidArgument);
  }
}

TEST_CASE("threshold on a continuous model") {
  const ModelSpec m = damped_model();
  const std::vector<Cell> cells{{0, 0}, {1, 0}};
  RobustnessOptions o;
  o.cap = 100;
  const auto r = robustness_threshold(m, cells, BudgetScheme::Harmonic, 0.05, o);
  REQUIRE(r.status == ThresholdStatus::Found);
  CHECK(r.norm > 0.0);

  // The returned perturbation is safe and nested in the first unsafe one.
  CHECK(is_safe(m, r.safe_perturbation, o));
  const IntervalMatrixd next = distribute_perturbation(
      m.a, cells, order_cells(m.a), r.trace.back().budget, BudgetScheme::Harmonic);
  CHECK_FALSE(is_safe(m, next, o));
  for (Eigen::Index j = 0; j < 2; ++j)
    for (Eigen::Index i = 0; i < 2; ++i) CHECK(next(i, j).contains(r.safe_perturbation(i, j)));

  // Identical inputs give identical traces.
  const auto again = robustness_threshold(m, cells, BudgetScheme::Harmonic, 0.05, o);
  REQUIRE(again.trace.size() == r.trace.size());
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    CHECK(again.trace[k].budget == r.trace[k].budget);
    CHECK(again.trace[k].safe == r.trace[k].safe);
    CHECK(again.trace[k].norm == r.trace[k].norm);
  }

  // The bloated-nominal pipeline is more conservative.
  RobustnessOptions sym = o;
  sym.symbolic = BoundMethod::Loan;
  const auto rs = robustness_threshold(m, cells, BudgetScheme::Harmonic, 0.05, sym);
  CHECK(rs.final_budget <= r.final_budget);

  RobustnessOptions disc = o;
  disc.order_on_discrete = true;
  CHECK(robustness_threshold(m, cells, BudgetScheme::Proportional, 0.05, disc).status !=
        ThresholdStatus::AlreadyUnsafe);
}
