#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "crisk/backend.hpp"
#include "crisk/error.hpp"
#include "crisk/optimize.hpp"
#include "crisk/risk.hpp"
#include "support.hpp"

using namespace crisk;
using namespace testing_support;

TEST_CASE("scalar examples") {
  const ScalarMinimum a = minimize_scalar([](double x) { return (x - 2) * (x - 2); }, {0.0, 5.0, 1e-8});
  CHECK(std::abs(a.u_star - 2.0) <= 1e-8);
  CHECK(a.value <= 1e-15);
  const ScalarMinimum b = minimize_scalar([](double x) { return std::abs(x); }, {-1.0, 3.0, 1e-8});
  CHECK(std::abs(b.u_star) <= 1e-8);

  const Sample s = Sample::scalar(std::vector<double>(10, 7.0));
  const CompositeChain chain = higher_order_risk_objective(RiskSpec{HigherOrderInverse{}, Orientation::Losses});
  const PreparedBackend backend(ExpectationBackend::all_empirical(2), s);
  const ScalarMinimum c = minimize_chain(chain, backend, s, higher_order_bracket(s, 0.05));
  CHECK(std::abs(c.u_star - 7.0) <= 1e-8);
  CHECK(c.value == doctest::Approx(7.0).epsilon(1e-9));
}

TEST_CASE("scalar suite of convex piecewise-smooth objectives") {
  struct Case {
    std::function<double(double)> f;
    double lo, hi, argmin;
  };
  const std::vector<Case> cases = {
      {[](double x) { return std::abs(x - 0.3) + 0.1 * x * x; }, -2, 4, 0.3},
      {[](double x) { return std::max(2.0 - x, 0.5 * (x - 2.0)); }, -10, 10, 2.0},
      {[](double x) { return std::exp(x) - 2 * x; }, -3, 3, std::log(2.0)},
      {[](double x) { return std::pow(std::max(0.0, x - 1.0), 2) + std::max(0.0, -x + 1.0); }, -5, 5, 1.0},
      {[](double x) { return std::pow(x - 4.25, 4) + std::abs(x - 4.25); }, 0, 100, 4.25},
  };
  // Minimum values sit at zero so that comparisons near the minimizer are not swamped by round-off.
  for (const Case& c : cases) {
    const ScalarMinimum m = minimize_scalar(c.f, {c.lo, c.hi, 1e-8});
    CHECK(std::abs(m.u_star - c.argmin) <= 1e-8);
    CHECK(m.value == c.f(m.u_star));
  }
}

TEST_CASE("flat objectives break ties to the left and pinned minimizers are reported") {
  CHECK_THROWS_AS(minimize_scalar([](double) { return 1.0; }, {0.0, 1.0, 1e-8}), Error);
  CHECK_THROWS_AS(minimize_scalar([](double x) { return x; }, {0.0, 1.0, 1e-8}), Error);
  try {
    minimize_scalar([](double x) { return -x; }, {0.0, 1.0, 1e-8});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BracketTooNarrow);
  }
  // Plateau [1, 2] inside the bracket: the left edge comes back.
  const ScalarMinimum m = minimize_scalar([](double x) { return std::max({1.0 - x, 0.0, x - 2.0}); }, {-3.0, 5.0, 1e-8});
  CHECK(std::abs(m.u_star - 1.0) <= 1e-8);
  CHECK_THROWS_AS(minimize_scalar([](double x) { return x * x; }, {1.0, 1.0, 1e-8}), Error);
}

TEST_CASE("default bracket") {
  const Sample s = Sample::scalar({1.0, 3.0, 2.0});
  const ScalarDomain d = higher_order_bracket(s, 0.05);
  CHECK(d.lo == 0.0);
  CHECK(d.hi == doctest::Approx(3.0 + 2.0 / 0.05));
  const ScalarDomain flat = higher_order_bracket(Sample::scalar({4.0, 4.0}), 0.5);
  CHECK(flat.hi == doctest::Approx(6.0));
}

TEST_CASE("simplex projection") {
  SimplexDomain d;
  d.dim = 3;
  d.budget = 1.0;
  const Vector p = project_to_simplex(Vector{0.9, 0.8, -2.0}, d);
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p[0] == doctest::Approx(0.55));
  CHECK(p[1] == doctest::Approx(0.45));
  CHECK(p[2] == 0.0);
  SimplexDomain bounded = d;
  bounded.lower = {0.1, 0.1, 0.1};
  bounded.upper = {0.5, 0.5, 0.5};
  const Vector q = project_to_simplex(Vector{5.0, 5.0, -5.0}, bounded);
  CHECK(q[0] == doctest::Approx(0.45));
  CHECK(q[2] == doctest::Approx(0.1));
  SimplexDomain bad = d;
  bad.upper = {0.2, 0.2, 0.2};
  CHECK_THROWS_AS(project_to_simplex(Vector{0.3, 0.3, 0.3}, bad), Error);
}

TEST_CASE("simplex examples") {
  // Two identical assets, expectation only.
  const Sample twins({0.05, 0.05, 0.01, 0.01, -0.02, -0.02, 0.08, 0.08}, 2);
  const CompositeChain flat = mean_semideviation_chain(RiskSpec{MeanSemiDeviation{2.0, 0.0}, Orientation::Returns}, 2);
  const auto emp = ExpectationBackend::all_empirical(3);
  auto objective = [&](const Sample& s, const CompositeChain& c) {
    return [&s, &c, &emp](ConstVec u) { return eval_composite(c, emp, s, u); };
  };
  SimplexDomain d;
  d.dim = 2;
  d.budget = 2.0;
  const SimplexMinimum m = minimize_simplex(objective(twins, flat), d);
  CHECK(m.value == doctest::Approx(-twins.mean(0) * 2.0).epsilon(1e-8));

  // Asset A dominates B in every scenario: all weight on A.
  const Sample dom({0.05, 0.01, 0.02, -0.01, 0.09, 0.03, -0.01, -0.04}, 2);
  const SimplexMinimum a = minimize_simplex(objective(dom, flat), d);
  CHECK(a.u_star[0] == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(a.u_star[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));

  SimplexDomain one;
  one.dim = 1;
  one.budget = 3.5;
  const CompositeChain single = mean_semideviation_chain(RiskSpec{MeanSemiDeviation{2.0, 0.5}, Orientation::Returns}, 1);
  const Sample s1 = Sample::scalar({0.1, -0.2, 0.05});
  const SimplexMinimum o = minimize_simplex(objective(s1, single), one);
  CHECK(o.u_star == Vector{3.5});

  SimplexDomain infeasible = d;
  infeasible.lower = {1.5, 1.5};
  CHECK_THROWS_AS(minimize_simplex(objective(twins, flat), infeasible), Error);
}

TEST_CASE("restarts agree on a convex portfolio problem and runs are deterministic") {
  std::vector<double> flat;
  const std::vector<double> a = normal_draws(60, 0.03, 0.10, 1), b = normal_draws(60, 0.02, 0.05, 2),
                            c = normal_draws(60, 0.04, 0.20, 3);
  for (int i = 0; i < 60; ++i) flat.insert(flat.end(), {a[i], b[i], c[i]});
  const Sample s(flat, 3);
  const CompositeChain chain = mean_semideviation_chain(RiskSpec{MeanSemiDeviation{2.0, 0.7}, Orientation::Returns}, 3);
  const auto emp = ExpectationBackend::all_empirical(3);
  auto f = [&](ConstVec u) { return eval_composite(chain, emp, s, u); };
  SimplexDomain d;
  d.dim = 3;
  std::vector<double> values;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimplexOptions opts;
    opts.seed = seed;
    opts.restarts = 1 + seed;
    values.push_back(minimize_simplex(f, d, opts).value);
  }
  for (double v : values) CHECK(v == doctest::Approx(values[0]).epsilon(1e-6));
  SimplexOptions opts;
  opts.seed = 42;
  const SimplexMinimum x = minimize_simplex(f, d, opts), y = minimize_simplex(f, d, opts);
  CHECK(x.u_star == y.u_star);
  CHECK(x.value == y.value);
}
