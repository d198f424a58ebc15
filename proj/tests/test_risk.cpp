#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crisk/backend.hpp"
#include "crisk/error.hpp"
#include "crisk/optimize.hpp"
#include "crisk/risk.hpp"
#include "support.hpp"

using namespace crisk;
using namespace testing_support;

namespace {

RiskSpec hor(double q = 2.0, double alpha = 0.05, double kappa = 1.0) {
  return RiskSpec{HigherOrderInverse{q, alpha, kappa}, Orientation::Losses};
}

RiskSpec msd(double p, double kappa) { return RiskSpec{MeanSemiDeviation{p, kappa}, Orientation::Returns}; }

double msd_value(const CompositeChain& chain, const Sample& s, const Vector& u) {
  return eval_composite(chain, ExpectationBackend::all_empirical(chain.levels()), s, u);
}

// min over z of the empirical higher-order objective; convexity makes a fine scan plus golden refine exact enough.
double minimized(const RiskSpec& r, const Sample& s) {
  const CompositeChain chain = higher_order_risk_objective(r);
  const PreparedBackend b(ExpectationBackend::all_empirical(2), s);
  return minimize_chain(chain, b, s, higher_order_bracket(s, std::get<HigherOrderInverse>(r.family).alpha)).value;
}

}  // namespace

TEST_CASE("parameter validation and tokens") {
  CHECK_THROWS_AS(validate(MeanSemiDeviation{0.5, 0.5}), Error);
  CHECK_THROWS_AS(validate(MeanSemiDeviation{2.0, 1.5}), Error);
  CHECK_THROWS_AS(validate(HigherOrderInverse{0.9, 0.05, 1.0}), Error);
  CHECK_THROWS_AS(validate(HigherOrderInverse{2.0, 0.0, 1.0}), Error);
  CHECK_THROWS_AS(validate(HigherOrderInverse{2.0, 0.05, 0.0}), Error);
  CHECK_THROWS_AS(mean_semideviation_chain(hor(), 2), Error);
  CHECK_THROWS_AS(higher_order_risk_objective(msd(2, 0.5)), Error);
  const RiskSpec a = parse_risk_token("hor:q=3,alpha=0.1");
  CHECK(std::get<HigherOrderInverse>(a.family).q == 3.0);
  CHECK(std::get<HigherOrderInverse>(a.family).alpha == 0.1);
  const RiskSpec b = parse_risk_token("msd:p=1.5,kappa=0.25");
  CHECK(std::get<MeanSemiDeviation>(b.family).kappa == 0.25);
  CHECK(b.orientation == Orientation::Returns);
  CHECK_THROWS_AS(parse_risk_token("cvar:alpha=0.05"), Error);
  CHECK_THROWS_AS(parse_risk_token("hor:q=two"), Error);
  CHECK_THROWS_AS(parse_risk_token("hor:beta=1"), Error);
}

TEST_CASE("mean-semideviation with zero weight is the mean loss") {
  const Sample s({0.1, 0.2, -0.3, 0.05, 0.4, 0.0}, 2);
  const Vector u{0.7, 0.3};
  const CompositeChain chain = mean_semideviation_chain(msd(2.0, 0.0), 2);
  double mean_return = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) mean_return += 0.7 * s.at(i, 0) + 0.3 * s.at(i, 1);
  mean_return /= 3.0;
  CHECK(msd_value(chain, s, u) == doctest::Approx(-mean_return).epsilon(1e-14));
}

TEST_CASE("mean-semideviation of order one against the direct formula") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.02, 0.1);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> flat(3 * 25);
    for (double& v : flat) v = g(rng);
    const Sample s(flat, 3);
    const Vector u{0.5, 0.2, 0.3};
    std::vector<double> y(s.size());
    double ey = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      y[i] = -(u[0] * s.at(i, 0) + u[1] * s.at(i, 1) + u[2] * s.at(i, 2));
      ey += y[i];
    }
    ey /= static_cast<double>(s.size());
    for (double kappa : {0.3, 1.0}) {
      for (double p : {1.0, 2.0}) {
        double dev = 0.0;
        for (double v : y) dev += std::pow(std::max(0.0, v - ey), p);
        dev /= static_cast<double>(s.size());
        const double want = ey + kappa * std::pow(dev, 1.0 / p);
        CHECK(msd_value(mean_semideviation_chain(msd(p, kappa), 3), s, u) == doctest::Approx(want).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("mean-semideviation of constant returns") {
  const Sample s({0.04, 0.01, 0.04, 0.01, 0.04, 0.01}, 2);
  const Vector u{0.25, 0.75};
  CHECK(msd_value(mean_semideviation_chain(msd(2.0, 0.8), 2), s, u) == doctest::Approx(-(0.25 * 0.04 + 0.75 * 0.01)));
}

TEST_CASE("higher-order objective examples") {
  const CompositeChain chain = higher_order_risk_objective(hor());
  const double u[1] = {10.0};
  CHECK(eval_composite(chain, ExpectationBackend::all_empirical(2), Sample::scalar({12.0}), u) == doctest::Approx(50.0));
  CHECK(chain.stage(1).flags.convex_in_x);
  CHECK(chain.stage(0).flags.monotone_in_eta);
  for (double c : {-3.0, 0.0, 7.0, 15.5}) {
    CHECK(std::abs(minimized(hor(), Sample::scalar(std::vector<double>(20, c))) - c) <= 1e-8);
  }
}

TEST_CASE("alpha = 1 and q = 1 gives a piecewise-linear objective") {
  const Sample s = Sample::scalar({1.0, 4.0, 2.5, 3.0});
  const CompositeChain chain = higher_order_risk_objective(hor(1.0, 1.0));
  const auto b = ExpectationBackend::all_empirical(2);
  auto value = [&](double z) {
    const double u[1] = {z};
    return eval_composite(chain, b, s, u);
  };
  CHECK(value(s.max()) == doctest::Approx(s.max()));
  // Slope 1 - P(X > z) >= 0, so the objective is flat at the mean left of the sample and the minimum is the mean.
  for (double z : {-5.0, 0.0, 1.0}) CHECK(value(z) == doctest::Approx(s.mean()));
  for (double z : {1.5, 2.7, 3.5, 4.0, 6.0}) CHECK(value(z) >= s.mean() - 1e-14);
}

TEST_CASE("coherence of the empirical estimator") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> shift(-20.0, 20.0), scale(0.1, 5.0);
  for (int rep = 0; rep < 30; ++rep) {
    const Sample s = Sample::scalar(normal_draws(50, 10.0, 1.7, 400 + rep));
    const double base = minimized(hor(), s);
    const double c = shift(rng), t = scale(rng);
    CHECK(std::abs(minimized(hor(), s.shifted(c)) - (base + c)) <= 1e-8);
    CHECK(std::abs(minimized(hor(), s.scaled(t)) - t * base) <= 1e-8 * std::max(1.0, t * base));
    // Monotonicity: a pointwise larger sample has no smaller risk.
    std::vector<double> bigger(s.values().begin(), s.values().end());
    for (std::size_t i = 0; i < bigger.size(); i += 3) bigger[i] += 0.5;
    CHECK(minimized(hor(), Sample::scalar(bigger)) >= base - 1e-9);
  }
}

TEST_CASE("blended variant and the portfolio inverse measure") {
  const Sample s = Sample::scalar(normal_draws(40, 10.0, 1.7, 9));
  const double kappa = 0.4;
  const double pure = minimized(hor(), s);
  const double blended = minimized(hor(2.0, 0.05, kappa), s);
  CHECK(blended == doctest::Approx((1 - kappa) * s.mean() + kappa * pure).epsilon(1e-8));

  // One asset with unit weight reduces the portfolio chain to the scalar objective.
  const CompositeChain port = inverse_measure_portfolio_chain(hor(2.0, 0.05, kappa), 1);
  const CompositeChain scalar = higher_order_risk_objective(hor(2.0, 0.05, kappa));
  CHECK(port.decision_dim() == 2);
  const double u2[2] = {1.0, 13.0};
  const double u1[1] = {13.0};
  CHECK(eval_composite(port, ExpectationBackend::all_empirical(2), s, u2) ==
        doctest::Approx(eval_composite(scalar, ExpectationBackend::all_empirical(2), s, u1)).epsilon(1e-14));
}

TEST_CASE("returns orientation flips the sign of the data") {
  const Sample s = Sample::scalar(normal_draws(30, 0.0, 1.0, 21));
  const RiskSpec losses = hor();
  RiskSpec returns = hor();
  returns.orientation = Orientation::Returns;
  const CompositeChain a = higher_order_risk_objective(losses);
  const CompositeChain b = higher_order_risk_objective(returns);
  const double u[1] = {0.8};
  CHECK(eval_composite(b, ExpectationBackend::all_empirical(2), s, u) ==
        doctest::Approx(eval_composite(a, ExpectationBackend::all_empirical(2), s.scaled(-1.0), u)).epsilon(1e-14));
}

TEST_CASE("moduli") {
  const HolderModulus inner = higher_order_inner_modulus(2.0, 1.5);
  // (a + t)^2 - a^2 = 2 a t + t^2 is attained at a = reach.
  CHECK(inner(0.2) == doctest::Approx(2 * 1.5 * 0.2 + 0.04));
  const HolderModulus outer = higher_order_outer_modulus(2.0, 0.05);
  CHECK(outer(4.0) == doctest::Approx(40.0));
  CHECK(domain_clip_count() == 0);
}
