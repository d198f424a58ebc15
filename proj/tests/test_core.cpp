#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "crisk/backend.hpp"
#include "crisk/error.hpp"
#include "crisk/risk.hpp"
#include "support.hpp"

using namespace crisk;
using namespace testing_support;

namespace {

Stage sized_stage(std::size_t out, std::size_t in) {
  Stage s;
  s.out_dim = out;
  s.in_dim = in;
  s.eval = [out](ConstVec, ConstVec eta, ConstVec x, std::span<double> o) {
    for (std::size_t r = 0; r < out; ++r) o[r] = x[0] + (eta.empty() ? 0.0 : eta[0]);
  };
  return s;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::UsageError;
}

}  // namespace

TEST_CASE("sample validation") {
  CHECK(kind_of([] { Sample({1.0, 2.0, 3.0}, 2); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { Sample::scalar({}); }) == ErrorKind::BadParameters);
  CHECK(kind_of([] { Sample::scalar({1.0, std::nan("")}); }) == ErrorKind::NonFiniteValue);
  const Sample s({1.0, 2.0, 3.0, 4.0}, 2);
  CHECK(s.size() == 2);
  CHECK(s.at(1, 0) == 3.0);
  CHECK(s.mean(1) == 3.0);
}

TEST_CASE("make_chain accepts a minimal chain and rejects bad signatures") {
  const CompositeChain c = make_chain({sized_stage(1, 1), sized_stage(1, 0)}, 1, 1);
  CHECK(c.depth() == 1);
  CHECK(kind_of([] { make_chain({sized_stage(1, 3), sized_stage(2, 0)}, 1, 1); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { make_chain({sized_stage(1, 0)}, 1, 1); }) == ErrorKind::EmptyChain);
  CHECK(kind_of([] { make_chain({}, 1, 1); }) == ErrorKind::EmptyChain);
  CHECK(kind_of([] { make_chain({sized_stage(2, 1), sized_stage(1, 0)}, 1, 1); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { make_chain({sized_stage(1, 1), sized_stage(1, 1)}, 1, 1); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("mean-semideviation chain has depth two") {
  const CompositeChain c = mean_semideviation_chain(RiskSpec{MeanSemiDeviation{2.0, 0.5}, Orientation::Returns}, 1);
  CHECK(c.depth() == 2);
  CHECK(c.stage(1).flags.convex_in_x);
  CHECK(c.stage(0).flags.monotone_in_eta);
}

TEST_CASE("empirical_expectation examples") {
  const Sample s = Sample::scalar({1.0, 2.0, 3.0});
  CHECK(empirical_expectation(scalar_stage([](double x) { return x; }), s, {}, {})[0] == doctest::Approx(2.0));
  const Stage hinge = hinge_stage(10.0, 2.0);
  CHECK(empirical_expectation(hinge, Sample::scalar({12.0}), {}, {})[0] == doctest::Approx(4.0));
  const Stage cube = scalar_stage([](double x) { return x * x * x - x; });
  CHECK(empirical_expectation(cube, Sample::scalar({1.7}), {}, {})[0] == 1.7 * 1.7 * 1.7 - 1.7);
  const Stage bad = scalar_stage([](double x) { return 1.0 / (x - 2.0); });
  CHECK(kind_of([&] { empirical_expectation(bad, s, {}, {}); }) == ErrorKind::NonFiniteValue);
}

TEST_CASE("eval_composite on the higher-order chain by hand") {
  const CompositeChain chain = higher_order_risk_objective(RiskSpec{HigherOrderInverse{2.0, 0.05, 1.0}, Orientation::Losses});
  const Sample s = Sample::scalar({12.0});
  const double u[1] = {10.0};
  CHECK(eval_composite(chain, ExpectationBackend::all_empirical(2), s, u) == doctest::Approx(50.0).epsilon(1e-14));
}

TEST_CASE("identical points reduce to plain nesting") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const RandomChain rc = draw_chain(rng);
    const CompositeChain chain = to_chain(rc);
    Vector x(rc.m, 0.3);
    std::vector<double> flat;
    for (int i = 0; i < 7; ++i) flat.insert(flat.end(), x.begin(), x.end());
    const Sample s(flat, rc.m);
    const Vector u(rc.n, 0.8);
    Vector eta;
    for (std::size_t j = rc.out_dims.size(); j-- > 0;) eta = rc.stage_value(j, u, eta, x);
    CHECK(eval_composite(chain, ExpectationBackend::all_empirical(chain.levels()), s, u) ==
          doctest::Approx(eta[0]).epsilon(1e-13));
  }
}

TEST_CASE("all-empirical evaluation matches the straight-line estimator, permutation and duplication") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> sizes(1, 50);
  std::normal_distribution<double> gauss;
  for (int rep = 0; rep < 50; ++rep) {
    const RandomChain rc = draw_chain(rng);
    const CompositeChain chain = to_chain(rc);
    const std::size_t N = static_cast<std::size_t>(sizes(rng));
    std::vector<Vector> rows(N, Vector(rc.m));
    std::vector<double> flat;
    for (Vector& r : rows) {
      for (double& v : r) v = gauss(rng);
      flat.insert(flat.end(), r.begin(), r.end());
    }
    Vector u(rc.n);
    for (double& v : u) v = gauss(rng);
    const auto backend = ExpectationBackend::all_empirical(chain.levels());
    const double got = eval_composite(chain, backend, Sample(flat, rc.m), u);
    const double want = straight_line_composite(rc, rows, u);
    CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));

    std::vector<Vector> perm = rows;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> flat_perm;
    for (const Vector& r : perm) flat_perm.insert(flat_perm.end(), r.begin(), r.end());
    CHECK(eval_composite(chain, backend, Sample(flat_perm, rc.m), u) ==
          doctest::Approx(got).epsilon(1e-13));

    std::vector<double> doubled = flat;
    doubled.insert(doubled.end(), flat.begin(), flat.end());
    CHECK(std::abs(eval_composite(chain, backend, Sample(doubled, rc.m), u) - got) <= 1e-12 * std::max(1.0, std::abs(got)));
  }
}

TEST_CASE("kernel backend converges to empirical as h shrinks") {
  const CompositeChain chain = higher_order_risk_objective(RiskSpec{HigherOrderInverse{}, Orientation::Losses});
  const Sample s = Sample::scalar(normal_draws(40, 10.0, 1.7, 5));
  const double u[1] = {11.0};
  const double emp = eval_composite(chain, ExpectationBackend::all_empirical(2), s, u);
  double prev = 1e300;
  for (double h : {1e-1, 1e-3, 1e-6}) {
    const auto b = ExpectationBackend::smoothed_at(2, 1, KernelLevel{KernelFamily::Epanechnikov, h});
    const double gap = eval_composite(chain, b, s, u) - emp;
    CHECK(gap >= -1e-12);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("backend tokens") {
  CHECK(std::holds_alternative<EmpiricalLevel>(parse_backend_token("plugin")));
  const auto k = std::get<KernelLevel>(parse_backend_token("uniform:h=0.25"));
  CHECK(k.family == KernelFamily::Uniform);
  CHECK(*k.bandwidth == 0.25);
  const auto w = std::get<WaveletLevel>(parse_backend_token("wavelet:quadratic:j=3"));
  CHECK(w.family == ScalingFamily::LocallyQuadratic);
  CHECK(*w.resolution == 3);
  CHECK(backend_token(parse_backend_token("wavelet:linear")) == "wavelet:linear");
  CHECK(kind_of([] { parse_backend_token("triweight"); }) == ErrorKind::BackendUnavailable);
  CHECK(kind_of([] { parse_backend_token("wavelet:cubic"); }) == ErrorKind::BackendUnavailable);
  const auto b = ExpectationBackend::smoothed_at(3, 1, KernelLevel{});
  CHECK(b.smoothed_levels() == std::vector<std::size_t>{2});
}
