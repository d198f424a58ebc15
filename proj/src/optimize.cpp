#include "crisk/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "crisk/error.hpp"

namespace crisk {
namespace {

void check_value(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorKind::NonFiniteValue, std::string(what) + " returned a non-finite value");
}

}  // namespace

ScalarMinimum minimize_scalar(const std::function<double(double)>& objective, const ScalarDomain& domain) {
  if (!(domain.lo < domain.hi) || !(domain.tol > 0.0)) {
    fail(ErrorKind::BadParameters, "scalar domain needs lo < hi and tol > 0");
  }
  if (domain.hi - domain.lo <= 4.0 * domain.tol) fail(ErrorKind::BracketTooNarrow, "bracket is narrower than 4 tol");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = domain.lo;
  double b = domain.hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  check_value(fc, "objective");
  check_value(fd, "objective");
  while (b - a > domain.tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = objective(c);
      check_value(fc, "objective");
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = objective(d);
      check_value(fd, "objective");
    }
  }
  const double u = 0.5 * (a + b);
  if (u - domain.lo <= 2.0 * domain.tol || domain.hi - u <= 2.0 * domain.tol) {
    fail(ErrorKind::BracketTooNarrow,
         "minimizer pinned at an endpoint of [" + std::to_string(domain.lo) + ", " + std::to_string(domain.hi) + "]");
  }
  const double value = objective(u);
  check_value(value, "objective");
  return {u, value};
}

ScalarDomain higher_order_bracket(const Sample& sample, double alpha, double tol) {
  if (!(alpha > 0.0)) fail(ErrorKind::BadParameters, "alpha must be positive");
  const double lo = sample.min(0);
  const double hi = sample.max(0);
  const double width = hi > lo ? hi - lo : 1.0;
  return {lo - 1.0, hi + width / alpha, tol};
}

Vector project_to_simplex(ConstVec y, const SimplexDomain& domain) {
  const std::size_t n = domain.dim;
  if (n == 0 || y.size() != n) fail(ErrorKind::DimensionMismatch, "projection input has the wrong dimension");
  Vector lo = domain.lower.empty() ? Vector(n, 0.0) : domain.lower;
  Vector hi = domain.upper.empty() ? Vector(n, domain.budget) : domain.upper;
  if (lo.size() != n || hi.size() != n) fail(ErrorKind::DimensionMismatch, "bounds have the wrong dimension");
  double sum_lo = 0.0;
  double sum_hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (lo[i] > hi[i]) fail(ErrorKind::InfeasibleDomain, "lower bound exceeds upper bound");
    sum_lo += lo[i];
    sum_hi += hi[i];
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(domain.budget));
  if (domain.budget < sum_lo - slack || domain.budget > sum_hi + slack) {
    fail(ErrorKind::InfeasibleDomain, "budget lies outside [sum lower, sum upper]");
  }
  auto clipped_sum = [&](double tau) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::clamp(y[i] - tau, lo[i], hi[i]);
    return s;
  };
  // clipped_sum is nonincreasing in tau; bracket the root and bisect.
  double t_lo = std::numeric_limits<double>::infinity();
  double t_hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    t_lo = std::min(t_lo, y[i] - hi[i]);
    t_hi = std::max(t_hi, y[i] - lo[i]);
  }
  for (int it = 0; it < 200 && t_hi - t_lo > 0.0; ++it) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (mid <= t_lo || mid >= t_hi) break;
    if (clipped_sum(mid) > domain.budget) t_lo = mid;
    else t_hi = mid;
  }
  const double tau = 0.5 * (t_lo + t_hi);
  Vector u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = std::clamp(y[i] - tau, lo[i], hi[i]);
  // Spread the residual over coordinates with room so the budget holds to round-off.
  double residual = domain.budget - std::accumulate(u.begin(), u.end(), 0.0);
  for (std::size_t i = 0; i < n && residual != 0.0; ++i) {
    const double room = residual > 0.0 ? hi[i] - u[i] : lo[i] - u[i];
    const double step = residual > 0.0 ? std::min(residual, room) : std::max(residual, room);
    u[i] += step;
    residual -= step;
  }
  return u;
}

namespace {

struct NelderMeadResult {
  Vector y;
  double value;
};

NelderMeadResult nelder_mead(const std::function<double(ConstVec)>& f, Vector start, double scale, double tol,
                             std::size_t budget) {
  const std::size_t n = start.size();
  std::vector<Vector> pts(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += scale;
  std::vector<double> vals(n + 1);
  std::size_t evals = 0;
  auto eval = [&](const Vector& p) {
    ++evals;
    return f(p);
  };
  for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);
  std::vector<std::size_t> order(n + 1);
  while (evals < budget) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      double d = 0.0;
      for (std::size_t k = 0; k < n; ++k) d = std::max(d, std::abs(pts[i][k] - pts[best][k]));
      diameter = std::max(diameter, d);
    }
    if (diameter <= tol) break;
    Vector centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      Vector p(n);
      for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + t * (pts[worst][k] - centroid[k]);
      return p;
    };
    Vector xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      Vector xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = std::move(xe);
        vals[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = std::move(xr);
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    Vector xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = std::move(xc);
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
      vals[i] = eval(pts[i]);
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  return {pts[static_cast<std::size_t>(it - vals.begin())], *it};
}

}  // namespace

SimplexMinimum minimize_simplex(const std::function<double(ConstVec)>& objective, const SimplexDomain& domain,
                                const SimplexOptions& options) {
  const std::size_t n = domain.dim;
  // Validates bounds and feasibility even in the trivial case.
  const Vector center = project_to_simplex(Vector(n, domain.budget / static_cast<double>(std::max<std::size_t>(n, 1))),
                                           domain);
  if (n == 1) {
    const Vector u{domain.budget};
    const double v = objective(u);
    check_value(v, "objective");
    return {u, v};
  }
  auto penalized = [&](ConstVec y) {
    const Vector u = project_to_simplex(y, domain);
    double dist2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) dist2 += (y[k] - u[k]) * (y[k] - u[k]);
    const double v = objective(u);
    check_value(v, "objective");
    return v + dist2;
  };
  const double scale = 0.25 * std::max(std::abs(domain.budget), 1e-3);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
  const std::size_t per_restart = std::max<std::size_t>(options.max_evaluations / restarts, 2 * n + 2);
  SimplexMinimum best{center, std::numeric_limits<double>::infinity()};
  for (std::size_t r = 0; r < restarts; ++r) {
    Vector seed = center;
    if (r > 0) {
      for (double& s : seed) s = unit(rng) * std::abs(domain.budget);
      seed = project_to_simplex(seed, domain);
    }
    const NelderMeadResult res = nelder_mead(penalized, seed, scale, options.tol, per_restart);
    Vector u = project_to_simplex(res.y, domain);
    const double v = objective(u);
    check_value(v, "objective");
    if (v < best.value) best = {std::move(u), v};
  }
  return best;
}

ScalarMinimum minimize_chain(const CompositeChain& chain, const PreparedBackend& backend, const Sample& sample,
                             const ScalarDomain& domain) {
  if (chain.decision_dim() != 1) fail(ErrorKind::DimensionMismatch, "minimize_chain needs a scalar decision");
  return minimize_scalar(
      [&](double u) {
        const double uu[1] = {u};
        return eval_composite(chain, backend, sample, ConstVec(uu, 1));
      },
      domain);
}

}  // namespace crisk
