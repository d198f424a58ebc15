#include "crisk/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>

#include "crisk/error.hpp"

namespace crisk {
namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes 1, 3, 5, 7.
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr std::size_t kPointsPerPanel = 15;

struct Panel {
  double a;
  double b;
  std::vector<double> value;
  std::vector<double> error;
  double worst;  // largest component error
};

struct ByWorstError {
  bool operator()(const Panel& x, const Panel& y) const { return x.worst < y.worst; }
};

Panel evaluate_panel(const VectorIntegrand& f, double a, double b, std::size_t dim, std::vector<double>& scratch) {
  Panel p{a, b, std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0), 0.0};
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  // samples[node * dim + k]; node 7 is the centre, node i and 14 - i mirror each other.
  scratch.assign(kPointsPerPanel * dim, 0.0);
  f(center, std::span<double>(scratch.data() + 7 * dim, dim));
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    f(center - dx, std::span<double>(scratch.data() + i * dim, dim));
    f(center + dx, std::span<double>(scratch.data() + (14 - i) * dim, dim));
  }
  auto weight = [](std::size_t node) { return kKronrodWeights[node < 7 ? node : node == 7 ? 7 : 14 - node]; };
  for (std::size_t k = 0; k < dim; ++k) {
    double kronrod = 0.0;
    double gauss = kGaussWeights[3] * scratch[7 * dim + k];
    for (std::size_t node = 0; node < kPointsPerPanel; ++node) kronrod += weight(node) * scratch[node * dim + k];
    for (std::size_t i = 1; i < 7; i += 2) {
      gauss += kGaussWeights[i / 2] * (scratch[i * dim + k] + scratch[(14 - i) * dim + k]);
    }
    const double mean = 0.5 * kronrod;
    double spread = 0.0;
    for (std::size_t node = 0; node < kPointsPerPanel; ++node) {
      spread += weight(node) * std::abs(scratch[node * dim + k] - mean);
    }
    kronrod *= half;
    gauss *= half;
    spread *= std::abs(half);
    if (!std::isfinite(kronrod)) fail(ErrorKind::NonFiniteValue, "integrand produced a non-finite value");
    // Error heuristic of QUADPACK's qk15: inflates |K - G| when it is small relative to the variation.
    double err = std::abs(kronrod - gauss);
    if (spread != 0.0 && err != 0.0) err = spread * std::min(1.0, std::pow(200.0 * err / spread, 1.5));
    p.value[k] = kronrod;
    p.error[k] = err;
    p.worst = std::max(p.worst, err);
  }
  return p;
}

}  // namespace

void EvaluationBudget::charge(std::size_t n) {
  used_ += n;
  if (used_ > limit_) {
    fail(ErrorKind::QuadratureFailure, "evaluation budget of " + std::to_string(limit_) + " exhausted");
  }
}

void integrate(const VectorIntegrand& f, double a, double b, std::span<double> out, const QuadratureOptions& opts,
               std::span<const double> breakpoints, EvaluationBudget* budget) {
  const std::size_t dim = out.size();
  std::fill(out.begin(), out.end(), 0.0);
  if (a == b) return;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  EvaluationBudget local(opts.max_evaluations);
  EvaluationBudget& meter = budget ? *budget : local;

  std::vector<double> cuts{a};
  for (double c : breakpoints) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  // Start from a few panels per segment so a kink cannot hide in one coincidentally accurate panel.
  constexpr int kInitialSplit = 4;
  std::vector<double> starts;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    for (int s = 0; s < kInitialSplit; ++s) starts.push_back(cuts[i] + (cuts[i + 1] - cuts[i]) * s / kInitialSplit);
  }
  starts.push_back(b);
  cuts = std::move(starts);

  std::vector<double> scratch;
  std::priority_queue<Panel, std::vector<Panel>, ByWorstError> heap;
  std::vector<double> total(dim, 0.0), total_err(dim, 0.0);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    meter.charge(kPointsPerPanel);
    Panel p = evaluate_panel(f, cuts[i], cuts[i + 1], dim, scratch);
    for (std::size_t k = 0; k < dim; ++k) {
      total[k] += p.value[k];
      total_err[k] += p.error[k];
    }
    heap.push(std::move(p));
  }

  auto converged = [&] {
    for (std::size_t k = 0; k < dim; ++k) {
      if (total_err[k] > std::max(opts.abs_tol, opts.rel_tol * std::abs(total[k]))) return false;
    }
    return true;
  };

  while (!converged()) {
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      fail(ErrorKind::QuadratureFailure, "panel cannot be subdivided further; tolerance not met");
    }
    heap.pop();
    meter.charge(2 * kPointsPerPanel);
    Panel left = evaluate_panel(f, worst.a, mid, dim, scratch);
    Panel right = evaluate_panel(f, mid, worst.b, dim, scratch);
    for (std::size_t k = 0; k < dim; ++k) {
      total[k] += left.value[k] + right.value[k] - worst.value[k];
      total_err[k] += left.error[k] + right.error[k] - worst.error[k];
    }
    heap.push(std::move(left));
    heap.push(std::move(right));
  }

  // Re-sum from the panels so that cancellation in the running totals does not leak into the result.
  std::fill(total.begin(), total.end(), 0.0);
  while (!heap.empty()) {
    const Panel& p = heap.top();
    for (std::size_t k = 0; k < dim; ++k) total[k] += p.value[k];
    heap.pop();
  }
  for (std::size_t k = 0; k < dim; ++k) out[k] = sign * total[k];
}

double integrate(const ScalarIntegrand& f, double a, double b, const QuadratureOptions& opts,
                 std::span<const double> breakpoints, EvaluationBudget* budget) {
  double result = 0.0;
  integrate([&](double x, std::span<double> v) { v[0] = f(x); }, a, b, std::span<double>(&result, 1), opts,
            breakpoints, budget);
  return result;
}

double integrate_upper_tail(const ScalarIntegrand& f, double a, const QuadratureOptions& opts) {
  auto mapped = [&](double s) {
    const double one_minus = 1.0 - s;
    const double x = a + s / one_minus;
    const double v = f(x) / (one_minus * one_minus);
    return std::isfinite(x) ? v : 0.0;
  };
  return integrate(mapped, 0.0, 1.0, opts);
}

namespace {

void integrate_box_from(const BoxIntegrand& f, std::size_t level, std::vector<double>& point,
                        std::span<const double> lo, std::span<const double> hi,
                        std::span<const std::vector<double>> breakpoints, std::span<double> out,
                        const QuadratureOptions& opts, EvaluationBudget& budget) {
  const std::size_t m = lo.size();
  std::span<const double> cuts;
  if (level < breakpoints.size()) cuts = breakpoints[level];
  if (level + 1 == m) {
    integrate(
        [&](double z, std::span<double> v) {
          point[level] = z;
          f(point, v);
        },
        lo[level], hi[level], out, opts, cuts, &budget);
    return;
  }
  integrate(
      [&](double z, std::span<double> v) {
        point[level] = z;
        integrate_box_from(f, level + 1, point, lo, hi, breakpoints, v, opts, budget);
      },
      lo[level], hi[level], out, opts, cuts, &budget);
}

}  // namespace

void integrate_box(const BoxIntegrand& f, std::span<const double> lo, std::span<const double> hi,
                   std::span<const std::vector<double>> breakpoints, std::span<double> out,
                   const QuadratureOptions& opts) {
  if (lo.size() != hi.size() || lo.empty()) fail(ErrorKind::DimensionMismatch, "integration box bounds disagree");
  std::vector<double> point(lo.size(), 0.0);
  EvaluationBudget budget(opts.max_evaluations);
  integrate_box_from(f, 0, point, lo, hi, breakpoints, out, opts, budget);
}

}  // namespace crisk
