#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace crisk {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  std::size_t max_evaluations = 1'000'000;
};

/// Evaluation counter shared by nested integrations; throws QuadratureFailure when exhausted.
class EvaluationBudget {
 public:
  explicit EvaluationBudget(std::size_t limit) : limit_(limit) {}

  void charge(std::size_t n);
  std::size_t used() const noexcept { return used_; }

 private:
  std::size_t limit_;
  std::size_t used_ = 0;
};

using ScalarIntegrand = std::function<double(double)>;
using VectorIntegrand = std::function<void(double, std::span<double>)>;
using BoxIntegrand = std::function<void(std::span<const double>, std::span<double>)>;

// Globally adaptive Gauss-Kronrod 7/15. Breakpoints inside (a, b) start the
// subdivision, which is how callers announce kinks of piecewise integrands.
void integrate(const VectorIntegrand& f, double a, double b, std::span<double> out,
               const QuadratureOptions& opts, std::span<const double> breakpoints = {},
               EvaluationBudget* budget = nullptr);

double integrate(const ScalarIntegrand& f, double a, double b, const QuadratureOptions& opts,
                 std::span<const double> breakpoints = {}, EvaluationBudget* budget = nullptr);

/// Integral over [a, inf) through the map x = a + s/(1-s).
double integrate_upper_tail(const ScalarIntegrand& f, double a, const QuadratureOptions& opts);

/// Iterated integral over the box prod_k [lo_k, hi_k]; breakpoints are per dimension.
void integrate_box(const BoxIntegrand& f, std::span<const double> lo, std::span<const double> hi,
                   std::span<const std::vector<double>> breakpoints, std::span<double> out,
                   const QuadratureOptions& opts);

}  // namespace crisk
