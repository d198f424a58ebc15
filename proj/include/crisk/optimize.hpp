#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "crisk/backend.hpp"
#include "crisk/core.hpp"

namespace crisk {

struct ScalarDomain {
  double lo = 0.0;
  double hi = 1.0;
  double tol = 1e-8;
};

struct ScalarMinimum {
  double u_star = 0.0;
  double value = 0.0;
};

/// Golden-section search. Ties go to the left point, so flat objectives return the leftmost bracket.
/// Throws BracketTooNarrow when the minimizer ends within 2 tol of either endpoint.
ScalarMinimum minimize_scalar(const std::function<double(double)>& objective, const ScalarDomain& domain);

/// [min - 1, max + (max - min) / alpha]; a constant sample uses width 1 on the right.
ScalarDomain higher_order_bracket(const Sample& sample, double alpha, double tol = 1e-8);

struct SimplexDomain {
  std::size_t dim = 1;
  double budget = 1.0;
  Vector lower;  // empty: all zeros
  Vector upper;  // empty: all equal to budget
};

struct SimplexOptions {
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::size_t max_evaluations = 100000;
};

struct SimplexMinimum {
  Vector u_star;
  double value = 0.0;
};

/// Euclidean projection onto {u : sum u = budget, lower <= u <= upper}. Throws InfeasibleDomain.
Vector project_to_simplex(ConstVec y, const SimplexDomain& domain);

/// Nelder-Mead on objective(project(y)) with seeded multi-start. Restart results are reduced by
/// (value, then lowest restart index).
SimplexMinimum minimize_simplex(const std::function<double(ConstVec)>& objective, const SimplexDomain& domain,
                                const SimplexOptions& options = {});

/// Minimizes a chain with scalar decision over `domain`, holding the prepared backend fixed.
ScalarMinimum minimize_chain(const CompositeChain& chain, const PreparedBackend& backend, const Sample& sample,
                             const ScalarDomain& domain);

}  // namespace crisk
