#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "crisk/core.hpp"
#include "crisk/piecewise.hpp"
#include "crisk/quadrature.hpp"

namespace crisk {

enum class ScalingFamily { LocallyLinear, LocallyQuadratic };

std::string_view to_string(ScalingFamily family) noexcept;
/// Accepts `linear` and `quadratic`; throws BackendUnavailable otherwise.
ScalingFamily scaling_family_from_string(std::string_view name);

/// Nonnegative compactly supported scaling function phi satisfying
/// sum_l phi(x - l) = 1 and sum_l l phi(x - l) = x.
class ScalingFunction {
 public:
  explicit ScalingFunction(ScalingFamily family) : family_(family) {}

  ScalingFamily family() const noexcept { return family_; }
  /// a, with supp(phi) = [-a, a].
  double support_radius() const noexcept { return family_ == ScalingFamily::LocallyLinear ? 1.0 : 1.5; }
  double operator()(double x) const noexcept;
  /// phi as a piecewise polynomial; phi is itself a probability density.
  std::span<const PolyPiece> pieces() const noexcept;

 private:
  ScalingFamily family_;
};

double phi_eval(const ScalingFunction& phi, double x) noexcept;

enum class ResolutionRounding { Floor, Nearest };

/// j* from log2(N)/5, rounded per `rounding` and floored at 0.
int resolution_rule(std::size_t n, ResolutionRounding rounding = ResolutionRounding::Floor);

/// K(y, x) = sum_l phi(y - l) phi(x - l).
double generalized_kernel(const ScalingFunction& phi, double y, double x) noexcept;

struct WaveletBasis {
  ScalingFunction phi{ScalingFamily::LocallyLinear};
  std::vector<int> resolution;  // one level per dimension

  std::size_t dims() const noexcept { return resolution.size(); }
};

/// d(x) = sum_l c_l phi_{jl}(x), c_l = 2^{-|j|/2} (1/N) sum_i prod_k phi(2^{j_k} X_ik - l_k),
/// stored sparsely over the indices with nonzero coefficient.
class WaveletDensity {
 public:
  const WaveletBasis& basis() const noexcept { return basis_; }
  std::size_t dims() const noexcept { return basis_.dims(); }
  std::size_t size() const noexcept { return weights_.size(); }

  /// Multi-index of the t-th stored coefficient.
  std::span<const long> index(std::size_t t) const noexcept { return {indices_.data() + t * dims(), dims()}; }
  /// c_l as defined above.
  double coefficient(std::size_t t) const noexcept;
  /// w_l = c_l * 2^{|j|/2}, the probability weight of translate l (weights sum to one).
  double weight(std::size_t t) const noexcept { return weights_[t]; }

  /// Inclusive window [lo, hi] of admissible indices for dimension k.
  std::pair<long, long> active_range(std::size_t k) const noexcept { return windows_[k]; }

  double operator()(std::span<const double> x) const;
  double operator()(double x) const;

 private:
  friend WaveletDensity wavelet_density(const Sample&, const ScalingFunction&, std::vector<int>);

  WaveletBasis basis_;
  std::vector<long> indices_;
  std::vector<double> weights_;
  std::vector<std::pair<long, long>> windows_;
};

WaveletDensity wavelet_density(const Sample& sample, const ScalingFunction& phi, int resolution);
WaveletDensity wavelet_density(const Sample& sample, const ScalingFunction& phi, std::vector<int> resolution);

/// integral f(u, eta, x) d(x) dx = sum_l w_l E[f(u, eta, (l + Y) / 2^j)], Y ~ prod phi.
Vector wavelet_expectation(const Stage& stage, const WaveletDensity& density, ConstVec u, ConstVec eta,
                           const QuadratureOptions& quadrature = {});

}  // namespace crisk
