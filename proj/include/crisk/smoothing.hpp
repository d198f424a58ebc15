#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "crisk/core.hpp"
#include "crisk/piecewise.hpp"
#include "crisk/quadrature.hpp"

namespace crisk {

enum class KernelFamily { Uniform, Epanechnikov, Gaussian };

std::string_view to_string(KernelFamily family) noexcept;
/// Accepts `uniform`, `epanechnikov`, `gaussian`; throws BackendUnavailable otherwise.
KernelFamily kernel_family_from_string(std::string_view name);

/// Symmetric second-order smoothing kernel. Multivariate use is the product of the 1-D density.
class Kernel {
 public:
  explicit Kernel(KernelFamily family) : family_(family) {}

  KernelFamily family() const noexcept { return family_; }
  std::string_view name() const noexcept { return to_string(family_); }
  double order() const noexcept { return 2.0; }
  /// Support radius r (density vanishes for |z| > r); empty for the Gaussian.
  std::optional<double> support_radius() const noexcept;

  double density(double z) const noexcept;
  double density(std::span<const double> z) const noexcept;

  /// Piecewise-polynomial representation (empty for the Gaussian).
  std::span<const PolyPiece> pieces() const noexcept;

 private:
  KernelFamily family_;
};

/// m_alpha(K) = integral of ||y||^alpha K(y) over R^dim; OrderExceeded for alpha > order().
double kernel_moment(const Kernel& kernel, double alpha, std::size_t dim = 1);

/// E[(t + Z)_+^p] for Z ~ K and p in {1, 2} (any integer p for the polynomial kernels).
double kernel_truncated_moment(const Kernel& kernel, double t, int p);

/// 1.06 * sigma_hat * N^{-1/5} on coordinate `coord`; DegenerateSample when sigma_hat = 0.
double bandwidth_rule(const Sample& sample, std::size_t coord = 0);

enum class IntegrationMode { Auto, Quadrature };

struct SmoothingPlan {
  Kernel kernel{KernelFamily::Gaussian};
  std::optional<double> bandwidth;  // empty: rule bandwidth, applied per coordinate
  IntegrationMode integration = IntegrationMode::Auto;
  QuadratureOptions quadrature{};
  double gaussian_truncation = 8.0;
};

/// A plan with its bandwidths fixed for one sample.
struct ResolvedSmoothing {
  Kernel kernel{KernelFamily::Gaussian};
  std::vector<double> bandwidths;
  IntegrationMode integration = IntegrationMode::Auto;
  QuadratureOptions quadrature{};
  double gaussian_truncation = 8.0;
};

ResolvedSmoothing resolve(const SmoothingPlan& plan, const Sample& sample);

/// (1/N) sum_i integral f(u, eta, X_i + h z) K(z) dz, componentwise.
Vector smoothed_expectation(const Stage& stage, const Sample& sample, const ResolvedSmoothing& smoothing,
                            ConstVec u, ConstVec eta);
Vector smoothed_expectation(const Stage& stage, const Sample& sample, const SmoothingPlan& plan, ConstVec u,
                            ConstVec eta);

/// Kernel density estimate (1/(N h)) sum_i K((x - X_i)/h) of a 1-D sample.
double kernel_density(const Sample& sample, const Kernel& kernel, double bandwidth, double x);

/// Hoelder-type modulus of continuity w(t) = sum_k coef_k t^exponent_k.
struct HolderModulus {
  struct Term {
    double coef;
    double exponent;
  };
  std::vector<Term> terms;

  double operator()(double t) const;
};

/// integral of w(h ||z||) K(z) dz = sum_k coef_k h^beta_k m_beta_k(K).
double smoothed_modulus(const HolderModulus& w, const Kernel& kernel, double bandwidth, std::size_t dim = 1);

}  // namespace crisk
