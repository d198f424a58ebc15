#pragma once

#include <cstdint>
#include <string_view>
#include <variant>

#include "crisk/core.hpp"
#include "crisk/smoothing.hpp"

namespace crisk {

/// Whether data coordinates are losses (larger is worse) or returns (larger is better).
enum class Orientation { Losses, Returns };

/// E[Y] + kappa * (E[max(0, Y - E[Y])^p])^{1/p} for the portfolio loss Y.
struct MeanSemiDeviation {
  double p = 2.0;
  double kappa = 0.5;
};

/// min_z { z + (1/alpha) (E[max(0, Y - z)^q])^{1/q} }, blended as
/// (1 - kappa) E[Y] + kappa * measure when kappa < 1.
struct HigherOrderInverse {
  double q = 2.0;
  double alpha = 0.05;
  double kappa = 1.0;
};

struct RiskSpec {
  std::variant<MeanSemiDeviation, HigherOrderInverse> family;
  Orientation orientation = Orientation::Losses;
};

void validate(const MeanSemiDeviation& spec);
void validate(const HigherOrderInverse& spec);

/// Parses `msd:p=<float>,kappa=<float>` or `hor:q=<float>,alpha=<float>[,kappa=<float>]`.
RiskSpec parse_risk_token(std::string_view token);

/// Three-stage chain over portfolio weights u (n assets, data dimension n):
/// f1 = Y + kappa eta1^{1/p}, f2 = max(0, Y - eta2)^p, f3 = Y with Y = +-<u, x>.
CompositeChain mean_semideviation_chain(const RiskSpec& spec, std::size_t assets);

/// Chain in the scalar decision z over 1-D data:
/// f1(z, eta) = z + eta^{1/q} / alpha, f2(z, x) = max(0, y - z)^q with y = +-x.
/// For kappa < 1 the inner stage is (y, max(0, y - z)^q) and f1 blends the mean in.
CompositeChain higher_order_risk_objective(const RiskSpec& spec);

/// Portfolio form over decision (u_1..u_n, u_0) and n-dimensional data:
/// f1 = (1 - kappa) eta1 + kappa (u0 + eta2^{1/q} / alpha), f2 = (Y, max(0, Y - u0)^q).
CompositeChain inverse_measure_portfolio_chain(const RiskSpec& spec, std::size_t assets);

/// Count of negative inner values clipped to zero before taking a root (round-off only).
std::uint64_t domain_clip_count() noexcept;

/// Modulus in x of f2(z, x) = max(0, x - z)^2 over data whose positive part is at most `reach`,
/// i.e. (a + t)_+^2 - a_+^2 <= 2 reach t + t^2.
HolderModulus higher_order_inner_modulus(double q, double reach);

/// Modulus in eta of f1: |a^{1/q} - b^{1/q}| / alpha <= |a - b|^{1/q} / alpha.
HolderModulus higher_order_outer_modulus(double q, double alpha);

}  // namespace crisk
