#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "crisk/core.hpp"
#include "crisk/smoothing.hpp"
#include "crisk/wavelet.hpp"

namespace crisk {

struct EmpiricalLevel {};

struct KernelLevel {
  KernelFamily family = KernelFamily::Gaussian;
  std::optional<double> bandwidth;  // empty: rule bandwidth
};

struct WaveletLevel {
  ScalingFamily family = ScalingFamily::LocallyLinear;
  std::optional<int> resolution;  // empty: resolution_rule(N, rounding)
  ResolutionRounding rounding = ResolutionRounding::Floor;
};

using LevelBackend = std::variant<EmpiricalLevel, KernelLevel, WaveletLevel>;

/// Expectation operator chosen per nesting level (index 0 is the outermost stage).
struct ExpectationBackend {
  std::vector<LevelBackend> per_level;

  static ExpectationBackend all_empirical(std::size_t levels);
  /// Empirical everywhere except `level`.
  static ExpectationBackend smoothed_at(std::size_t levels, std::size_t level, LevelBackend backend);

  /// The index set J of smoothed levels, 1-based as in f_1..f_{k+1}.
  std::vector<std::size_t> smoothed_levels() const;
};

/// CLI estimator tokens: `plugin`, `uniform|epanechnikov|gaussian[:h=<float>]`,
/// `wavelet:linear|wavelet:quadratic[:j=<int>]`. Throws BackendUnavailable for anything else.
LevelBackend parse_backend_token(std::string_view token);
std::string backend_token(const LevelBackend& backend);

/// Backend with bandwidths and wavelet densities fixed for one sample, reusable across decisions u.
class PreparedBackend {
 public:
  PreparedBackend(const ExpectationBackend& backend, const Sample& sample, const QuadratureOptions& quadrature = {});

  std::size_t levels() const noexcept { return levels_.size(); }
  const LevelBackend& tag(std::size_t level) const { return tags_.at(level); }
  /// Bandwidth used at `level` for coordinate 0, if the level is a kernel level.
  std::optional<double> bandwidth(std::size_t level) const;
  /// Resolution used at `level` for coordinate 0, if the level is a wavelet level.
  std::optional<int> resolution(std::size_t level) const;

  Vector expectation(std::size_t level, const Stage& stage, const Sample& sample, ConstVec u, ConstVec eta) const;

 private:
  using Resolved = std::variant<std::monostate, ResolvedSmoothing, WaveletDensity>;
  std::vector<LevelBackend> tags_;
  std::vector<Resolved> levels_;
  QuadratureOptions quadrature_;
};

/// Nested evaluation from the innermost stage outward, using the whole sample at every level.
double eval_composite(const CompositeChain& chain, const PreparedBackend& backend, const Sample& sample, ConstVec u);
double eval_composite(const CompositeChain& chain, const ExpectationBackend& backend, const Sample& sample,
                      ConstVec u);

}  // namespace crisk
