#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "crisk/sample.hpp"

namespace crisk {

using ConstVec = std::span<const double>;
using Vector = std::vector<double>;

/// f_j(u, eta, x) written into `out` (size out_dim). The innermost stage receives an empty eta.
using StageFn = std::function<void(ConstVec u, ConstVec eta, ConstVec x, std::span<double> out)>;

struct StageFlags {
  bool convex_in_x = false;
  bool monotone_in_eta = false;
  // The stage ignores x entirely; every expectation backend returns the plain value.
  bool constant_in_x = false;
};

/// g(x) = max(0, offset + <slope, x>)^power, with offset and slope fixed by (u, eta).
struct TruncatedPower {
  double offset = 0.0;
  Vector slope;
  double power = 1.0;
};

using TruncatedPowerFn = std::function<TruncatedPower(ConstVec u, ConstVec eta)>;

struct Stage {
  std::size_t out_dim = 1;
  std::size_t in_dim = 0;
  StageFn eval;
  StageFlags flags;
  // Set for scalar stages of truncated-power form; enables closed-form convolutions.
  TruncatedPowerFn truncated_power;
  std::string name;

  Vector operator()(ConstVec u, ConstVec eta, ConstVec x) const;
};

/// Validated nesting f_1 o ... o f_{k+1}; stages()[0] is the outermost (scalar) stage.
class CompositeChain {
 public:
  const std::vector<Stage>& stages() const noexcept { return stages_; }
  const Stage& stage(std::size_t level) const { return stages_.at(level); }
  std::size_t levels() const noexcept { return stages_.size(); }
  /// Nesting depth k (levels() - 1).
  std::size_t depth() const noexcept { return stages_.size() - 1; }
  std::size_t decision_dim() const noexcept { return decision_dim_; }
  std::size_t data_dim() const noexcept { return data_dim_; }

 private:
  friend CompositeChain make_chain(std::vector<Stage> stages, std::size_t decision_dim, std::size_t data_dim);
  CompositeChain() = default;

  std::vector<Stage> stages_;
  std::size_t decision_dim_ = 0;
  std::size_t data_dim_ = 0;
};

/// Throws EmptyChain for fewer than two stages and DimensionMismatch when the signature does not chain.
CompositeChain make_chain(std::vector<Stage> stages, std::size_t decision_dim, std::size_t data_dim);

/// (1/N) sum_i f(u, eta, X_i), componentwise.
Vector empirical_expectation(const Stage& stage, const Sample& sample, ConstVec u, ConstVec eta);

/// Throws NonFiniteValue naming `what` if any entry is NaN or infinite.
void require_finite(std::span<const double> values, const std::string& what);

}  // namespace crisk
