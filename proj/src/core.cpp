#include "crisk/core.hpp"

#include <cmath>
#include <string>

#include "crisk/error.hpp"

namespace crisk {

Vector Stage::operator()(ConstVec u, ConstVec eta, ConstVec x) const {
  Vector out(out_dim, 0.0);
  eval(u, eta, x, out);
  return out;
}

CompositeChain make_chain(std::vector<Stage> stages, std::size_t decision_dim, std::size_t data_dim) {
  if (stages.size() < 2) {
    fail(ErrorKind::EmptyChain, "a composite chain needs at least two stages (k >= 1), got " +
                                    std::to_string(stages.size()));
  }
  if (data_dim == 0) fail(ErrorKind::DimensionMismatch, "data dimension must be positive");
  if (stages.front().out_dim != 1) {
    fail(ErrorKind::DimensionMismatch, "outermost stage must be scalar, has out_dim " +
                                           std::to_string(stages.front().out_dim));
  }
  if (stages.back().in_dim != 0) fail(ErrorKind::DimensionMismatch, "innermost stage must have in_dim 0");
  for (std::size_t j = 0; j + 1 < stages.size(); ++j) {
    if (stages[j].in_dim != stages[j + 1].out_dim) {
      fail(ErrorKind::DimensionMismatch, "stage " + std::to_string(j + 1) + " expects eta of dimension " +
                                             std::to_string(stages[j].in_dim) + " but stage " +
                                             std::to_string(j + 2) + " produces " +
                                             std::to_string(stages[j + 1].out_dim));
    }
  }
  for (const Stage& s : stages) {
    if (!s.eval) fail(ErrorKind::BadParameters, "stage without an evaluation function");
    if (s.out_dim == 0) fail(ErrorKind::DimensionMismatch, "stage output dimension must be positive");
  }
  CompositeChain chain;
  chain.stages_ = std::move(stages);
  chain.decision_dim_ = decision_dim;
  chain.data_dim_ = data_dim;
  return chain;
}

void require_finite(std::span<const double> values, const std::string& what) {
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorKind::NonFiniteValue, what + " produced a non-finite value");
  }
}

Vector empirical_expectation(const Stage& stage, const Sample& sample, ConstVec u, ConstVec eta) {
  if (eta.size() != stage.in_dim) {
    fail(ErrorKind::DimensionMismatch, "eta has dimension " + std::to_string(eta.size()) + ", stage expects " +
                                           std::to_string(stage.in_dim));
  }
  Vector acc(stage.out_dim, 0.0);
  Vector value(stage.out_dim, 0.0);
  if (stage.flags.constant_in_x) {
    stage.eval(u, eta, sample.row(0), value);
    require_finite(value, "stage '" + stage.name + "'");
    return value;
  }
  for (std::size_t i = 0; i < sample.size(); ++i) {
    stage.eval(u, eta, sample.row(i), value);
    for (std::size_t k = 0; k < value.size(); ++k) acc[k] += value[k];
  }
  require_finite(acc, "stage '" + stage.name + "'");
  for (double& a : acc) a /= static_cast<double>(sample.size());
  return acc;
}

}  // namespace crisk
