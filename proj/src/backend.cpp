#include "crisk/backend.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "crisk/error.hpp"

namespace crisk {
namespace {

template <class T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorKind::BackendUnavailable, "cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

ExpectationBackend ExpectationBackend::all_empirical(std::size_t levels) {
  return ExpectationBackend{std::vector<LevelBackend>(levels, EmpiricalLevel{})};
}

ExpectationBackend ExpectationBackend::smoothed_at(std::size_t levels, std::size_t level, LevelBackend backend) {
  ExpectationBackend b = all_empirical(levels);
  b.per_level.at(level) = std::move(backend);
  return b;
}

std::vector<std::size_t> ExpectationBackend::smoothed_levels() const {
  std::vector<std::size_t> j;
  for (std::size_t i = 0; i < per_level.size(); ++i) {
    if (!std::holds_alternative<EmpiricalLevel>(per_level[i])) j.push_back(i + 1);
  }
  return j;
}

LevelBackend parse_backend_token(std::string_view token) {
  const auto parts = split(token, ':');
  const std::string_view head = parts[0];
  if (head == "plugin" || head == "empirical") {
    if (parts.size() != 1) fail(ErrorKind::BackendUnavailable, "plugin takes no options");
    return EmpiricalLevel{};
  }
  if (head == "wavelet") {
    if (parts.size() < 2) fail(ErrorKind::BackendUnavailable, "wavelet token needs a family: wavelet:linear");
    WaveletLevel w;
    w.family = scaling_family_from_string(parts[1]);
    for (std::size_t i = 2; i < parts.size(); ++i) {
      if (parts[i].substr(0, 2) == "j=") {
        w.resolution = parse_number<int>(parts[i].substr(2), "resolution");
      } else if (parts[i] == "round=nearest") {
        w.rounding = ResolutionRounding::Nearest;
      } else if (parts[i] == "round=floor") {
        w.rounding = ResolutionRounding::Floor;
      } else {
        fail(ErrorKind::BackendUnavailable, "unknown wavelet option '" + std::string(parts[i]) + "'");
      }
    }
    return w;
  }
  KernelLevel k;
  k.family = kernel_family_from_string(head);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].substr(0, 2) != "h=") {
      fail(ErrorKind::BackendUnavailable, "unknown kernel option '" + std::string(parts[i]) + "'");
    }
    k.bandwidth = parse_number<double>(parts[i].substr(2), "bandwidth");
    if (!(*k.bandwidth > 0.0)) fail(ErrorKind::BackendUnavailable, "bandwidth must be positive");
  }
  return k;
}

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string backend_token(const LevelBackend& backend) {
  std::ostringstream out;
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, EmpiricalLevel>) {
          out << "plugin";
        } else if constexpr (std::is_same_v<T, KernelLevel>) {
          out << to_string(b.family);
          if (b.bandwidth) out << ":h=" << shortest(*b.bandwidth);
        } else {
          out << "wavelet:" << to_string(b.family);
          if (b.resolution) out << ":j=" << *b.resolution;
          if (b.rounding == ResolutionRounding::Nearest) out << ":round=nearest";
        }
      },
      backend);
  return out.str();
}

PreparedBackend::PreparedBackend(const ExpectationBackend& backend, const Sample& sample,
                                 const QuadratureOptions& quadrature)
    : tags_(backend.per_level), quadrature_(quadrature) {
  for (const LevelBackend& tag : tags_) {
    if (const auto* k = std::get_if<KernelLevel>(&tag)) {
      SmoothingPlan plan;
      plan.kernel = Kernel(k->family);
      plan.bandwidth = k->bandwidth;
      plan.quadrature = quadrature;
      levels_.emplace_back(resolve(plan, sample));
    } else if (const auto* w = std::get_if<WaveletLevel>(&tag)) {
      const int j = w->resolution.value_or(resolution_rule(sample.size(), w->rounding));
      levels_.emplace_back(wavelet_density(sample, ScalingFunction(w->family), j));
    } else {
      levels_.emplace_back(std::monostate{});
    }
  }
}

std::optional<double> PreparedBackend::bandwidth(std::size_t level) const {
  if (const auto* s = std::get_if<ResolvedSmoothing>(&levels_.at(level))) return s->bandwidths.at(0);
  return std::nullopt;
}

std::optional<int> PreparedBackend::resolution(std::size_t level) const {
  if (const auto* w = std::get_if<WaveletDensity>(&levels_.at(level))) return w->basis().resolution.at(0);
  return std::nullopt;
}

Vector PreparedBackend::expectation(std::size_t level, const Stage& stage, const Sample& sample, ConstVec u,
                                    ConstVec eta) const {
  const Resolved& r = levels_.at(level);
  if (const auto* s = std::get_if<ResolvedSmoothing>(&r)) return smoothed_expectation(stage, sample, *s, u, eta);
  if (const auto* w = std::get_if<WaveletDensity>(&r)) {
    if (w->dims() != sample.dim()) fail(ErrorKind::BackendUnavailable, "wavelet density dimension mismatch");
    return wavelet_expectation(stage, *w, u, eta, quadrature_);
  }
  return empirical_expectation(stage, sample, u, eta);
}

double eval_composite(const CompositeChain& chain, const PreparedBackend& backend, const Sample& sample, ConstVec u) {
  if (backend.levels() != chain.levels()) {
    fail(ErrorKind::DimensionMismatch, "backend has " + std::to_string(backend.levels()) + " levels, chain has " +
                                           std::to_string(chain.levels()));
  }
  if (u.size() != chain.decision_dim()) fail(ErrorKind::DimensionMismatch, "decision vector has wrong dimension");
  if (sample.dim() != chain.data_dim()) fail(ErrorKind::DimensionMismatch, "sample dimension does not match chain");
  Vector eta;
  for (std::size_t level = chain.levels(); level-- > 0;) {
    eta = backend.expectation(level, chain.stage(level), sample, u, eta);
  }
  return eta.at(0);
}

double eval_composite(const CompositeChain& chain, const ExpectationBackend& backend, const Sample& sample,
                      ConstVec u) {
  return eval_composite(chain, PreparedBackend(backend, sample), sample, u);
}

}  // namespace crisk
