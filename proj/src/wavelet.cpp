#include "crisk/wavelet.hpp"

#include <array>
#include <cmath>
#include <map>
#include <string>

#include "crisk/error.hpp"

namespace crisk {
namespace {

constexpr std::array<PolyPiece, 2> kLinearPieces = {PolyPiece{-1.0, 0.0, {1.0, 1.0, 0.0}},
                                                    PolyPiece{0.0, 1.0, {1.0, -1.0, 0.0}}};
constexpr std::array<PolyPiece, 3> kQuadraticPieces = {PolyPiece{-1.5, -0.5, {1.125, 1.5, 0.5}},
                                                       PolyPiece{-0.5, 0.5, {0.75, 0.0, -1.0}},
                                                       PolyPiece{0.5, 1.5, {1.125, -1.5, 0.5}}};

}  // namespace

std::string_view to_string(ScalingFamily family) noexcept {
  return family == ScalingFamily::LocallyLinear ? "linear" : "quadratic";
}

ScalingFamily scaling_family_from_string(std::string_view name) {
  if (name == "linear") return ScalingFamily::LocallyLinear;
  if (name == "quadratic") return ScalingFamily::LocallyQuadratic;
  fail(ErrorKind::BackendUnavailable, "unknown scaling function '" + std::string(name) + "'");
}

double ScalingFunction::operator()(double x) const noexcept {
  if (family_ == ScalingFamily::LocallyLinear) {
    if (x >= -1.0 && x < 0.0) return 1.0 + x;
    if (x >= 0.0 && x <= 1.0) return 1.0 - x;
    return 0.0;
  }
  if (std::abs(x) >= 1.5) return 0.0;
  if (x > -1.5 && x <= -0.5) return 0.5 * (1.5 + x) * (1.5 + x);
  if (x > -0.5 && x < 0.5) return 1.0 + x - (x + 0.5) * (x + 0.5);
  return 0.5 * (1.5 - x) * (1.5 - x);
}

std::span<const PolyPiece> ScalingFunction::pieces() const noexcept {
  if (family_ == ScalingFamily::LocallyLinear) return kLinearPieces;
  return kQuadraticPieces;
}

double phi_eval(const ScalingFunction& phi, double x) noexcept { return phi(x); }

int resolution_rule(std::size_t n, ResolutionRounding rounding) {
  if (n < 2) fail(ErrorKind::BadParameters, "resolution rule needs N >= 2");
  const double raw = std::log2(static_cast<double>(n)) / 5.0;
  const double j = rounding == ResolutionRounding::Floor ? std::floor(raw) : std::floor(raw + 0.5);
  return std::max(0, static_cast<int>(j));
}

double generalized_kernel(const ScalingFunction& phi, double y, double x) noexcept {
  const double a = phi.support_radius();
  double acc = 0.0;
  for (long l = static_cast<long>(std::ceil(y - a)); l <= static_cast<long>(std::floor(y + a)); ++l) {
    acc += phi(y - static_cast<double>(l)) * phi(x - static_cast<double>(l));
  }
  return acc;
}

double WaveletDensity::coefficient(std::size_t t) const noexcept {
  double scale = 1.0;
  for (int j : basis_.resolution) scale *= std::pow(2.0, -0.5 * j);
  return weights_[t] * scale;
}

double WaveletDensity::operator()(std::span<const double> x) const {
  if (x.size() != dims()) fail(ErrorKind::DimensionMismatch, "point dimension does not match density");
  double acc = 0.0;
  for (std::size_t t = 0; t < size(); ++t) {
    double v = weights_[t];
    const auto l = index(t);
    for (std::size_t k = 0; k < dims() && v != 0.0; ++k) {
      const double s = std::ldexp(1.0, basis_.resolution[k]);
      v *= s * basis_.phi(s * x[k] - static_cast<double>(l[k]));
    }
    acc += v;
  }
  return acc;
}

double WaveletDensity::operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

WaveletDensity wavelet_density(const Sample& sample, const ScalingFunction& phi, int resolution) {
  return wavelet_density(sample, phi, std::vector<int>(sample.dim(), resolution));
}

WaveletDensity wavelet_density(const Sample& sample, const ScalingFunction& phi, std::vector<int> resolution) {
  const std::size_t m = sample.dim();
  if (resolution.size() != m) fail(ErrorKind::DimensionMismatch, "one resolution level per dimension required");
  for (int j : resolution) {
    if (j < 0 || j > 40) fail(ErrorKind::BadParameters, "resolution level must lie in [0, 40]");
  }
  const double a = phi.support_radius();
  const long reach = static_cast<long>(std::ceil(a));

  WaveletDensity d;
  d.basis_ = WaveletBasis{phi, resolution};
  std::vector<double> scale(m);
  for (std::size_t k = 0; k < m; ++k) {
    scale[k] = std::ldexp(1.0, resolution[k]);
    d.windows_.emplace_back(static_cast<long>(std::floor(scale[k] * sample.min(k))) - reach,
                            static_cast<long>(std::ceil(scale[k] * sample.max(k))) + reach);
  }

  // Per observation: the translates with nonzero phi in each coordinate, then their tensor products.
  std::map<std::vector<long>, double> acc;
  std::vector<std::vector<std::pair<long, double>>> factors(m);
  std::vector<long> key(m);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      factors[k].clear();
      const double y = scale[k] * sample.at(i, k);
      for (long l = static_cast<long>(std::ceil(y - a)); l <= static_cast<long>(std::floor(y + a)); ++l) {
        const double v = phi(y - static_cast<double>(l));
        if (v > 0.0) factors[k].emplace_back(l, v);
      }
    }
    std::vector<std::size_t> pos(m, 0);
    while (true) {
      double v = 1.0;
      for (std::size_t k = 0; k < m; ++k) {
        key[k] = factors[k][pos[k]].first;
        v *= factors[k][pos[k]].second;
      }
      acc[key] += v;
      std::size_t k = 0;
      while (k < m && ++pos[k] == factors[k].size()) pos[k++] = 0;
      if (k == m) break;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  for (const auto& [l, w] : acc) {
    d.indices_.insert(d.indices_.end(), l.begin(), l.end());
    d.weights_.push_back(w * inv_n);
  }
  return d;
}

Vector wavelet_expectation(const Stage& stage, const WaveletDensity& density, ConstVec u, ConstVec eta,
                           const QuadratureOptions& quadrature) {
  if (eta.size() != stage.in_dim) fail(ErrorKind::DimensionMismatch, "eta dimension does not match stage");
  const std::size_t m = density.dims();
  const std::vector<int>& res = density.basis().resolution;
  const ScalingFunction& phi = density.basis().phi;
  Vector x(m, 0.0);
  std::vector<double> inv_scale(m);
  for (std::size_t k = 0; k < m; ++k) inv_scale[k] = std::ldexp(1.0, -res[k]);

  if (stage.flags.constant_in_x) {
    Vector out(stage.out_dim, 0.0);
    stage.eval(u, eta, x, out);
    require_finite(out, "stage '" + stage.name + "'");
    return out;
  }

  if (stage.truncated_power && stage.out_dim == 1) {
    const TruncatedPower tp = stage.truncated_power(u, eta);
    if (tp.slope.size() != m) fail(ErrorKind::DimensionMismatch, "truncated-power slope does not match density");
    std::size_t nonzero = 0, coord = 0;
    for (std::size_t k = 0; k < m; ++k) {
      if (tp.slope[k] != 0.0) {
        ++nonzero;
        coord = k;
      }
    }
    const bool integer_power = tp.power >= 1.0 && tp.power <= 4.0 && std::floor(tp.power) == tp.power;
    if (integer_power && nonzero <= 1) {
      const int p = static_cast<int>(tp.power);
      const double width = nonzero == 0 ? 0.0 : std::abs(tp.slope[coord]) * inv_scale[coord];
      double acc = 0.0;
      for (std::size_t t = 0; t < density.size(); ++t) {
        double d = tp.offset;
        if (nonzero == 1) d += tp.slope[coord] * static_cast<double>(density.index(t)[coord]) * inv_scale[coord];
        const double value = width == 0.0 ? std::pow(std::max(0.0, d), p)
                                          : std::pow(width, p) * truncated_moment(phi.pieces(), d / width, p);
        acc += density.weight(t) * value;
      }
      require_finite(std::span<const double>(&acc, 1), "wavelet stage '" + stage.name + "'");
      return Vector{acc};
    }
  }

  const double a = phi.support_radius();
  std::vector<double> cuts;
  for (const PolyPiece& piece : phi.pieces()) cuts.push_back(piece.lo);
  std::vector<std::vector<double>> box_cuts(m, cuts);
  std::vector<double> lo(m, -a), hi(m, a);
  Vector acc(stage.out_dim, 0.0), integral(stage.out_dim, 0.0);
  for (std::size_t t = 0; t < density.size(); ++t) {
    const auto l = density.index(t);
    integrate_box(
        [&](std::span<const double> y, std::span<double> out) {
          double weight = 1.0;
          for (std::size_t k = 0; k < m; ++k) {
            x[k] = (static_cast<double>(l[k]) + y[k]) * inv_scale[k];
            weight *= phi(y[k]);
          }
          stage.eval(u, eta, x, out);
          for (double& o : out) o *= weight;
        },
        lo, hi, box_cuts, integral, quadrature);
    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += density.weight(t) * integral[c];
  }
  require_finite(acc, "wavelet stage '" + stage.name + "'");
  return acc;
}

}  // namespace crisk
