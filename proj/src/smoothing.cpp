#include "crisk/smoothing.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "crisk/error.hpp"

namespace crisk {
namespace {

constexpr std::array<PolyPiece, 1> kUniformPieces = {PolyPiece{-1.0, 1.0, {0.5, 0.0, 0.0}}};
constexpr std::array<PolyPiece, 1> kEpanechnikovPieces = {PolyPiece{-1.0, 1.0, {0.75, 0.0, -0.75}}};

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double std_normal_upper(double s) { return 0.5 * std::erfc(s / std::numbers::sqrt2); }

double gaussian_truncated_moment(double t, int p) {
  if (p == 0) return std_normal_upper(-t);
  if (t >= 0.0) {
    const double cdf = std_normal_upper(-t);
    const double pdf = std_normal_pdf(t);
    if (p == 1) return t * cdf + pdf;
    return (1.0 + t * t) * cdf + t * pdf;
  }
  const double s = -t;
  const double tail = std_normal_upper(s);
  const double pdf = std_normal_pdf(s);
  if (p == 1) return std::max(0.0, pdf - s * tail);
  return std::max(0.0, (1.0 + s * s) * tail - s * pdf);
}

bool is_small_integer(double p, int max_power) {
  return p >= 1.0 && p <= max_power && std::floor(p) == p;
}

std::vector<double> kink_breakpoints(const Kernel& kernel) {
  std::vector<double> cuts;
  for (const PolyPiece& piece : kernel.pieces()) {
    cuts.push_back(piece.lo);
    cuts.push_back(piece.hi);
  }
  return cuts;
}

}  // namespace

std::string_view to_string(KernelFamily family) noexcept {
  switch (family) {
    case KernelFamily::Uniform: return "uniform";
    case KernelFamily::Epanechnikov: return "epanechnikov";
    case KernelFamily::Gaussian: return "gaussian";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(std::string_view name) {
  if (name == "uniform") return KernelFamily::Uniform;
  if (name == "epanechnikov") return KernelFamily::Epanechnikov;
  if (name == "gaussian") return KernelFamily::Gaussian;
  fail(ErrorKind::BackendUnavailable, "unknown kernel '" + std::string(name) + "'");
}

std::optional<double> Kernel::support_radius() const noexcept {
  if (family_ == KernelFamily::Gaussian) return std::nullopt;
  return 1.0;
}

double Kernel::density(double z) const noexcept {
  switch (family_) {
    case KernelFamily::Uniform: return std::abs(z) <= 1.0 ? 0.5 : 0.0;
    case KernelFamily::Epanechnikov: return std::abs(z) <= 1.0 ? 0.75 * (1.0 - z * z) : 0.0;
    case KernelFamily::Gaussian: return std_normal_pdf(z);
  }
  return 0.0;
}

double Kernel::density(std::span<const double> z) const noexcept {
  double v = 1.0;
  for (double c : z) v *= density(c);
  return v;
}

std::span<const PolyPiece> Kernel::pieces() const noexcept {
  switch (family_) {
    case KernelFamily::Uniform: return kUniformPieces;
    case KernelFamily::Epanechnikov: return kEpanechnikovPieces;
    case KernelFamily::Gaussian: return {};
  }
  return {};
}

double kernel_moment(const Kernel& kernel, double alpha, std::size_t dim) {
  if (!(alpha > 0.0)) fail(ErrorKind::BadParameters, "moment order must be positive");
  if (alpha > kernel.order()) {
    fail(ErrorKind::OrderExceeded, "moment order " + std::to_string(alpha) + " exceeds kernel order " +
                                       std::to_string(kernel.order()));
  }
  if (dim == 0) fail(ErrorKind::BadParameters, "dimension must be positive");
  if (dim == 1) {
    switch (kernel.family()) {
      case KernelFamily::Uniform: return 1.0 / (alpha + 1.0);
      case KernelFamily::Epanechnikov: return 1.5 * (1.0 / (alpha + 1.0) - 1.0 / (alpha + 3.0));
      case KernelFamily::Gaussian:
        return std::pow(2.0, alpha / 2.0) * std::tgamma((alpha + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
    }
  }
  const double radius = kernel.support_radius().value_or(8.0);
  std::vector<double> lo(dim, -radius), hi(dim, radius);
  std::vector<std::vector<double>> cuts(dim, std::vector<double>{0.0});
  double result = 0.0;
  integrate_box(
      [&](std::span<const double> y, std::span<double> out) {
        double norm2 = 0.0;
        for (double c : y) norm2 += c * c;
        out[0] = std::pow(norm2, alpha / 2.0) * kernel.density(y);
      },
      lo, hi, cuts, std::span<double>(&result, 1), QuadratureOptions{1e-12, 1e-10, 10'000'000});
  return result;
}

double kernel_truncated_moment(const Kernel& kernel, double t, int p) {
  if (p < 0) fail(ErrorKind::BadParameters, "truncated moment power must be non-negative");
  if (kernel.family() == KernelFamily::Gaussian) {
    if (p <= 2) return gaussian_truncated_moment(t, p);
    return integrate([&](double z) { return std::pow(std::max(0.0, t + z), p) * std_normal_pdf(z); }, -8.0, 8.0,
                     QuadratureOptions{}, std::array<double, 1>{-t});
  }
  return truncated_moment(kernel.pieces(), t, p);
}

double bandwidth_rule(const Sample& sample, std::size_t coord) {
  if (sample.size() < 2) fail(ErrorKind::BadParameters, "bandwidth rule needs at least two observations");
  const double sigma = sample.stddev(coord);
  if (!(sigma > 0.0)) fail(ErrorKind::DegenerateSample, "sample standard deviation is zero");
  return 1.06 * sigma * std::pow(static_cast<double>(sample.size()), -0.2);
}

ResolvedSmoothing resolve(const SmoothingPlan& plan, const Sample& sample) {
  ResolvedSmoothing r{plan.kernel, {}, plan.integration, plan.quadrature, plan.gaussian_truncation};
  if (plan.bandwidth) {
    if (!(*plan.bandwidth > 0.0) || !std::isfinite(*plan.bandwidth)) {
      fail(ErrorKind::BadParameters, "bandwidth must be positive and finite");
    }
    r.bandwidths.assign(sample.dim(), *plan.bandwidth);
  } else {
    for (std::size_t c = 0; c < sample.dim(); ++c) r.bandwidths.push_back(bandwidth_rule(sample, c));
  }
  return r;
}

namespace {

// Closed form for truncated-power stages. Returns false when the case is not covered.
bool analytic_smoothed(const Stage& stage, const Sample& sample, const ResolvedSmoothing& sm, ConstVec u,
                       ConstVec eta, double& result) {
  if (sm.integration != IntegrationMode::Auto || !stage.truncated_power || stage.out_dim != 1) return false;
  const TruncatedPower tp = stage.truncated_power(u, eta);
  const std::size_t m = sample.dim();
  if (tp.slope.size() != m) fail(ErrorKind::DimensionMismatch, "truncated-power slope does not match data dimension");
  const bool gaussian = sm.kernel.family() == KernelFamily::Gaussian;
  if (!is_small_integer(tp.power, gaussian ? 2 : 4)) return false;
  const int p = static_cast<int>(tp.power);

  double width2 = 0.0;
  std::size_t nonzero = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double w = tp.slope[k] * sm.bandwidths[k];
    width2 += w * w;
    if (tp.slope[k] != 0.0) ++nonzero;
  }
  // A sum of independent compact-kernel variables is not in the table.
  if (!gaussian && nonzero > 1) return false;
  const double width = std::sqrt(width2);

  double acc = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double d = tp.offset;
    for (std::size_t k = 0; k < m; ++k) d += tp.slope[k] * sample.at(i, k);
    if (width == 0.0) {
      acc += std::pow(std::max(0.0, d), p);
    } else {
      acc += std::pow(width, p) * kernel_truncated_moment(sm.kernel, d / width, p);
    }
  }
  result = acc / static_cast<double>(sample.size());
  return true;
}

}  // namespace

Vector smoothed_expectation(const Stage& stage, const Sample& sample, const ResolvedSmoothing& sm, ConstVec u,
                            ConstVec eta) {
  if (eta.size() != stage.in_dim) fail(ErrorKind::DimensionMismatch, "eta dimension does not match stage");
  if (sm.bandwidths.size() != sample.dim()) fail(ErrorKind::DimensionMismatch, "bandwidths do not match data");
  for (double h : sm.bandwidths) {
    if (!(h > 0.0)) fail(ErrorKind::BadParameters, "bandwidth must be positive");
  }
  if (stage.flags.constant_in_x) return empirical_expectation(stage, sample, u, eta);

  double closed = 0.0;
  if (analytic_smoothed(stage, sample, sm, u, eta, closed)) {
    require_finite(std::span<const double>(&closed, 1), "smoothed stage '" + stage.name + "'");
    return Vector{closed};
  }

  const std::size_t m = sample.dim();
  const std::size_t out_dim = stage.out_dim;
  const double radius = sm.kernel.support_radius().value_or(sm.gaussian_truncation);
  const double mass =
      sm.kernel.support_radius() ? 1.0 : std::pow(std::erf(radius / std::numbers::sqrt2), static_cast<double>(m));
  std::vector<std::vector<double>> cuts(m, kink_breakpoints(sm.kernel));

  TruncatedPower tp;
  const bool has_kink = static_cast<bool>(stage.truncated_power);
  if (has_kink) tp = stage.truncated_power(u, eta);

  Vector acc(out_dim, 0.0), integral(out_dim, 0.0), x(m, 0.0);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const ConstVec xi = sample.row(i);
    if (m == 1) {
      std::vector<double> local_cuts = cuts[0];
      if (has_kink && tp.slope[0] != 0.0) {
        local_cuts.push_back(-(tp.offset + tp.slope[0] * xi[0]) / (tp.slope[0] * sm.bandwidths[0]));
      }
      integrate(
          [&](double z, std::span<double> out) {
            x[0] = xi[0] + sm.bandwidths[0] * z;
            stage.eval(u, eta, x, out);
            const double k = sm.kernel.density(z);
            for (double& o : out) o *= k;
          },
          -radius, radius, integral, sm.quadrature, local_cuts);
    } else {
      std::vector<double> lo(m, -radius), hi(m, radius);
      integrate_box(
          [&](std::span<const double> z, std::span<double> out) {
            for (std::size_t k = 0; k < m; ++k) x[k] = xi[k] + sm.bandwidths[k] * z[k];
            stage.eval(u, eta, x, out);
            const double k = sm.kernel.density(z);
            for (double& o : out) o *= k;
          },
          lo, hi, cuts, integral, sm.quadrature);
    }
    for (std::size_t c = 0; c < out_dim; ++c) acc[c] += integral[c] / mass;
  }
  for (double& a : acc) a /= static_cast<double>(sample.size());
  require_finite(acc, "smoothed stage '" + stage.name + "'");
  return acc;
}

Vector smoothed_expectation(const Stage& stage, const Sample& sample, const SmoothingPlan& plan, ConstVec u,
                            ConstVec eta) {
  return smoothed_expectation(stage, sample, resolve(plan, sample), u, eta);
}

double kernel_density(const Sample& sample, const Kernel& kernel, double bandwidth, double x) {
  if (sample.dim() != 1) fail(ErrorKind::DimensionMismatch, "kernel_density expects a 1-D sample");
  if (!(bandwidth > 0.0)) fail(ErrorKind::BadParameters, "bandwidth must be positive");
  double acc = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) acc += kernel.density((x - sample.at(i, 0)) / bandwidth);
  return acc / (static_cast<double>(sample.size()) * bandwidth);
}

double HolderModulus::operator()(double t) const {
  double v = 0.0;
  for (const Term& term : terms) v += term.coef * std::pow(t, term.exponent);
  return v;
}

double smoothed_modulus(const HolderModulus& w, const Kernel& kernel, double bandwidth, std::size_t dim) {
  double v = 0.0;
  for (const HolderModulus::Term& term : w.terms) {
    const double moment = term.exponent == 0.0 ? 1.0 : kernel_moment(kernel, term.exponent, dim);
    v += term.coef * std::pow(bandwidth, term.exponent) * moment;
  }
  return v;
}

}  // namespace crisk
