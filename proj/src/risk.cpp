#include "crisk/risk.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <string>

#include "crisk/error.hpp"

namespace crisk {
namespace {

std::atomic<std::uint64_t> g_clip_count{0};

double root_of_nonnegative(double v, double power) {
  if (v < 0.0) {
    g_clip_count.fetch_add(1, std::memory_order_relaxed);
    v = 0.0;
  }
  return std::pow(v, 1.0 / power);
}

double orientation_sign(Orientation o) { return o == Orientation::Losses ? 1.0 : -1.0; }

double loss(double sign, ConstVec u, ConstVec x) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += u[k] * x[k];
  return sign * s;
}

double parse_value(std::string_view text, std::string_view token) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorKind::BadParameters, "cannot parse '" + std::string(text) + "' in risk token '" + std::string(token) + "'");
  }
  return v;
}

}  // namespace

void validate(const MeanSemiDeviation& spec) {
  if (!(spec.p >= 1.0) || !std::isfinite(spec.p)) fail(ErrorKind::BadParameters, "semideviation order p must be >= 1");
  if (!(spec.kappa >= 0.0 && spec.kappa <= 1.0)) fail(ErrorKind::BadParameters, "kappa must lie in [0, 1]");
}

void validate(const HigherOrderInverse& spec) {
  if (!(spec.q >= 1.0) || !std::isfinite(spec.q)) fail(ErrorKind::BadParameters, "order q must be >= 1");
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0) && spec.alpha != 1.0) {
    fail(ErrorKind::BadParameters, "alpha must lie in (0, 1]");
  }
  if (!(spec.kappa > 0.0 && spec.kappa <= 1.0)) fail(ErrorKind::BadParameters, "kappa must lie in (0, 1]");
}

RiskSpec parse_risk_token(std::string_view token) {
  const std::size_t colon = token.find(':');
  const std::string_view head = token.substr(0, colon);
  std::string_view rest = colon == std::string_view::npos ? std::string_view{} : token.substr(colon + 1);
  auto for_each_pair = [&](auto&& apply) {
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      const std::string_view pair = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const std::size_t eq = pair.find('=');
      if (eq == std::string_view::npos) fail(ErrorKind::BadParameters, "expected key=value in '" + std::string(pair) + "'");
      apply(pair.substr(0, eq), parse_value(pair.substr(eq + 1), token));
    }
  };
  if (head == "msd") {
    MeanSemiDeviation m;
    for_each_pair([&](std::string_view key, double v) {
      if (key == "p") m.p = v;
      else if (key == "kappa") m.kappa = v;
      else fail(ErrorKind::BadParameters, "unknown msd parameter '" + std::string(key) + "'");
    });
    validate(m);
    return RiskSpec{m, Orientation::Returns};
  }
  if (head == "hor") {
    HigherOrderInverse h;
    for_each_pair([&](std::string_view key, double v) {
      if (key == "q") h.q = v;
      else if (key == "alpha") h.alpha = v;
      else if (key == "kappa") h.kappa = v;
      else fail(ErrorKind::BadParameters, "unknown hor parameter '" + std::string(key) + "'");
    });
    validate(h);
    return RiskSpec{h, Orientation::Losses};
  }
  fail(ErrorKind::BadParameters, "unknown risk family '" + std::string(head) + "'");
}

CompositeChain mean_semideviation_chain(const RiskSpec& spec, std::size_t assets) {
  const auto* msd = std::get_if<MeanSemiDeviation>(&spec.family);
  if (!msd) fail(ErrorKind::BadParameters, "mean_semideviation_chain needs a MeanSemiDeviation spec");
  validate(*msd);
  if (assets == 0) fail(ErrorKind::BadParameters, "portfolio needs at least one asset");
  const double sign = orientation_sign(spec.orientation);
  const double p = msd->p;
  const double kappa = msd->kappa;

  Stage f1;
  f1.name = "msd_f1";
  f1.in_dim = 1;
  f1.flags.monotone_in_eta = true;
  f1.flags.convex_in_x = true;
  f1.eval = [=](ConstVec u, ConstVec eta, ConstVec x, std::span<double> out) {
    out[0] = loss(sign, u, x) + kappa * root_of_nonnegative(eta[0], p);
  };

  Stage f2;
  f2.name = "msd_f2";
  f2.in_dim = 1;
  f2.flags.convex_in_x = true;
  f2.eval = [=](ConstVec u, ConstVec eta, ConstVec x, std::span<double> out) {
    out[0] = std::pow(std::max(0.0, loss(sign, u, x) - eta[0]), p);
  };
  f2.truncated_power = [=](ConstVec u, ConstVec eta) {
    TruncatedPower tp{-eta[0], Vector(u.begin(), u.end()), p};
    for (double& s : tp.slope) s *= sign;
    return tp;
  };

  Stage f3;
  f3.name = "msd_f3";
  f3.flags.convex_in_x = true;
  f3.eval = [=](ConstVec u, ConstVec, ConstVec x, std::span<double> out) { out[0] = loss(sign, u, x); };

  return make_chain({f1, f2, f3}, assets, assets);
}

CompositeChain higher_order_risk_objective(const RiskSpec& spec) {
  const auto* hor = std::get_if<HigherOrderInverse>(&spec.family);
  if (!hor) fail(ErrorKind::BadParameters, "higher_order_risk_objective needs a HigherOrderInverse spec");
  validate(*hor);
  const double sign = orientation_sign(spec.orientation);
  const double q = hor->q;
  const double inv_alpha = 1.0 / hor->alpha;
  const double kappa = hor->kappa;

  if (kappa == 1.0) {
    Stage f1;
    f1.name = "hor_f1";
    f1.in_dim = 1;
    f1.flags.monotone_in_eta = true;
    f1.flags.convex_in_x = true;
    f1.flags.constant_in_x = true;
    f1.eval = [=](ConstVec u, ConstVec eta, ConstVec, std::span<double> out) {
      out[0] = u[0] + inv_alpha * root_of_nonnegative(eta[0], q);
    };
    Stage f2;
    f2.name = "hor_f2";
    f2.flags.convex_in_x = true;
    f2.eval = [=](ConstVec u, ConstVec, ConstVec x, std::span<double> out) {
      out[0] = std::pow(std::max(0.0, sign * x[0] - u[0]), q);
    };
    f2.truncated_power = [=](ConstVec u, ConstVec) { return TruncatedPower{-u[0], Vector{sign}, q}; };
    return make_chain({f1, f2}, 1, 1);
  }

  Stage f1;
  f1.name = "hor_f1_blend";
  f1.in_dim = 2;
  f1.flags.monotone_in_eta = true;
  f1.flags.convex_in_x = true;
  f1.flags.constant_in_x = true;
  f1.eval = [=](ConstVec u, ConstVec eta, ConstVec, std::span<double> out) {
    out[0] = (1.0 - kappa) * eta[0] + kappa * (u[0] + inv_alpha * root_of_nonnegative(eta[1], q));
  };
  Stage f2;
  f2.name = "hor_f2_blend";
  f2.out_dim = 2;
  f2.flags.convex_in_x = true;
  f2.eval = [=](ConstVec u, ConstVec, ConstVec x, std::span<double> out) {
    const double y = sign * x[0];
    out[0] = y;
    out[1] = std::pow(std::max(0.0, y - u[0]), q);
  };
  return make_chain({f1, f2}, 1, 1);
}

CompositeChain inverse_measure_portfolio_chain(const RiskSpec& spec, std::size_t assets) {
  const auto* hor = std::get_if<HigherOrderInverse>(&spec.family);
  if (!hor) fail(ErrorKind::BadParameters, "inverse_measure_portfolio_chain needs a HigherOrderInverse spec");
  validate(*hor);
  if (assets == 0) fail(ErrorKind::BadParameters, "portfolio needs at least one asset");
  const double sign = orientation_sign(spec.orientation);
  const double q = hor->q;
  const double inv_alpha = 1.0 / hor->alpha;
  const double kappa = hor->kappa;
  const std::size_t n = assets;

  Stage f1;
  f1.name = "inverse_f1";
  f1.in_dim = 2;
  f1.flags.monotone_in_eta = true;
  f1.flags.convex_in_x = true;
  f1.flags.constant_in_x = true;
  f1.eval = [=](ConstVec u, ConstVec eta, ConstVec, std::span<double> out) {
    out[0] = (1.0 - kappa) * eta[0] + kappa * (u[n] + inv_alpha * root_of_nonnegative(eta[1], q));
  };
  Stage f2;
  f2.name = "inverse_f2";
  f2.out_dim = 2;
  f2.flags.convex_in_x = true;
  f2.eval = [=](ConstVec u, ConstVec, ConstVec x, std::span<double> out) {
    const double y = loss(sign, u.first(n), x);
    out[0] = y;
    out[1] = std::pow(std::max(0.0, y - u[n]), q);
  };
  return make_chain({f1, f2}, n + 1, n);
}

std::uint64_t domain_clip_count() noexcept { return g_clip_count.load(std::memory_order_relaxed); }

HolderModulus higher_order_inner_modulus(double q, double reach) {
  if (q != 2.0) fail(ErrorKind::BadParameters, "inner modulus is tabulated for q = 2 only");
  return HolderModulus{{{2.0 * std::max(0.0, reach), 1.0}, {1.0, 2.0}}};
}

HolderModulus higher_order_outer_modulus(double q, double alpha) {
  return HolderModulus{{{1.0 / alpha, 1.0 / q}}};
}

}  // namespace crisk
