#pragma once

// Test-side helpers. Nothing here calls into the library's evaluation code, so the
// oracles below are independent transcriptions of the estimators they check.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "crisk/core.hpp"

namespace testing_support {

using crisk::ConstVec;
using crisk::Vector;

inline crisk::Stage scalar_stage(std::function<double(double)> f, bool convex = false) {
  crisk::Stage s;
  s.flags.convex_in_x = convex;
  s.eval = [f](ConstVec, ConstVec, ConstVec x, std::span<double> out) { out[0] = f(x[0]); };
  return s;
}

/// max(0, x - u)^p with the truncated-power registration (enables closed forms).
inline crisk::Stage hinge_stage(double u, double p, bool registered = true) {
  crisk::Stage s;
  s.flags.convex_in_x = true;
  s.eval = [u, p](ConstVec, ConstVec, ConstVec x, std::span<double> out) { out[0] = std::pow(std::max(0.0, x[0] - u), p); };
  if (registered) {
    s.truncated_power = [u, p](ConstVec, ConstVec) { return crisk::TruncatedPower{-u, Vector{1.0}, p}; };
  }
  return s;
}

/// Composite Simpson on [a, b] with n (even) panels and optional forced nodes at kinks.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double simpson_pieces(const std::function<double(double)>& f, std::vector<double> nodes, int n = 2000) {
  std::sort(nodes.begin(), nodes.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (nodes[i + 1] > nodes[i]) total += simpson(f, nodes[i], nodes[i + 1], n);
  }
  return total;
}

/// A randomly drawn chain described by plain coefficient tables.
struct RandomChain {
  std::size_t n = 1;  // decision dim
  std::size_t m = 1;  // data dim
  std::vector<std::size_t> out_dims;  // per stage, outermost first
  std::vector<std::size_t> in_dims;
  // Stage j row r: value = 0.5 * (a . eta + b . (x * u_cycle) + c)^2 + sin(d . x)
  struct Row {
    Vector a, b, d;
    double c = 0.0;
  };
  std::vector<std::vector<Row>> rows;

  Vector stage_value(std::size_t j, ConstVec u, ConstVec eta, ConstVec x) const {
    Vector out(out_dims[j]);
    for (std::size_t r = 0; r < out_dims[j]; ++r) {
      const Row& row = rows[j][r];
      double lin = row.c;
      for (std::size_t s = 0; s < eta.size(); ++s) lin += row.a[s] * eta[s];
      for (std::size_t k = 0; k < x.size(); ++k) lin += row.b[k] * x[k] * u[k % n];
      double trig = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) trig += row.d[k] * x[k];
      out[r] = 0.5 * lin * lin + std::sin(trig);
    }
    return out;
  }
};

inline RandomChain draw_chain(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> levels(2, 4), dims(1, 3);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  RandomChain c;
  c.n = static_cast<std::size_t>(dims(rng));
  c.m = static_cast<std::size_t>(dims(rng));
  const std::size_t L = static_cast<std::size_t>(levels(rng));
  c.out_dims.resize(L);
  c.in_dims.resize(L);
  c.out_dims[0] = 1;
  for (std::size_t j = 1; j < L; ++j) c.out_dims[j] = static_cast<std::size_t>(dims(rng));
  for (std::size_t j = 0; j + 1 < L; ++j) c.in_dims[j] = c.out_dims[j + 1];
  c.in_dims[L - 1] = 0;
  c.rows.resize(L);
  for (std::size_t j = 0; j < L; ++j) {
    for (std::size_t r = 0; r < c.out_dims[j]; ++r) {
      RandomChain::Row row;
      for (std::size_t s = 0; s < c.in_dims[j]; ++s) row.a.push_back(0.5 * coef(rng));
      for (std::size_t k = 0; k < c.m; ++k) row.b.push_back(coef(rng));
      for (std::size_t k = 0; k < c.m; ++k) row.d.push_back(coef(rng));
      row.c = coef(rng);
      c.rows[j].push_back(row);
    }
  }
  return c;
}

inline crisk::CompositeChain to_chain(const RandomChain& rc) {
  std::vector<crisk::Stage> stages;
  for (std::size_t j = 0; j < rc.out_dims.size(); ++j) {
    crisk::Stage s;
    s.out_dim = rc.out_dims[j];
    s.in_dim = rc.in_dims[j];
    s.eval = [&rc, j](ConstVec u, ConstVec eta, ConstVec x, std::span<double> out) {
      const Vector v = rc.stage_value(j, u, eta, x);
      std::copy(v.begin(), v.end(), out.begin());
    };
    stages.push_back(std::move(s));
  }
  return crisk::make_chain(std::move(stages), rc.n, rc.m);
}

/// (1/N) sum_i f_1(u, (1/N) sum_i f_2(u, ..., X_i), X_i), written out level by level.
inline double straight_line_composite(const RandomChain& rc, const std::vector<Vector>& data, ConstVec u) {
  const std::size_t L = rc.out_dims.size();
  const double N = static_cast<double>(data.size());
  Vector eta;
  for (std::size_t j = L; j-- > 0;) {
    Vector acc(rc.out_dims[j], 0.0);
    for (const Vector& x : data) {
      const Vector v = rc.stage_value(j, u, eta, x);
      for (std::size_t r = 0; r < acc.size(); ++r) acc[r] += v[r];
    }
    for (double& a : acc) a /= N;
    eta = acc;
  }
  return eta[0];
}

inline std::vector<double> normal_draws(std::size_t n, double mean, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(mean, sd);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace testing_support
