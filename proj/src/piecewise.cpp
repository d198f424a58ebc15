#include "crisk/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace crisk {
namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double truncated_moment(std::span<const PolyPiece> pieces, double t, int p) {
  double total = 0.0;
  for (const PolyPiece& piece : pieces) {
    const double lower = std::max(piece.lo, -t);
    if (lower >= piece.hi) continue;
    const double base = t + lower;  // >= 0
    const double width = piece.hi - lower;

    // Density re-expanded in v = y - lower.
    std::array<double, 3> shifted{};
    for (int m = 0; m < 3; ++m) {
      for (int k = m; k < 3; ++k) shifted[m] += piece.coef[k] * binomial(k, m) * std::pow(lower, k - m);
    }
    // (base + v)^p in powers of v.
    std::vector<double> power(p + 1);
    for (int r = 0; r <= p; ++r) power[r] = binomial(p, r) * std::pow(base, p - r);

    double piece_total = 0.0;
    for (int r = 0; r <= p; ++r) {
      for (int m = 0; m < 3; ++m) {
        const int n = r + m;
        piece_total += power[r] * shifted[m] * std::pow(width, n + 1) / (n + 1);
      }
    }
    total += piece_total;
  }
  return std::max(total, 0.0);
}

double piecewise_value(std::span<const PolyPiece> pieces, double y) {
  for (const PolyPiece& piece : pieces) {
    if (y >= piece.lo && y <= piece.hi) return piece.coef[0] + y * (piece.coef[1] + y * piece.coef[2]);
  }
  return 0.0;
}

}  // namespace crisk
