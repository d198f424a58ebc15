#pragma once

#include <array>
#include <span>

namespace crisk {

/// Polynomial c0 + c1*y + c2*y^2 on [lo, hi].
struct PolyPiece {
  double lo;
  double hi;
  std::array<double, 3> coef;
};

/// E[(t + Y)_+^p] for Y with the piecewise-polynomial density `pieces` and integer p >= 0.
/// Each piece is re-expanded about its effective lower limit so nothing is formed as a
/// difference of antiderivatives.
double truncated_moment(std::span<const PolyPiece> pieces, double t, int p);

/// Density value of the piecewise polynomial at y (0 outside every piece).
double piecewise_value(std::span<const PolyPiece> pieces, double y);

}  // namespace crisk
