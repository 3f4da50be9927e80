#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "core.hpp"

namespace osc {

/// Closed axis-parallel cube, stored as center and side length.
struct Cube {
  Point center{};
  double side = 1.0;
  int dim = 1;

  Cube() = default;

  Cube(const Point& c, double s, int d) : center(c), side(s), dim(d) {
    if (d < 1 || d > kMaxDim)
      throw InvalidInput("cube dimension must be in 1.." + std::to_string(kMaxDim));
    if (!(std::isfinite(s) && s > 0.0))
      throw InvalidInput("cube side must be positive and finite");
    if (!all_finite(c, d)) throw InvalidInput("cube center must be finite");
    for (int i = d; i < kMaxDim; ++i) center[i] = 0.0;
  }

  double lo(int axis) const { return center[axis] - 0.5 * side; }
  double hi(int axis) const { return center[axis] + 0.5 * side; }

  // Concentric cube with side factor * side.
  Cube scaled(double factor) const { return Cube(center, side * factor, dim); }

  double volume() const { return std::pow(side, dim); }

  bool contains_point(const Point& p) const {
    for (int i = 0; i < dim; ++i)
      if (p[i] < lo(i) || p[i] > hi(i)) return false;
    return true;
  }

  friend bool operator==(const Cube& a, const Cube& b) {
    if (a.dim != b.dim || a.side != b.side) return false;
    for (int i = 0; i < a.dim; ++i)
      if (a.center[i] != b.center[i]) return false;
    return true;
  }
};

inline constexpr double kContainTol = 1e-12;

/// True iff `inner` lies inside `outer` on every axis, with slack
/// tol * side(outer).
inline bool inside(const Cube& inner, const Cube& outer, double tol = kContainTol) {
  const double slack = tol * outer.side;
  for (int i = 0; i < inner.dim; ++i) {
    if (inner.lo(i) < outer.lo(i) - slack) return false;
    if (inner.hi(i) > outer.hi(i) + slack) return false;
  }
  return true;
}

/// outer ⊇ inner.
inline bool contains(const Cube& outer, const Cube& inner, double tol = kContainTol) {
  return inside(inner, outer, tol);
}

// Relative comparison used when cubes are rebuilt from different chain bases.
inline bool same_cube(const Cube& a, const Cube& b, double rel = 1e-12) {
  if (a.dim != b.dim) return false;
  const double scale = std::max(a.side, b.side);
  if (std::abs(a.side - b.side) > rel * scale) return false;
  for (int i = 0; i < a.dim; ++i)
    if (std::abs(a.center[i] - b.center[i]) > rel * std::max(1.0, std::abs(a.center[i])))
      return false;
  return true;
}

}  // namespace osc
