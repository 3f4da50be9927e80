#pragma once

#include <cmath>
#include <vector>

#include "cube.hpp"
#include "measure.hpp"

namespace osc {

struct KResult {
  double value = 1.0;          // K_{Q,R}
  int steps = 0;               // N_{Q,R}
  std::vector<double> terms;   // μ(2^k Q) / l(2^k Q)^n for k = 1..N
};

/// First k ≥ 0 with l(2^k q) ≥ l(r).
inline int k_steps(const Cube& q, const Cube& r) {
  int k = 0;
  double side = q.side;
  while (side < r.side) {
    side *= 2.0;
    ++k;
  }
  return k;
}

/// K_{Q,R} = 1 + Σ_{k=1}^{N_{Q,R}} μ(2^k Q) / l(2^k Q)^n for Q ⊂ R.
/// The expansion factor is the literal 2, independent of α.
inline KResult k_coefficient(const GridMeasure& m, const Cube& q, const Cube& r,
                             const DoublingConfig& cfg) {
  if (!contains(r, q)) throw InvalidPair("k_coefficient: Q is not contained in R");
  KResult out;
  out.steps = k_steps(q, r);
  out.terms.reserve(static_cast<std::size_t>(out.steps));
  double scale = 1.0;
  for (int k = 1; k <= out.steps; ++k) {
    scale *= 2.0;
    const Cube c = q.scaled(scale);
    const double t = measure_of_cube(m, c) / std::pow(c.side, cfg.n);
    out.terms.push_back(t);
    out.value += t;
  }
  return out;
}

}  // namespace osc
