#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cube.hpp"
#include "measure.hpp"

namespace osc {

/// Raised when the expansion search exhausts its step budget.
class SearchFailure : public Error {
 public:
  SearchFailure(const std::string& what, Cube last, int steps)
      : Error(what), last_(last), steps_(steps) {}
  const Cube& last() const { return last_; }
  int steps() const { return steps_; }

 private:
  Cube last_;
  int steps_;
};

/// Raised when the contraction search reaches the grid resolution without
/// finding a doubling cube. Such centers are excluded from families.
class InadmissibleCenter : public Error {
 public:
  InadmissibleCenter(const std::string& what, Cube last) : Error(what), last_(last) {}
  const Cube& last() const { return last_; }

 private:
  Cube last_;
};

/// The concentric chain {α^j · base : j ∈ ℤ}.
struct CubeChain {
  Cube base;
  double ratio = 2.0;

  Cube member(int j) const { return j == 0 ? base : base.scaled(std::pow(ratio, j)); }
};

inline void require_admissible_side(const GridMeasure& m, const Cube& q, const char* who) {
  if (q.side < m.min_side() * (1.0 - 1e-12))
    throw InvalidInput(std::string(who) + ": side below grid resolution");
}

/// μ(αQ) ≤ β μ(Q). Zero-mass cubes with zero-mass expansion count as doubling.
inline bool is_doubling(const GridMeasure& m, const Cube& q, const DoublingConfig& cfg) {
  require_admissible_side(m, q, "is_doubling");
  const double outer = measure_of_cube(m, q.scaled(cfg.alpha));
  const double inner = measure_of_cube(m, q);
  return outer <= cfg.beta * inner;
}

struct ChainHit {
  Cube cube;
  int exponent = 0;
};

inline constexpr int kDefaultExpansionSteps = 64;

/// Q̃: the first α^k q, k ∈ {0, 1, 2, ...}, that is (α,β)-doubling.
inline ChainHit smallest_doubling_expansion(const GridMeasure& m, const Cube& q,
                                            const DoublingConfig& cfg,
                                            int max_steps = kDefaultExpansionSteps) {
  require_admissible_side(m, q, "smallest_doubling_expansion");
  const CubeChain chain{q, cfg.alpha};
  Cube c = q;
  for (int k = 0; k <= max_steps; ++k) {
    c = chain.member(k);
    if (is_doubling(m, c, cfg)) return {c, k};
  }
  throw SearchFailure("smallest_doubling_expansion: no doubling cube within " +
                          std::to_string(max_steps) + " steps",
                      c, max_steps);
}

/// ⌊log_α(l(q) / l_min)⌋: contraction steps that stay at or above resolution.
inline int default_contraction_steps(const GridMeasure& m, const Cube& q, double alpha) {
  const double r = q.side / m.min_side();
  if (r < 1.0) return 0;
  return static_cast<int>(std::floor(std::log(r) / std::log(alpha) + 1e-9));
}

/// Q′: the first α^{-N} q, N ∈ {1, 2, ...}, that is (α,β)-doubling.
/// max_steps < 0 selects the resolution floor default.
inline ChainHit biggest_doubling_contraction(const GridMeasure& m, const Cube& q,
                                             const DoublingConfig& cfg, int max_steps = -1) {
  if (max_steps < 0) max_steps = default_contraction_steps(m, q, cfg.alpha);
  const CubeChain chain{q, cfg.alpha};
  const double lmin = m.min_side() * (1.0 - 1e-12);
  Cube last = q;
  for (int k = 1; k <= max_steps; ++k) {
    const Cube c = chain.member(-k);
    if (c.side < lmin) break;
    last = c;
    if (is_doubling(m, c, cfg)) return {c, -k};
  }
  throw InadmissibleCenter("biggest_doubling_contraction: resolution floor reached", last);
}

/// 𝒬 = {Q : l(Q) ≤ 1}.
inline bool in_Q(const Cube& q) { return q.side <= 1.0; }

/// 𝒬_ex = {Q : l(Q′) ≤ 1}. Propagates InadmissibleCenter.
inline bool in_Q_ex(const GridMeasure& m, const Cube& q, const DoublingConfig& cfg) {
  return in_Q(biggest_doubling_contraction(m, q, cfg).cube);
}

struct ChainEntry {
  int exponent = 0;
  double side = 0.0;
  double mass = 0.0;
  bool doubling = false;
};

struct ChainSegment {
  ChainHit prime;  // exponent is -N, N ≥ 1
  ChainHit tilde;  // exponent is m ≥ 0
  std::vector<ChainEntry> intermediates;  // exponents strictly between the two
  bool certified = false;                 // every intermediate is non-doubling
};

inline ChainEntry chain_entry(const GridMeasure& m, const CubeChain& chain, int j,
                              const DoublingConfig& cfg) {
  const Cube c = chain.member(j);
  return {j, c.side, measure_of_cube(m, c), is_doubling(m, c, cfg)};
}

/// Bracketing doubling cubes Q′ and Q̃ of q with the non-doubling members
/// in between.
inline ChainSegment chain_segment(const GridMeasure& m, const Cube& q, const DoublingConfig& cfg) {
  ChainSegment seg;
  seg.prime = biggest_doubling_contraction(m, q, cfg);
  seg.tilde = smallest_doubling_expansion(m, q, cfg);
  const CubeChain chain{q, cfg.alpha};
  seg.certified = true;
  for (int j = seg.prime.exponent + 1; j < seg.tilde.exponent; ++j) {
    seg.intermediates.push_back(chain_entry(m, chain, j, cfg));
    if (seg.intermediates.back().doubling) seg.certified = false;
  }
  return seg;
}

/// Rows (exponent, side, mass, doubling) for j in [j_lo, j_hi], skipping
/// members below resolution.
inline std::vector<ChainEntry> chain_report(const GridMeasure& m, const Cube& q,
                                            const DoublingConfig& cfg, int j_lo, int j_hi) {
  const CubeChain chain{q, cfg.alpha};
  std::vector<ChainEntry> rows;
  for (int j = j_lo; j <= j_hi; ++j) {
    if (chain.member(j).side < m.min_side() * (1.0 - 1e-12)) continue;
    rows.push_back(chain_entry(m, chain, j, cfg));
  }
  return rows;
}

/// Bound on the expansion exponent when μ(q) > 0:
/// ⌈ log(C₀ l(q)^n / μ(q)) / log(β / α^n) ⌉.
inline int expansion_step_bound(double c0, const Cube& q, double mass, const DoublingConfig& cfg) {
  const double arg = c0 * std::pow(q.side, cfg.n) / mass;
  const double base = cfg.beta / std::pow(cfg.alpha, cfg.n);
  if (arg <= 1.0) return 0;
  return static_cast<int>(std::ceil(std::log(arg) / std::log(base)));
}

}  // namespace osc
