#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "geometry.hpp"
#include "kcoeff.hpp"
#include "measure.hpp"

namespace osc {

/// Sampling controls for a cube family.
///
/// Centers sit on a jittered sub-grid of `center_lo..center_hi` (the measure
/// box when unset). Sides run over the ladder base_side · α^j for
/// ladder_lo ≤ j ≤ ladder_hi.
struct FamilyParams {
  int centers_per_axis = 64;
  double jitter = 0.5;  // fraction of the sub-grid spacing
  std::optional<Point> center_lo;
  std::optional<Point> center_hi;
  double base_side = 0.75;
  int ladder_lo = -4;
  int ladder_hi = 3;
  int chain_span = 3;          // concentric pairs (q, α^s q), 1 ≤ s ≤ chain_span
  int offcenter_per_cube = 1;  // off-center sub-cubes per ladder cube
  std::uint64_t seed = 1;

  std::string canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "centers=" << centers_per_axis << ";jitter=" << jitter << ";base=" << base_side
       << ";ladder=" << ladder_lo << ".." << ladder_hi << ";chain=" << chain_span
       << ";offcenter=" << offcenter_per_cube;
    if (center_lo && center_hi)
      os << ";region=" << (*center_lo)[0] << "," << (*center_lo)[1] << "," << (*center_lo)[2] << ":"
         << (*center_hi)[0] << "," << (*center_hi)[1] << "," << (*center_hi)[2];
    return os.str();
  }
};

/// One admissible cube of a family with everything the estimators need that
/// does not depend on f.
struct FamilyCube {
  Cube cube;
  double mass = 0.0;      // μ(Q)
  double eta_mass = 0.0;  // μ(ηQ)
  bool doubling = false;
  std::size_t tilde = 0;  // index of Q̃ in the family
  int tilde_exponent = 0;
  double prime_side = 0.0;  // l(Q′)
  bool in_q = false;
  bool in_q_ex = false;
};

enum class PairKind { doubling, nested };

struct CubePair {
  std::size_t inner = 0;
  std::size_t outer = 0;
  PairKind kind = PairKind::nested;
  bool inner_in_q = false;
  bool outer_in_q_ex = false;
  double k = 1.0;  // K_{Q,R}
  int k_steps = 0;
};

struct CubeFamily {
  std::vector<FamilyCube> cubes;
  std::vector<std::size_t> small_cubes;     // l ≤ 1
  std::vector<std::size_t> boundary_cubes;  // 𝒬_ex \ 𝒬
  std::vector<std::size_t> large_cubes;     // l > 1
  std::vector<CubePair> doubling_pairs;     // both cubes (α,β)-doubling
  std::vector<CubePair> nested_pairs;       // arbitrary nested pairs
  std::vector<Point> centers;               // sampled base centers
  std::uint64_t seed = 0;
  std::size_t excluded_count = 0;   // inadmissible cubes (contraction failed)
  std::size_t candidate_count = 0;  // distinct cubes the sampler tried to admit
  std::uint64_t measure_hash = 0;
  DoublingConfig cfg;
  std::string fingerprint;

  double excluded_rate() const {
    return candidate_count == 0 ? 0.0 : static_cast<double>(excluded_count) / candidate_count;
  }
};

inline std::uint64_t measure_hash(const GridMeasure& m) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  const int d = m.dim();
  mix(&d, sizeof d);
  mix(m.box_lo().data(), sizeof(double) * kMaxDim);
  mix(m.box_hi().data(), sizeof(double) * kMaxDim);
  mix(m.cells().data(), sizeof(int) * kMaxDim);
  mix(m.density().data(), sizeof(double) * m.density().size());
  return h;
}

inline std::string family_fingerprint(const FamilyParams& p, const DoublingConfig& cfg,
                                      std::uint64_t mhash) {
  std::ostringstream os;
  os.precision(17);
  os << p.canonical() << ";alpha=" << cfg.alpha << ";beta=" << cfg.beta << ";eta=" << cfg.eta
     << ";n=" << cfg.n << ";measure=" << mhash;
  std::ostringstream out;
  out << "seed=" << p.seed << ";params=" << std::hex << fnv1a(os.str());
  return out.str();
}

namespace detail {

using CubeKey = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t>;

inline std::uint64_t bits(double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof u);
  return u;
}

inline CubeKey cube_key(const Cube& c) {
  return {bits(c.center[0]), bits(c.center[1]), bits(c.center[2]), bits(c.side)};
}

class FamilyBuilder {
 public:
  FamilyBuilder(const GridMeasure& m, const DoublingConfig& cfg, CubeFamily& fam)
      : m_(m), cfg_(cfg), fam_(fam) {}

  // Admits q (and its Q̃). Returns nullopt when q or Q̃ is inadmissible.
  std::optional<std::size_t> admit(const Cube& q) {
    const auto key = cube_key(q);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    if (auto it = rejected_.find(key); it != rejected_.end()) return std::nullopt;
    ++fam_.candidate_count;

    FamilyCube rec;
    rec.cube = q;
    try {
      rec.prime_side = biggest_doubling_contraction(m_, q, cfg_).cube.side;
    } catch (const InadmissibleCenter&) {
      return reject(key);
    }
    rec.mass = measure_of_cube(m_, q);
    rec.eta_mass = measure_of_cube(m_, q.scaled(cfg_.eta));
    rec.doubling = is_doubling(m_, q, cfg_);
    rec.in_q = in_Q(q);
    rec.in_q_ex = rec.prime_side <= 1.0;

    const ChainHit tilde = smallest_doubling_expansion(m_, q, cfg_);
    rec.tilde_exponent = tilde.exponent;
    if (tilde.exponent == 0) {
      const std::size_t self = fam_.cubes.size();
      rec.tilde = self;
      fam_.cubes.push_back(rec);
      index_.emplace(key, self);
      return self;
    }
    const auto t = admit(tilde.cube);
    if (!t) return reject(key);
    rec.tilde = *t;
    const std::size_t self = fam_.cubes.size();
    fam_.cubes.push_back(rec);
    index_.emplace(key, self);
    return self;
  }

  void add_pair(std::size_t inner, std::size_t outer, PairKind kind) {
    if (inner == outer) return;
    const FamilyCube& q = fam_.cubes[inner];
    const FamilyCube& r = fam_.cubes[outer];
    if (!contains(r.cube, q.cube)) return;
    if (kind == PairKind::doubling && !(q.doubling && r.doubling)) return;
    if (!pairs_.emplace(inner, outer, kind).second) return;
    const KResult k = k_coefficient(m_, q.cube, r.cube, cfg_);
    CubePair p{inner, outer, kind, q.in_q, r.in_q_ex, k.value, k.steps};
    (kind == PairKind::doubling ? fam_.doubling_pairs : fam_.nested_pairs).push_back(p);
  }

 private:
  std::nullopt_t reject(const CubeKey& key) {
    rejected_.insert(key);
    ++fam_.excluded_count;
    return std::nullopt;
  }

  const GridMeasure& m_;
  const DoublingConfig& cfg_;
  CubeFamily& fam_;
  std::map<CubeKey, std::size_t> index_;
  std::set<CubeKey> rejected_;
  std::set<std::tuple<std::size_t, std::size_t, PairKind>> pairs_;
};

}  // namespace detail

inline void validate_family_params(const GridMeasure& m, const DoublingConfig& cfg,
                                   const FamilyParams& p) {
  if (p.centers_per_axis < 1) throw InvalidInput("family: centers_per_axis must be positive");
  if (p.ladder_lo > p.ladder_hi) throw InvalidInput("family: empty side ladder");
  if (!(p.base_side > 0.0) || !std::isfinite(p.base_side))
    throw InvalidInput("family: base_side must be positive");
  if (!(p.jitter >= 0.0 && p.jitter <= 1.0)) throw InvalidInput("family: jitter must lie in [0,1]");
  if (p.chain_span < 0 || p.offcenter_per_cube < 0)
    throw InvalidInput("family: chain_span and offcenter_per_cube must be nonnegative");
  double span = 0.0;
  for (int i = 0; i < m.dim(); ++i) span = std::max(span, m.box_hi()[i] - m.box_lo()[i]);
  const double smallest = p.base_side * std::pow(cfg.alpha, p.ladder_lo);
  const double largest = p.base_side * std::pow(cfg.alpha, p.ladder_hi);
  if (smallest < m.min_side() * (1.0 - 1e-12))
    throw InvalidInput("family: smallest ladder side is below the grid resolution");
  if (largest > span * (1.0 + 1e-12)) throw InvalidInput("family: largest ladder side exceeds the box");
  // Every cube the sampler can produce lives on the lattice base_side · α^k.
  for (int k = p.ladder_lo - 64; k <= p.ladder_hi + 64; ++k)
    if (std::abs(p.base_side * std::pow(cfg.alpha, k) - 1.0) < 1e-9)
      throw InvalidInput("family: side lattice passes within 1e-9 of the unit threshold");
  if (p.center_lo.has_value() != p.center_hi.has_value())
    throw InvalidInput("family: center region needs both corners");
  if (p.center_lo)
    for (int i = 0; i < m.dim(); ++i)
      if (!((*p.center_lo)[i] <= (*p.center_hi)[i])) throw InvalidInput("family: empty center region");
}

/// Jittered sub-grid centers, row-major, one RNG draw per coordinate.
inline std::vector<Point> family_centers(const GridMeasure& m, const FamilyParams& p, Rng& rng) {
  const int d = m.dim();
  const Point lo = p.center_lo.value_or(m.box_lo());
  const Point hi = p.center_hi.value_or(m.box_hi());
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(p.centers_per_axis);
  std::vector<Point> out;
  out.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    std::array<int, kMaxDim> idx{0, 0, 0};
    for (int i = d - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rest % static_cast<std::size_t>(p.centers_per_axis));
      rest /= static_cast<std::size_t>(p.centers_per_axis);
    }
    Point c{0.0, 0.0, 0.0};
    for (int i = 0; i < d; ++i) {
      const double step = (hi[i] - lo[i]) / p.centers_per_axis;
      const double u = rng.uniform() - 0.5;
      c[i] = lo[i] + (idx[i] + 0.5) * step + p.jitter * u * step;
    }
    out.push_back(c);
  }
  return out;
}

/// Deterministic (given the seed) cube family shared by every estimator.
///
/// For each center c and ladder side l the cube q = Q(c, l) is admitted with
/// its Q̃. Pairs come from
///   - the chain of q: nested (q, α^s q) and doubling (Q̃(q), Q̃(α^s q));
///   - off-center sub-cubes s ⊂ q of side l/α or l/α²: nested (s, q) and
///     doubling (S̃, Q̃(q)) when containment survives the Q̃ map.
/// Cubes whose contraction search hits the resolution floor are excluded and
/// counted in excluded_count.
inline CubeFamily sample_family(const GridMeasure& m, const DoublingConfig& cfg,
                                const FamilyParams& p) {
  cfg.validate();
  if (cfg.d != m.dim()) throw InvalidInput("family: config dimension differs from measure");
  validate_family_params(m, cfg, p);

  CubeFamily fam;
  fam.seed = p.seed;
  fam.cfg = cfg;
  fam.measure_hash = measure_hash(m);
  fam.fingerprint = family_fingerprint(p, cfg, fam.measure_hash);

  Rng rng(p.seed);
  fam.centers = family_centers(m, p, rng);
  detail::FamilyBuilder builder(m, fam.cfg, fam);
  const int d = m.dim();
  const double lmin = m.min_side() * (1.0 - 1e-12);

  for (const Point& c : fam.centers) {
    for (int j = p.ladder_lo; j <= p.ladder_hi; ++j) {
      const Cube q(c, p.base_side * std::pow(cfg.alpha, j), d);
      const auto iq = builder.admit(q);

      // Draws happen unconditionally so the stream does not depend on admission.
      struct Sub {
        Cube cube;
        bool ok;
      };
      std::vector<Sub> subs;
      for (int o = 0; o < p.offcenter_per_cube; ++o) {
        const int shrink = 1 + static_cast<int>(rng.below(2));
        const double side = q.side / std::pow(cfg.alpha, shrink);
        Point sc = c;
        for (int a = 0; a < d; ++a) sc[a] += (rng.uniform() - 0.5) * (q.side - side);
        // Below α·l_min no contraction step exists, so such cubes are never candidates.
        subs.push_back({Cube(sc, side, d), side >= cfg.alpha * lmin});
      }
      if (!iq) continue;

      const CubeChain chain{q, cfg.alpha};
      for (int s = 1; s <= p.chain_span; ++s) {
        const auto ir = builder.admit(chain.member(s));
        if (!ir) continue;
        builder.add_pair(*iq, *ir, PairKind::nested);
        builder.add_pair(fam.cubes[*iq].tilde, fam.cubes[*ir].tilde, PairKind::doubling);
      }
      for (const Sub& sub : subs) {
        if (!sub.ok) continue;
        const auto is = builder.admit(sub.cube);
        if (!is) continue;
        builder.add_pair(*is, *iq, PairKind::nested);
        builder.add_pair(fam.cubes[*is].tilde, fam.cubes[*iq].tilde, PairKind::doubling);
      }
    }
  }

  for (std::size_t i = 0; i < fam.cubes.size(); ++i) {
    const FamilyCube& r = fam.cubes[i];
    if (r.in_q) {
      fam.small_cubes.push_back(i);
    } else {
      fam.large_cubes.push_back(i);
      if (r.in_q_ex) fam.boundary_cubes.push_back(i);
    }
  }
  return fam;
}

}  // namespace osc
