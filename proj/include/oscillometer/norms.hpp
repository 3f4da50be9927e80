#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "family.hpp"
#include "function.hpp"

namespace osc {

/// Where a condition supremum was attained.
struct Witness {
  enum class Kind { none, cube, doubling_pair, nested_pair, unit_cube };
  Kind kind = Kind::none;
  std::size_t index = 0;
};

struct ConditionSup {
  std::string name;
  double value = 0.0;
  Witness argmax;
};

/// One definition's estimate: the max of its condition suprema.
struct NormEntry {
  std::string definition;
  // "lower-bound": supremum over a finite family.
  // "witness-evaluation": one admissible {f_Q}, evaluated over the family.
  std::string semantics = "lower-bound";
  double estimate = 0.0;
  std::vector<ConditionSup> conditions;
};

/// Per-cube quantities that depend on f.
struct CubeStats {
  double mean = 0.0;       // m_Q f (0 when μ(Q) = 0)
  double dev_tilde = 0.0;  // ∫_Q |f - m_Q̃ f| dμ
  double dev_self = 0.0;   // ∫_Q |f - m_Q f| dμ
  double abs_int = 0.0;    // ∫_Q |f| dμ
};

/// f bound to a family: the stats every estimator reads.
struct FamilyEvaluation {
  const GridMeasure* measure = nullptr;
  const CubeFamily* family = nullptr;
  const GridFunction* function = nullptr;
  std::vector<CubeStats> stats;

  double mean_tilde(std::size_t i) const { return stats[family->cubes[i].tilde].mean; }
};

inline void check_family(const GridMeasure& m, const CubeFamily& fam, const DoublingConfig& cfg) {
  if (fam.measure_hash != measure_hash(m))
    throw InvalidUse("family was sampled on a different measure");
  if (fam.cfg.alpha != cfg.alpha || fam.cfg.beta != cfg.beta || fam.cfg.eta != cfg.eta ||
      fam.cfg.n != cfg.n || fam.cfg.d != cfg.d)
    throw InvalidUse("family was sampled with a different doubling config");
}

inline FamilyEvaluation evaluate_family(const GridMeasure& m, const GridFunction& f,
                                        const CubeFamily& fam, unsigned threads = 1) {
  if (f.size() != m.cell_count()) throw InvalidInput("function does not match the measure grid");
  FamilyEvaluation ev{&m, &fam, &f, std::vector<CubeStats>(fam.cubes.size())};
  parallel_for(fam.cubes.size(), threads, [&](std::size_t i) {
    const FamilyCube& r = fam.cubes[i];
    if (!(r.mass > 0.0)) return;
    ev.stats[i].mean = accumulate_mean(m, f, r.cube).mean();
  });
  const auto rho = m.density();
  parallel_for(fam.cubes.size(), threads, [&](std::size_t i) {
    const FamilyCube& r = fam.cubes[i];
    if (!(r.mass > 0.0)) return;
    const double ct = ev.stats[r.tilde].mean;
    const double cs = ev.stats[i].mean;
    double dt = 0.0, ds = 0.0, da = 0.0;
    m.for_each_overlap(r.cube, [&](std::size_t c, double v) {
      const double w = rho[c] * v;
      dt += std::abs(f[c] - ct) * w;
      ds += std::abs(f[c] - cs) * w;
      da += std::abs(f[c]) * w;
    });
    ev.stats[i] = {cs, dt, ds, da};
  });
  return ev;
}

namespace detail {

struct SupTracker {
  ConditionSup sup;

  explicit SupTracker(std::string name) { sup.name = std::move(name); }

  void offer(double v, Witness::Kind kind, std::size_t index) {
    if (v > sup.value) {
      sup.value = v;
      sup.argmax = {kind, index};
    }
  }
};

inline NormEntry finish(std::string name, std::vector<SupTracker> ts,
                        std::string semantics = "lower-bound") {
  NormEntry e;
  e.definition = std::move(name);
  e.semantics = std::move(semantics);
  for (auto& t : ts) {
    e.estimate = std::max(e.estimate, t.sup.value);
    e.conditions.push_back(std::move(t.sup));
  }
  return e;
}

inline bool pair_has_mass(const CubeFamily& fam, const CubePair& p) {
  return fam.cubes[p.inner].mass > 0.0 && fam.cubes[p.outer].mass > 0.0;
}

// (1/μ(ηQ)) ∫_Q |f - m_Q̃ f| dμ over the listed cubes.
inline SupTracker tilde_oscillation(const FamilyEvaluation& ev, const std::vector<std::size_t>& ids,
                                    std::string name) {
  SupTracker t(std::move(name));
  for (std::size_t i : ids) {
    const FamilyCube& r = ev.family->cubes[i];
    if (r.eta_mass > 0.0) t.offer(ev.stats[i].dev_tilde / r.eta_mass, Witness::Kind::cube, i);
  }
  return t;
}

// (1/μ(ηQ)) ∫_Q |f| dμ over the listed cubes.
inline SupTracker eta_average(const FamilyEvaluation& ev, const std::vector<std::size_t>& ids,
                              std::string name) {
  SupTracker t(std::move(name));
  for (std::size_t i : ids) {
    const FamilyCube& r = ev.family->cubes[i];
    if (r.eta_mass > 0.0) t.offer(ev.stats[i].abs_int / r.eta_mass, Witness::Kind::cube, i);
  }
  return t;
}

// |m_Q f - m_R f| / K_{Q,R} over doubling pairs passing the filter.
template <class Filter>
SupTracker mean_jump(const FamilyEvaluation& ev, Filter keep, std::string name) {
  SupTracker t(std::move(name));
  const auto& pairs = ev.family->doubling_pairs;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const CubePair& p = pairs[i];
    if (!keep(p) || !pair_has_mass(*ev.family, p)) continue;
    t.offer(std::abs(ev.stats[p.inner].mean - ev.stats[p.outer].mean) / p.k,
            Witness::Kind::doubling_pair, i);
  }
  return t;
}

inline bool local_pair(const CubePair& p) { return p.inner_in_q && p.outer_in_q_ex; }

// Visits every pair of both lists with its witness kind.
template <class Fn>
void for_each_pair(const CubeFamily& fam, Fn fn) {
  for (std::size_t i = 0; i < fam.doubling_pairs.size(); ++i)
    fn(fam.doubling_pairs[i], Witness::Kind::doubling_pair, i);
  for (std::size_t i = 0; i < fam.nested_pairs.size(); ++i)
    fn(fam.nested_pairs[i], Witness::Kind::nested_pair, i);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Estimators over a precomputed evaluation
// ---------------------------------------------------------------------------

/// rbmo¹_𝒬: oscillation about m_Q̃ f on 𝒬, K-controlled jumps for doubling
/// Q ⊂ R with Q ∈ 𝒬 and R ∈ 𝒬_ex, η-averages of |f| on 𝒬_ex \ 𝒬.
inline NormEntry rbmo1_norm(const FamilyEvaluation& ev) {
  const CubeFamily& fam = *ev.family;
  return detail::finish("rbmo1", {detail::tilde_oscillation(ev, fam.small_cubes, "oscillation"),
                                  detail::mean_jump(ev, detail::local_pair, "mean_jump"),
                                  detail::eta_average(ev, fam.boundary_cubes, "boundary_average")});
}

/// rbmo(μ): as rbmo¹ but jumps over all doubling pairs with l(Q) ≤ 1 and
/// averages over every cube with l(Q) > 1.
inline NormEntry rbmo_yang_norm(const FamilyEvaluation& ev) {
  const CubeFamily& fam = *ev.family;
  return detail::finish(
      "rbmo_yang",
      {detail::tilde_oscillation(ev, fam.small_cubes, "oscillation"),
       detail::mean_jump(ev, [](const CubePair& p) { return p.inner_in_q; }, "mean_jump"),
       detail::eta_average(ev, fam.large_cubes, "large_average")});
}

/// RBMO(μ): oscillation about m_Q̃ f on every cube and K-controlled jumps on
/// every doubling pair. No absolute-average condition.
inline NormEntry rbmo_global_norm(const FamilyEvaluation& ev) {
  const CubeFamily& fam = *ev.family;
  std::vector<std::size_t> all(fam.cubes.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return detail::finish("RBMO", {detail::tilde_oscillation(ev, all, "oscillation"),
                                 detail::mean_jump(ev, [](const CubePair&) { return true; },
                                                   "mean_jump")});
}

/// Witness numbers f_Q = m_Q̃ f when Q̃ ∈ 𝒬, else 0.
inline std::vector<double> rbmo2_witness(const FamilyEvaluation& ev) {
  const CubeFamily& fam = *ev.family;
  std::vector<double> w(fam.cubes.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const FamilyCube& t = fam.cubes[fam.cubes[i].tilde];
    if (t.in_q && t.mass > 0.0) w[i] = ev.stats[fam.cubes[i].tilde].mean;
  }
  return w;
}

struct Rbmo2Result {
  NormEntry entry;
  std::vector<double> witness;  // indexed like family.cubes
};

/// rbmo²_𝒬 evaluated at the witness of rbmo2_witness.
inline Rbmo2Result rbmo2_norm(const FamilyEvaluation& ev) {
  const CubeFamily& fam = *ev.family;
  auto w = rbmo2_witness(ev);

  detail::SupTracker osc("oscillation");
  for (std::size_t i : fam.small_cubes) {
    const FamilyCube& r = fam.cubes[i];
    if (!(r.eta_mass > 0.0)) continue;
    const bool centered = fam.cubes[r.tilde].in_q && fam.cubes[r.tilde].mass > 0.0;
    const double dev = centered ? ev.stats[i].dev_tilde : ev.stats[i].abs_int;
    osc.offer(dev / r.eta_mass, Witness::Kind::cube, i);
  }
  detail::SupTracker jump("witness_jump");
  detail::for_each_pair(fam, [&](const CubePair& p, Witness::Kind kind, std::size_t i) {
    if (!detail::local_pair(p) || !detail::pair_has_mass(fam, p)) return;
    jump.offer(std::abs(w[p.inner] - w[p.outer]) / p.k, kind, i);
  });
  detail::SupTracker bound("boundary_witness");
  for (std::size_t i : fam.boundary_cubes) bound.offer(std::abs(w[i]), Witness::Kind::cube, i);

  return {detail::finish("rbmo2", {std::move(osc), std::move(jump), std::move(bound)},
                         "witness-evaluation"),
          std::move(w)};
}

/// rbmo³_𝒬: oscillation about m_Q f, jumps over all nested local pairs
/// scaled by K·[μ(ηQ)/μ(Q) + μ(ηR)/μ(R)], η-averages on 𝒬_ex \ 𝒬.
inline NormEntry rbmo3_norm(const FamilyEvaluation& ev) {
  const CubeFamily& fam = *ev.family;
  detail::SupTracker osc("oscillation");
  for (std::size_t i : fam.small_cubes) {
    const FamilyCube& r = fam.cubes[i];
    if (r.eta_mass > 0.0) osc.offer(ev.stats[i].dev_self / r.eta_mass, Witness::Kind::cube, i);
  }
  detail::SupTracker jump("scaled_mean_jump");
  detail::for_each_pair(fam, [&](const CubePair& p, Witness::Kind kind, std::size_t i) {
    if (!detail::local_pair(p) || !detail::pair_has_mass(fam, p)) return;
    const FamilyCube& q = fam.cubes[p.inner];
    const FamilyCube& r = fam.cubes[p.outer];
    const double scale = p.k * (q.eta_mass / q.mass + r.eta_mass / r.mass);
    jump.offer(std::abs(ev.stats[p.inner].mean - ev.stats[p.outer].mean) / scale, kind, i);
  });
  return detail::finish("rbmo3", {std::move(osc), std::move(jump),
                                  detail::eta_average(ev, fam.boundary_cubes, "boundary_average")});
}

/// rbmo⁴_𝒬: the rbmo³ shapes restricted to doubling cubes, normalized by μ(Q).
inline NormEntry rbmo4_norm(const FamilyEvaluation& ev) {
  const CubeFamily& fam = *ev.family;
  detail::SupTracker osc("doubling_oscillation");
  for (std::size_t i : fam.small_cubes) {
    const FamilyCube& r = fam.cubes[i];
    if (r.doubling && r.mass > 0.0) osc.offer(ev.stats[i].dev_self / r.mass, Witness::Kind::cube, i);
  }
  detail::SupTracker avg("doubling_boundary_average");
  for (std::size_t i : fam.boundary_cubes) {
    const FamilyCube& r = fam.cubes[i];
    if (r.doubling && r.mass > 0.0) avg.offer(ev.stats[i].abs_int / r.mass, Witness::Kind::cube, i);
  }
  return detail::finish("rbmo4", {std::move(osc), detail::mean_jump(ev, detail::local_pair, "mean_jump"),
                                  std::move(avg)});
}

// ---------------------------------------------------------------------------
// Classical Lebesgue bmo with a configurable large-cube cutoff
// ---------------------------------------------------------------------------

struct BmoCutoff {
  enum class Mode { all_large, unit_only, range };
  Mode mode = Mode::all_large;
  double k = 2.0;  // upper side bound for Mode::range

  static BmoCutoff all_large() { return {Mode::all_large, 0.0}; }
  static BmoCutoff unit_only() { return {Mode::unit_only, 0.0}; }
  static BmoCutoff range(double k) { return {Mode::range, k}; }
};

/// Oscillation about the mean on cubes with l < 1 plus averages of |f| on
/// the cutoff-selected large cubes. Unit cubes for the unit-only and range
/// modes are centered at the family's base centers.
inline NormEntry bmo_classical_norm(const FamilyEvaluation& ev, BmoCutoff cutoff) {
  const GridMeasure& m = *ev.measure;
  const CubeFamily& fam = *ev.family;
  if (!m.is_uniform()) throw InvalidUse("bmo_classical_norm needs the uniform (Lebesgue) measure");
  if (cutoff.mode == BmoCutoff::Mode::range && !(cutoff.k > 1.0))
    throw InvalidInput("bmo_classical_norm: range cutoff needs k > 1");

  detail::SupTracker osc("oscillation");
  detail::SupTracker avg("large_average");
  for (std::size_t i = 0; i < fam.cubes.size(); ++i) {
    const FamilyCube& r = fam.cubes[i];
    if (!(r.mass > 0.0)) continue;
    const double l = r.cube.side;
    if (l < 1.0) {
      osc.offer(ev.stats[i].dev_self / r.mass, Witness::Kind::cube, i);
    } else {
      const bool take = cutoff.mode == BmoCutoff::Mode::all_large ||
                        (cutoff.mode == BmoCutoff::Mode::range && l <= cutoff.k);
      if (take) avg.offer(ev.stats[i].abs_int / r.mass, Witness::Kind::cube, i);
    }
  }
  if (cutoff.mode != BmoCutoff::Mode::all_large) {
    // The family ladder avoids l = 1, so unit cubes are built here. Their
    // witness index is the base-center index.
    const GridFunction& f = *ev.function;
    const auto rho = m.density();
    for (std::size_t c = 0; c < fam.centers.size(); ++c) {
      const Cube u(fam.centers[c], 1.0, m.dim());
      double mass = 0.0, a = 0.0;
      m.for_each_overlap(u, [&](std::size_t k, double v) {
        mass += rho[k] * v;
        a += std::abs(f[k]) * rho[k] * v;
      });
      if (mass > 0.0) avg.offer(a / mass, Witness::Kind::unit_cube, c);
    }
  }
  return detail::finish(cutoff.mode == BmoCutoff::Mode::all_large   ? "bmo_classical"
                        : cutoff.mode == BmoCutoff::Mode::unit_only ? "bmo_classical_unit"
                                                                    : "bmo_classical_range",
                        {std::move(osc), std::move(avg)});
}

// ---------------------------------------------------------------------------
// Entry points taking (measure, function, family, config)
// ---------------------------------------------------------------------------

inline FamilyEvaluation checked_evaluation(const GridMeasure& m, const GridFunction& f,
                                           const CubeFamily& fam, const DoublingConfig& cfg) {
  check_family(m, fam, cfg);
  return evaluate_family(m, f, fam);
}

inline NormEntry rbmo1_norm(const GridMeasure& m, const GridFunction& f, const CubeFamily& fam,
                            const DoublingConfig& cfg) {
  return rbmo1_norm(checked_evaluation(m, f, fam, cfg));
}

inline NormEntry rbmo_yang_norm(const GridMeasure& m, const GridFunction& f, const CubeFamily& fam,
                                const DoublingConfig& cfg) {
  return rbmo_yang_norm(checked_evaluation(m, f, fam, cfg));
}

inline NormEntry rbmo_global_norm(const GridMeasure& m, const GridFunction& f,
                                  const CubeFamily& fam, const DoublingConfig& cfg) {
  return rbmo_global_norm(checked_evaluation(m, f, fam, cfg));
}

inline Rbmo2Result rbmo2_norm(const GridMeasure& m, const GridFunction& f, const CubeFamily& fam,
                              const DoublingConfig& cfg) {
  return rbmo2_norm(checked_evaluation(m, f, fam, cfg));
}

inline NormEntry rbmo3_norm(const GridMeasure& m, const GridFunction& f, const CubeFamily& fam,
                            const DoublingConfig& cfg) {
  return rbmo3_norm(checked_evaluation(m, f, fam, cfg));
}

inline NormEntry rbmo4_norm(const GridMeasure& m, const GridFunction& f, const CubeFamily& fam,
                            const DoublingConfig& cfg) {
  return rbmo4_norm(checked_evaluation(m, f, fam, cfg));
}

inline NormEntry bmo_classical_norm(const GridMeasure& m, const GridFunction& f,
                                    const CubeFamily& fam, BmoCutoff cutoff) {
  if (fam.measure_hash != measure_hash(m))
    throw InvalidUse("family was sampled on a different measure");
  return bmo_classical_norm(evaluate_family(m, f, fam), cutoff);
}

/// All estimators on one shared family.
struct NormReport {
  std::optional<NormEntry> bmo_classical;  // uniform measures only
  NormEntry rbmo_global;
  NormEntry rbmo_yang;
  NormEntry rbmo1;
  Rbmo2Result rbmo2;
  NormEntry rbmo3;
  NormEntry rbmo4;
  std::string fingerprint;
  std::uint64_t seed = 0;
  std::size_t excluded_count = 0;
  std::size_t cube_count = 0;
  std::size_t pair_count = 0;

  // Definitions in report order, bmo_classical last when present.
  std::vector<const NormEntry*> entries() const {
    std::vector<const NormEntry*> out{&rbmo_global, &rbmo_yang, &rbmo1, &rbmo2.entry, &rbmo3, &rbmo4};
    if (bmo_classical) out.push_back(&*bmo_classical);
    return out;
  }

  double estimate(const std::string& name) const {
    for (const NormEntry* e : entries())
      if (e->definition == name) return e->estimate;
    throw InvalidInput("no estimate named '" + name + "'");
  }
};

inline NormReport evaluate_norms(const GridMeasure& m, const GridFunction& f, const CubeFamily& fam,
                                 const DoublingConfig& cfg, unsigned threads = 1) {
  check_family(m, fam, cfg);
  const FamilyEvaluation ev = evaluate_family(m, f, fam, threads);
  NormReport r;
  r.rbmo_global = rbmo_global_norm(ev);
  r.rbmo_yang = rbmo_yang_norm(ev);
  r.rbmo1 = rbmo1_norm(ev);
  r.rbmo2 = rbmo2_norm(ev);
  r.rbmo3 = rbmo3_norm(ev);
  r.rbmo4 = rbmo4_norm(ev);
  if (m.is_uniform()) r.bmo_classical = bmo_classical_norm(ev, BmoCutoff::all_large());
  r.fingerprint = fam.fingerprint;
  r.seed = fam.seed;
  r.excluded_count = fam.excluded_count;
  r.cube_count = fam.cubes.size();
  r.pair_count = fam.doubling_pairs.size() + fam.nested_pairs.size();
  return r;
}

inline const std::vector<std::string>& equivalence_definitions() {
  static const std::vector<std::string> names{"rbmo1", "rbmo2", "rbmo3", "rbmo4", "rbmo_yang"};
  return names;
}

}  // namespace osc
