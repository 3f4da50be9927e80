#pragma once

// Worked examples whose expected values come from an independent oracle
// (cell sums, chain scans, greedy traces, brute-force family sweeps).
// Each check compares the library against the oracle at 1e-10 relative.

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"

#ifndef OSC_CONFIG_DIR
#define OSC_CONFIG_DIR "configs"
#endif

namespace derived {

using namespace osc;
inline constexpr double kRel = 1e-10;

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline Check compare(std::string name, double got, double want, double rel = kRel) {
  return {std::move(name), oracle::close(got, want, rel, 1e-14), "got " + num(got) + " want " + num(want)};
}

inline GridMeasure line_measure(const std::string& preset, double lo, double hi, int cells,
                                std::function<void(MeasureSpec&)> tweak = {}) {
  MeasureSpec s;
  s.preset = preset;
  s.dim = 1;
  s.box_lo = {lo, 0, 0};
  s.box_hi = {hi, 0, 0};
  s.cells = {cells, 1, 1};
  if (tweak) tweak(s);
  return build_measure(s);
}

inline GridMeasure exp_measure() { return line_measure("exponential", 0, 8, 512); }

// Spike of mass 1 in the cell containing 5.0, background 0.001 on [0,8].
inline GridMeasure spike_measure() {
  return line_measure("power-spike", 0, 8, 512, [](MeasureSpec& s) {
    s.background = 0.001;
    s.spike_mass = 1.0;
    s.center = Point{5.0 + 1.0 / 128, 0, 0};
  });
}

inline DoublingConfig cfg1(double alpha, double beta) {
  DoublingConfig c = DoublingConfig::defaults(1);
  c.alpha = alpha;
  c.beta = beta;
  c.eta = std::min(1.5, alpha);
  return c;
}

inline GridFunction split_step(const GridMeasure& m, double left, double right, double at = 4.0) {
  FunctionSpec s;
  s.kind = "step";
  s.threshold = at;
  s.left = left;
  s.right = right;
  return build_function(m, s);
}

// Uniform [0,8] family whose cubes and η-dilates all stay inside the box.
inline FamilyParams interior_params() {
  FamilyParams p;
  p.centers_per_axis = 16;
  p.center_lo = Point{3.5, 0, 0};
  p.center_hi = Point{4.5, 0, 0};
  p.ladder_hi = 1;
  p.chain_span = 1;
  return p;
}

inline std::vector<Check> measure_checks() {
  std::vector<Check> out;
  {
    const GridMeasure m = exp_measure();
    const Cube q({1, 0, 0}, 2, 1);
    out.push_back(compare("mass of cube(1,2) under exp(-x), h=1/64", measure_of_cube(m, q), oracle::mass(m, q), 1e-12));
  }
  {
    const GridMeasure m = line_measure("uniform", 0, 8, 512);
    std::vector<double> sides{0.25, 0.5, 1, 2};
    std::vector<Point> centers;
    for (double x = 2.0; x <= 6.0; x += 0.125) centers.push_back({x, 0, 0});
    const auto g = estimate_growth_constant(m, DoublingConfig::defaults(1), sides, centers);
    out.push_back(compare("growth constant of uniform density on interior cubes", g.c0, 1.0));
  }
  {
    MeasureSpec s;
    s.preset = "gaussian";
    s.box_lo = {-4, 0, 0};
    s.box_hi = {4, 0, 0};
    s.cells = {256, 1, 1};
    s.center = Point{0, 0, 0};
    const GridMeasure m = build_measure(s);
    const auto [sides, centers] = default_growth_sample(m);
    const double got = estimate_growth_constant(m, DoublingConfig::defaults(1), sides, centers).c0;
    // Exhaustive: every center on the cell-center/edge lattice, every side k·h.
    const double h = m.min_side();
    double best = 0.0;
    for (int i = 0; i <= 2 * 256; ++i) {
      const double x = -4.0 + i * h / 2;
      for (int k = 1; k <= 256; ++k) best = std::max(best, oracle::mass(m, Cube({x, 0, 0}, k * h, 1)) / (k * h));
    }
    out.push_back(compare("growth constant of gaussian density vs exhaustive sweep", got, best));
  }
  {
    const GridMeasure m = exp_measure();
    double want = 0.0;
    for (int i = 0; i < 512; ++i) want += std::exp(-(i + 0.5) / 64.0) / 64.0;
    out.push_back(compare("total mass of exponential preset", m.total_mass(), want));
  }
  return out;
}

inline std::vector<Check> geometry_checks() {
  std::vector<Check> out;
  {
    const bool got = contains(Cube({0, 0, 0}, 2, 1), Cube({0.6, 0, 0}, 1, 1));
    out.push_back({"[0.1,1.1] is not inside [-1,1]", !got, got ? "reported inside" : "ok"});
  }
  {
    const GridMeasure m = exp_measure();
    const DoublingConfig cfg = cfg1(2, 2.5);
    const Cube q({6, 0, 0}, 1, 1);
    const double ratio = oracle::mass(m, q.scaled(2)) / oracle::mass(m, q);
    const bool want = ratio <= 2.5;
    const bool got = is_doubling(m, q, cfg);
    out.push_back({"is_doubling cube(6,1) under exp(-x), beta=2.5 vs quadrature ratio", got == want,
                   "ratio " + num(ratio) + (got ? " doubling" : " not doubling")});
  }
  {
    const GridMeasure m = exp_measure();
    const DoublingConfig cfg = cfg1(2, 3);
    const Cube q({7, 0, 0}, 0.25, 1);
    const int got = smallest_doubling_expansion(m, q, cfg).exponent;
    const int want = oracle::expansion_exponent(m, q, cfg);
    out.push_back({"expansion exponent of cube(7,1/4), exp(-x), beta=3", got == want,
                   "got " + std::to_string(got) + " want " + std::to_string(want)});
  }
  {
    const GridMeasure m = spike_measure();
    const DoublingConfig cfg = cfg1(2, 5);
    bool ok = true;
    std::string detail;
    for (double side : {1.0, 2.0, 4.0, 3.0}) {
      const Cube q({4.6, 0, 0}, side, 1);
      const int want = oracle::contraction_exponent(m, q, cfg);
      const int got = -biggest_doubling_contraction(m, q, cfg).exponent;
      ok = ok && got == want;
      detail += "side " + num(side) + ": " + std::to_string(got) + "/" + std::to_string(want) + " ";
    }
    out.push_back({"contraction exponents off a single-cell spike", ok, detail});
  }
  {
    // α^{-1} q (side 2) is doubling, so Q′ has side 2 > 1.
    const GridMeasure m = exp_measure();
    const DoublingConfig cfg = cfg1(2, 3.5);
    const Cube q({6.5, 0, 0}, 4, 1);
    const int n = oracle::contraction_exponent(m, q, cfg);
    const double side = 4.0 * std::pow(2.0, -n);
    const bool want = n > 0 && side <= 1.0;
    const bool got = in_Q_ex(m, q, cfg);
    out.push_back({"in_Q_ex of cube(6.5,4) under exp(-x) vs chain scan", got == want && !got,
                   "oracle contraction side " + num(side)});
  }
  {
    const GridMeasure m = spike_measure();
    const DoublingConfig cfg = cfg1(2, 5);
    const Cube q({4.6, 0, 0}, 0.5, 1);
    const ChainSegment seg = chain_segment(m, q, cfg);
    const int lo = -oracle::contraction_exponent(m, q, cfg);
    const int hi = oracle::expansion_exponent(m, q, cfg);
    bool ok = seg.prime.exponent == lo && seg.tilde.exponent == hi && seg.certified &&
              static_cast<int>(seg.intermediates.size()) == std::max(0, hi - lo - 1);
    for (std::size_t i = 0; ok && i < seg.intermediates.size(); ++i) {
      const auto& e = seg.intermediates[i];
      const Cube c = q.scaled(std::pow(2.0, e.exponent));
      ok = e.exponent == lo + 1 + static_cast<int>(i) && !oracle::doubling(m, c, cfg) &&
           oracle::close(e.mass, oracle::mass(m, c));
    }
    ok = ok && !seg.intermediates.empty();
    out.push_back({"chain segment off the spike vs exhaustive scan", ok,
                   "prime " + std::to_string(seg.prime.exponent) + " tilde " + std::to_string(seg.tilde.exponent) +
                       " intermediates " + std::to_string(seg.intermediates.size())});
  }
  return out;
}

inline std::vector<Check> kcoeff_checks() {
  const GridMeasure m = line_measure("uniform", -64, 64, 1024);
  const DoublingConfig cfg = DoublingConfig::defaults(1);
  std::vector<Check> out;
  bool ok = true;
  std::string detail;
  for (int n = 0; n <= 5; ++n) {
    const Cube q({0.3, 0, 0}, 0.5, 1);
    const Cube r({0.3, 0, 0}, 0.5 * std::pow(2.0, n), 1);
    const KResult k = k_coefficient(m, q, r, cfg);
    const auto o = oracle::k_coefficient(m, q, r, 1.0);
    ok = ok && k.steps == n && oracle::close(k.value, 1.0 + n) && oracle::close(k.value, o.value);
    detail += num(k.value) + " ";
  }
  out.push_back({"K = 1 + N on uniform interior chains", ok, detail});
  return out;
}

inline std::vector<Check> covering_checks() {
  std::vector<Check> out;
  {
    CoverInstance inst;
    inst.dim = 1;
    inst.points = {{0, 0, 0}, {0.1, 0, 0}};
    inst.assigned = {Cube({0, 0, 0}, 10, 1), Cube({0.1, 0, 0}, 0.2, 1)};
    const CoverResult r = besicovitch_cover(inst);
    const bool ok = r.selected == std::vector<std::size_t>{0} && r.max_overlap == 1;
    out.push_back({"greedy trace on {0, 0.1}", ok, "selected " + std::to_string(r.selected.size())});
  }
  {
    const CoverInstance inst = random_cover_instance(1, 50, 0, 10, 0.1, 2, 2024);
    const CoverResult r = besicovitch_cover(inst);
    std::vector<std::pair<double, double>> iv;
    for (std::size_t i : r.selected) iv.emplace_back(inst.assigned[i].lo(0), inst.assigned[i].hi(0));
    const int depth = oracle::interval_stabbing_depth(iv);
    bool covered = true;
    for (const Point& x : inst.points) {
      bool hit = false;
      for (auto [a, b] : iv) hit = hit || (a <= x[0] && x[0] <= b);
      covered = covered && hit;
    }
    out.push_back({"50 random intervals: coverage and overlap vs interval stabbing",
                   covered && depth == r.max_overlap && depth <= 2,
                   "overlap " + std::to_string(r.max_overlap) + " stabbing " + std::to_string(depth)});
  }
  return out;
}

inline std::vector<Check> norms_checks() {
  std::vector<Check> out;
  {
    const GridMeasure m = line_measure("uniform", 0, 1, 64);
    FunctionSpec s;
    s.kind = "linear";
    const GridFunction f = build_function(m, s);
    const Cube q({0.5, 0, 0}, 1, 1);
    out.push_back(compare("mean of x on [0,1], h=1/64", mean(m, f, q), oracle::mean(m, f, q)));
    out.push_back(compare("mean of x on [0,1] equals the midpoint average", mean(m, f, q), 0.5));
  }
  {
    const GridMeasure m = line_measure("uniform", 0, 8, 512);
    const GridFunction f = split_step(m, 1, -1);
    const DoublingConfig cfg = DoublingConfig::defaults(1);
    const Cube q({3.7, 0, 0}, 1.3, 1);
    const double c = 0.25;
    const double want = oracle::abs_dev(m, f, q, c) / oracle::mass(m, q.scaled(1.5));
    out.push_back(compare("oscillation term of a step", oscillation_term(m, f, q, c, cfg), want));
  }
  {
    const GridMeasure m = line_measure("uniform", 0, 8, 512);
    const DoublingConfig cfg = DoublingConfig::defaults(1);
    const FamilyParams p;
    const CubeFamily fam = sample_family(m, cfg, p);
    const auto e = oracle::enumerate_family(m, cfg, p);
    std::set<std::pair<oracle::Key, oracle::Key>> got_d, got_n;
    for (const auto& q : fam.doubling_pairs) got_d.insert({oracle::key(fam.cubes[q.inner].cube), oracle::key(fam.cubes[q.outer].cube)});
    for (const auto& q : fam.nested_pairs) got_n.insert({oracle::key(fam.cubes[q.inner].cube), oracle::key(fam.cubes[q.outer].cube)});
    const bool ok = got_d == e.doubling_pairs && got_n == e.nested_pairs && fam.cubes.size() == e.cubes.size() &&
                    fam.excluded_count == e.excluded.size();
    out.push_back({"default family on uniform measure vs sampler re-enumeration", ok,
                   "pairs " + std::to_string(fam.doubling_pairs.size()) + "+" + std::to_string(fam.nested_pairs.size()) +
                       " oracle " + std::to_string(e.doubling_pairs.size()) + "+" + std::to_string(e.nested_pairs.size())});
  }
  {
    const GridMeasure m = line_measure("uniform", 0, 8, 512);
    const DoublingConfig cfg = DoublingConfig::defaults(1);
    FunctionSpec s;
    s.kind = "random-steps";
    s.pieces = 16;
    s.seed = 9;
    const GridFunction f = build_function(m, s);
    const CubeFamily fam = sample_family(m, cfg, FamilyParams{});
    const double all = bmo_classical_norm(m, f, fam, BmoCutoff::all_large()).estimate;
    const double range = bmo_classical_norm(m, f, fam, BmoCutoff::range(2)).estimate;
    const double r = all / range;
    out.push_back({"classical bmo: all-large vs range(1,2) within factor 4", r <= 4 && r >= 0.25, "ratio " + num(r)});
  }
  {
    const GridMeasure m = line_measure("uniform", 0, 8, 512);
    const DoublingConfig cfg = DoublingConfig::defaults(1);
    const CubeFamily fam = sample_family(m, cfg, interior_params());
    FunctionSpec cs;
    cs.value = -3.0;
    const GridFunction f = build_function(m, cs);
    out.push_back(compare("rbmo1 of constant -3 on interior family is 3/eta", rbmo1_norm(m, f, fam, cfg).estimate, 2.0));
    out.push_back(compare("rbmo_yang of constant -3 on interior family is 3/eta", rbmo_yang_norm(m, f, fam, cfg).estimate, 2.0));
  }
  {
    const GridMeasure m = line_measure("uniform", 0, 8, 512);
    const DoublingConfig cfg = DoublingConfig::defaults(1);
    const CubeFamily fam = sample_family(m, cfg, FamilyParams{});
    const GridFunction f = split_step(m, 1, -1);
    const auto o = oracle::sweep(m, f, fam, cfg);
    const NormReport r = evaluate_norms(m, f, fam, cfg);
    out.push_back(compare("rbmo1 of 1[0,4) - 1[4,8) vs brute-force sweep", r.rbmo1.estimate, o.rbmo1));
    const GridFunction g = split_step(m, 0.5 * 2.5, -0.5 * 2.5);
    const auto og = oracle::sweep(m, g, fam, cfg);
    out.push_back(compare("RBMO of c(1_left - 1/2) vs brute-force sweep", rbmo_global_norm(m, g, fam, cfg).estimate,
                          og.rbmo_global));
  }
  {
    const GridMeasure m = line_measure("uniform", 0, 8, 512);
    const DoublingConfig cfg = DoublingConfig::defaults(1);
    FunctionSpec s;
    s.kind = "random-steps";
    s.pieces = 24;
    s.seed = 4;
    const GridFunction f = build_function(m, s);
    const CubeFamily fam = sample_family(m, cfg, FamilyParams{});
    const NormReport r = evaluate_norms(m, f, fam, cfg);
    const double base = r.rbmo1.estimate;
    bool ok = base > 0;
    std::string detail;
    for (const char* d : {"rbmo2", "rbmo3", "rbmo4"}) {
      const double q = r.estimate(d) / base;
      ok = ok && q <= 100 && q >= 0.01;
      detail += std::string(d) + "/rbmo1=" + num(q) + " ";
    }
    out.push_back({"random step: rbmo2..4 within the ratio band of rbmo1", ok, detail});
    const double c = r.rbmo_global.estimate / r.rbmo_yang.estimate;
    out.push_back({"random step: RBMO / rbmo_yang within containment band", c <= 100, "ratio " + num(c)});
  }
  return out;
}

inline std::vector<Check> cli_checks() {
  std::vector<Check> out;
  namespace fs = std::filesystem;
  const fs::path dir = OSC_CONFIG_DIR;
  {
    // Bundled norms example vs brute-force sweep.
    const auto c = exp::Config::load(dir / "norms-step.json", std::nullopt, 1);
    const auto arts = exp::run("norms", c);
    const auto report = io::json::parse(arts.files[0].text);
    const auto nm = exp::load_single_measure(c);
    const GridFunction f = exp::load_function(c, exp::function_items(c)[0], nm.measure);
    const DoublingConfig cfg = exp::doubling_config(c, 1);
    const CubeFamily fam = sample_family(nm.measure, cfg, exp::family_params(c, 1));
    const auto o = oracle::sweep(nm.measure, f, fam, cfg);
    const auto& d = report["definitions"];
    const std::vector<std::pair<const char*, double>> want{{"rbmo1", o.rbmo1}, {"rbmo_yang", o.rbmo_yang},
                                                          {"RBMO", o.rbmo_global}, {"rbmo2", o.rbmo2},
                                                          {"rbmo3", o.rbmo3}, {"rbmo4", o.rbmo4},
                                                          {"bmo_classical", o.bmo}};
    bool ok = true;
    std::string detail;
    for (auto [name, v] : want) {
      const double got = d[name]["estimate"].get<double>();
      ok = ok && oracle::close(got, v, kRel, 1e-14);
      detail += std::string(name) + "=" + num(got) + "/" + num(v) + " ";
    }
    out.push_back({"bundled norms config vs brute-force sweep", ok, detail});
  }
  {
    const auto c = exp::Config::load(dir / "constants.json", std::nullopt, 1);
    const auto arts = exp::run("equivalence", c);
    const auto rep = io::json::parse(arts.files[0].text);
    bool ok = true;
    std::map<std::string, double> per_unit;
    for (const auto& row : rep["rows"]) {
      const auto& e = row["estimates"];
      ok = ok && e["RBMO"].get<double>() == 0.0;
      const double absc = std::abs(row["function"] == "c-2" ? 2.0 : row["function"] == "c-neg5" ? 5.0 : 0.5);
      for (const char* d : {"rbmo1", "rbmo2", "rbmo3", "rbmo4", "rbmo_yang"}) {
        const double u = e[d].get<double>() / absc;
        if (!per_unit.count(d)) per_unit[d] = u;
        ok = ok && oracle::close(per_unit[d], u, 1e-12);
      }
    }
    out.push_back({"constants batch: RBMO zero, rbmo columns proportional to |c|", ok,
                   "rbmo1 per unit " + num(per_unit["rbmo1"])});
  }
  {
    const auto c = exp::Config::load(dir / "eta-sweep.json", std::nullopt, 1);
    const auto rep = io::json::parse(exp::run("eta-sweep", c).files[0].text);
    const double spread = rep["spread"].get<double>();
    out.push_back({"eta sweep 1.5 vs 2.0: finite ratios within envelope",
                   std::isfinite(spread) && spread <= 10 && rep["flags"].get<int>() == 0, "spread " + num(spread)});
  }
  {
    const auto c = exp::Config::load(dir / "doubling-map-uniform.json", std::nullopt, 1);
    const auto rep = io::json::parse(exp::run("doubling-map", c).files[0].text);
    const auto nm = exp::load_single_measure(c);
    const DoublingConfig cfg = exp::doubling_config(c, nm.measure.dim());
    bool ok = rep["summary"]["interior"].get<int>() > 0 &&
              rep["summary"]["interior_doubling_fraction"].get<double>() == 1.0;
    for (const auto& row : rep["rows"])
      if (row["interior"].get<bool>()) {
        const Cube q = io::cube_from_json(row["cube"]);
        ok = ok && oracle::doubling(nm.measure, q, cfg) && row["doubling"].get<bool>();
      }
    out.push_back({"doubling map on uniform measure: every interior cube doubling", ok,
                   "interior " + std::to_string(rep["summary"]["interior"].get<int>())});
  }
  {
    const auto c = exp::Config::load(dir / "kcoeff.json", std::nullopt, 1);
    const auto rep = io::json::parse(exp::run("kcoeff", c).files[0].text);
    const auto nm = exp::load_single_measure(c);
    const DoublingConfig cfg = exp::doubling_config(c, nm.measure.dim());
    bool ok = !rep["rows"].empty();
    for (const auto& row : rep["rows"]) {
      const auto o = oracle::k_coefficient(nm.measure, io::cube_from_json(row["inner"]), io::cube_from_json(row["outer"]), cfg.n);
      ok = ok && oracle::close(row["k"]["value"].get<double>(), o.value) && row["k"]["steps"].get<int>() == o.steps;
    }
    out.push_back({"kcoeff on bundled nested pairs vs direct summation", ok, std::to_string(rep["rows"].size()) + " pairs"});
  }
  return out;
}

inline std::vector<Check> all_checks() {
  std::vector<Check> out;
  for (auto part : {measure_checks, geometry_checks, kcoeff_checks, covering_checks, norms_checks, cli_checks}) {
    auto v = part();
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

}  // namespace derived
