#pragma once

// Experiment drivers behind the CLI. Each run_* reads one JSON config,
// returns the report documents it produced, and never touches stdout.

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "io.hpp"

namespace osc {

/// Sampled family has more than half of its candidate cubes excluded.
class PathologicalMeasure : public Error {
 public:
  using Error::Error;
};

namespace exp {

using io::json;
namespace fs = std::filesystem;

inline constexpr double kDefaultNoiseFloor = 1e-9;
inline constexpr double kMaxExcludedRate = 0.5;

inline unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OSCILLOMETER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(std::min<long>(v, hw * 4L));
    throw ParseError("OSCILLOMETER_THREADS must be a positive integer");
  }
  return hw;
}

/// Shortest round-trip decimal form; identical across runs and thread counts.
inline std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct Artifact {
  std::string filename;
  std::string text;
};

struct Artifacts {
  std::vector<Artifact> files;
  std::string failure;  // non-empty when an exact invariant failed; files are still valid
};

inline Artifact json_artifact(std::string name, const json& j) { return {std::move(name), j.dump(2) + "\n"}; }

// --- config ----------------------------------------------------------------

struct Config {
  json doc;
  fs::path base_dir;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  static Config load(const fs::path& path, std::optional<std::uint64_t> seed_override,
                     unsigned threads) {
    Config c;
    c.doc = io::read_json_file(path);
    if (!c.doc.is_object()) throw ParseError("config must be a JSON object");
    c.base_dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    c.seed = seed_override ? *seed_override : io::get_or<std::uint64_t>(c.doc, "seed", 1);
    c.threads = threads;
    return c;
  }

  static Config from_json(json doc, fs::path base_dir, std::uint64_t seed, unsigned threads = 1) {
    Config c;
    c.doc = std::move(doc);
    c.base_dir = std::move(base_dir);
    c.seed = seed;
    c.threads = threads;
    return c;
  }

  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  }

  json section(const char* key) const {
    return doc.contains(key) && doc[key].is_object() ? doc[key] : json::object();
  }
};

struct NamedMeasure {
  std::string name;
  GridMeasure measure;
};

struct NamedFunction {
  std::string name;
  json source;  // spec object, or {"file": ...}
};

inline NamedMeasure load_measure_item(const Config& c, const json& item, std::size_t index) {
  if (item.is_string()) {
    const fs::path p = c.resolve(item.get<std::string>());
    return {p.stem().string(), io::measure_from_json(io::read_json_file(p))};
  }
  if (!item.is_object()) throw ParseError("measure entry must be an object or a file path");
  std::string name = io::get_or<std::string>(item, "name", "");
  if (item.contains("file")) {
    const fs::path p = c.resolve(item["file"].get<std::string>());
    if (name.empty()) name = p.stem().string();
    return {name, io::measure_from_json(io::read_json_file(p))};
  }
  if (name.empty())
    name = item.contains("preset") ? item["preset"].get<std::string>() : "measure" + std::to_string(index);
  return {name, io::measure_from_json(item)};
}

inline std::vector<NamedMeasure> load_measures(const Config& c) {
  std::vector<NamedMeasure> out;
  if (c.doc.contains("measures")) {
    const json& list = c.doc["measures"];
    if (!list.is_array()) throw ParseError("'measures' must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) out.push_back(load_measure_item(c, list[i], i));
  } else if (c.doc.contains("measure")) {
    out.push_back(load_measure_item(c, c.doc["measure"], 0));
  }
  if (out.empty()) throw ParseError("config names no measure");
  return out;
}

inline NamedMeasure load_single_measure(const Config& c) {
  auto all = load_measures(c);
  if (all.size() != 1) throw ParseError("this experiment takes exactly one measure");
  return std::move(all.front());
}

inline std::vector<NamedFunction> function_items(const Config& c) {
  std::vector<NamedFunction> out;
  auto add = [&](const json& item, std::size_t i) {
    if (item.is_string()) {
      const fs::path p = c.resolve(item.get<std::string>());
      out.push_back({p.stem().string(), json{{"file", item}}});
      return;
    }
    if (!item.is_object()) throw ParseError("function entry must be an object or a file path");
    std::string name = io::get_or<std::string>(item, "name", "");
    if (name.empty()) {
      if (item.contains("file"))
        name = fs::path(item["file"].get<std::string>()).stem().string();
      else
        name = io::get_or<std::string>(item, "kind", "f") + std::to_string(i);
    }
    out.push_back({name, item});
  };
  if (c.doc.contains("functions")) {
    const json& list = c.doc["functions"];
    if (!list.is_array()) throw ParseError("'functions' must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) add(list[i], i);
  } else if (c.doc.contains("function")) {
    add(c.doc["function"], 0);
  }
  if (out.empty()) throw ParseError("config names no function");
  return out;
}

inline GridFunction load_function(const Config& c, const NamedFunction& nf, const GridMeasure& m) {
  if (nf.source.contains("file")) {
    const json j = io::read_json_file(c.resolve(nf.source["file"].get<std::string>()));
    return build_function(m, io::function_spec_from_json(j, m.dim()));
  }
  return build_function(m, io::function_spec_from_json(nf.source, m.dim()));
}

inline DoublingConfig doubling_config(const Config& c, int dim) {
  DoublingConfig cfg = io::doubling_config_from_json(c.section("doubling"), dim);
  cfg.validate();
  return cfg;
}

inline FamilyParams family_params(const Config& c, int dim) {
  return io::family_params_from_json(c.section("family"), dim, c.seed);
}

/// Samples the family and enforces the excluded-rate ceiling.
inline CubeFamily checked_family(const GridMeasure& m, const DoublingConfig& cfg, const FamilyParams& p,
                                 const std::string& label) {
  CubeFamily fam = sample_family(m, cfg, p);
  if (fam.excluded_rate() > kMaxExcludedRate)
    throw PathologicalMeasure(label + ": " + std::to_string(fam.excluded_count) + " of " +
                              std::to_string(fam.candidate_count) +
                              " candidate cubes are inadmissible; measure too irregular for the grid");
  return fam;
}

// --- growth ----------------------------------------------------------------

inline Artifacts run_growth(const Config& c) {
  const NamedMeasure nm = load_single_measure(c);
  const GridMeasure& m = nm.measure;
  const DoublingConfig cfg = doubling_config(c, m.dim());
  const json g = c.section("growth");
  auto [sides, centers] = default_growth_sample(m, io::get_or<std::size_t>(g, "center_stride", 1));
  if (g.contains("sides")) sides = g["sides"].get<std::vector<double>>();

  const GrowthEstimate best = estimate_growth_constant(m, cfg, sides, centers);
  std::vector<GrowthEstimate> per_side(sides.size());
  parallel_for(sides.size(), c.threads, [&](std::size_t i) {
    per_side[i] = estimate_growth_constant(m, cfg, std::span<const double>(&sides[i], 1), centers);
  });

  json rows = json::array();
  std::string csv = "side,max_ratio,argmax_center\n";
  for (std::size_t i = 0; i < sides.size(); ++i) {
    rows.push_back({{"side", sides[i]}, {"max_ratio", per_side[i].c0}, {"argmax", io::to_json(per_side[i].argmax)}});
    std::string ctr;
    for (int a = 0; a < m.dim(); ++a) ctr += (a ? " " : "") + fmt(per_side[i].argmax.center[a]);
    csv += fmt(sides[i]) + "," + fmt(per_side[i].c0) + "," + ctr + "\n";
  }
  json out{{"seed", c.seed},  {"measure", nm.name},         {"n", cfg.n},
           {"c0", best.c0},   {"argmax", io::to_json(best.argmax)},
           {"center_count", centers.size()}, {"rows", rows}};
  return {{json_artifact("growth.json", out), {"growth.csv", csv}}, {}};
}

// --- doubling map ----------------------------------------------------------

inline Artifacts run_doubling_map(const Config& c) {
  const NamedMeasure nm = load_single_measure(c);
  const GridMeasure& m = nm.measure;
  const DoublingConfig cfg = doubling_config(c, m.dim());
  const json s = c.section("doubling_map");
  const int d = m.dim();
  const int per_axis = io::get_or(s, "centers_per_axis", d == 1 ? 64 : 16);
  if (per_axis < 1) throw InvalidInput("doubling_map.centers_per_axis must be positive");

  std::vector<double> sides;
  if (s.contains("sides")) {
    sides = s["sides"].get<std::vector<double>>();
  } else {
    const FamilyParams p = family_params(c, d);
    for (int j = p.ladder_lo; j <= p.ladder_hi; ++j) sides.push_back(p.base_side * std::pow(cfg.alpha, j));
  }
  for (double l : sides)
    if (!(l >= m.min_side() * (1.0 - 1e-12))) throw InvalidInput("doubling_map: side below grid resolution");

  // Regular lattice of centers: midpoints of a per_axis^d subdivision.
  std::vector<Point> centers;
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(per_axis);
  for (std::size_t k = 0; k < total; ++k) {
    Point x{0.0, 0.0, 0.0};
    std::size_t rem = k;
    for (int a = d - 1; a >= 0; --a) {
      const std::size_t i = rem % per_axis;
      rem /= per_axis;
      x[a] = m.box_lo()[a] + (m.box_hi()[a] - m.box_lo()[a]) * (static_cast<double>(i) + 0.5) / per_axis;
    }
    centers.push_back(x);
  }

  struct Row {
    Cube cube;
    double mass, expanded;
    bool doubling, interior;
  };
  std::vector<Row> rows(centers.size() * sides.size(), Row{Cube(centers[0], sides[0], d), 0, 0, false, false});
  parallel_for(rows.size(), c.threads, [&](std::size_t k) {
    const Cube q(centers[k / sides.size()], sides[k % sides.size()], d);
    const Cube big = q.scaled(cfg.alpha);
    bool interior = true;
    for (int a = 0; a < d; ++a) interior = interior && big.lo(a) >= m.box_lo()[a] && big.hi(a) <= m.box_hi()[a];
    const double mass = measure_of_cube(m, q);
    const double ex = measure_of_cube(m, big);
    rows[k] = {q, mass, ex, ex <= cfg.beta * mass, interior};
  });

  json jr = json::array();
  std::string csv = "center,side,mass,expanded_mass,doubling,interior\n";
  std::size_t interior = 0, interior_doubling = 0, doubling = 0;
  for (const Row& r : rows) {
    interior += r.interior;
    interior_doubling += r.interior && r.doubling;
    doubling += r.doubling;
    jr.push_back({{"cube", io::to_json(r.cube)}, {"mass", r.mass}, {"expanded_mass", r.expanded},
                  {"doubling", r.doubling}, {"interior", r.interior}});
    std::string ctr;
    for (int a = 0; a < d; ++a) ctr += (a ? " " : "") + fmt(r.cube.center[a]);
    csv += ctr + "," + fmt(r.cube.side) + "," + fmt(r.mass) + "," + fmt(r.expanded) + "," +
           (r.doubling ? "1" : "0") + "," + (r.interior ? "1" : "0") + "\n";
  }

  json chains = json::array();
  if (s.contains("chains")) {
    for (const json& ch : s["chains"]) {
      const Cube q = io::cube_from_json(ch.at("cube"));
      json entries = json::array();
      for (const ChainEntry& e : chain_report(m, q, cfg, ch.value("j_lo", -4), ch.value("j_hi", 4)))
        entries.push_back(io::to_json(e));
      chains.push_back({{"cube", io::to_json(q)}, {"entries", entries}});
    }
  }

  json out{{"seed", c.seed},
           {"measure", nm.name},
           {"config", io::to_json(cfg)},
           {"summary",
            {{"cubes", rows.size()},
             {"doubling", doubling},
             {"interior", interior},
             {"interior_doubling", interior_doubling},
             {"interior_doubling_fraction",
              interior == 0 ? 0.0 : static_cast<double>(interior_doubling) / interior}}},
           {"rows", jr},
           {"chains", chains}};
  return {{json_artifact("doubling-map.json", out), {"doubling-map.csv", csv}}, {}};
}

// --- K coefficients --------------------------------------------------------

inline Artifacts run_kcoeff(const Config& c) {
  const NamedMeasure nm = load_single_measure(c);
  const GridMeasure& m = nm.measure;
  const DoublingConfig cfg = doubling_config(c, m.dim());
  const json s = c.section("kcoeff");
  json pairs = s.contains("pairs_file") ? io::read_json_file(c.resolve(s["pairs_file"].get<std::string>()))
                                        : s.value("pairs", json::array());
  if (pairs.is_object() && pairs.contains("pairs")) pairs = pairs["pairs"];
  if (!pairs.is_array() || pairs.empty()) throw ParseError("kcoeff needs a non-empty pair list");

  std::vector<std::pair<Cube, Cube>> list;
  for (const json& p : pairs) list.emplace_back(io::cube_from_json(p.at("inner")), io::cube_from_json(p.at("outer")));
  std::vector<KResult> res(list.size());
  parallel_for(list.size(), c.threads, [&](std::size_t i) {
    res[i] = k_coefficient(m, list[i].first, list[i].second, cfg);
  });

  json rows = json::array();
  std::string csv = "index,inner_side,outer_side,value,steps\n";
  for (std::size_t i = 0; i < list.size(); ++i) {
    rows.push_back({{"inner", io::to_json(list[i].first)}, {"outer", io::to_json(list[i].second)},
                    {"k", io::to_json(res[i])}});
    csv += std::to_string(i) + "," + fmt(list[i].first.side) + "," + fmt(list[i].second.side) + "," +
           fmt(res[i].value) + "," + std::to_string(res[i].steps) + "\n";
  }
  json out{{"seed", c.seed}, {"measure", nm.name}, {"n", cfg.n}, {"rows", rows}};
  return {{json_artifact("kcoeff.json", out), {"kcoeff.csv", csv}}, {}};
}

// --- covering --------------------------------------------------------------

struct CoverRun {
  std::string name;
  CoverInstance instance;
  CoverResult result;
  bool covered = false;
};

inline bool covers_all(const CoverInstance& inst, const CoverResult& r) {
  for (const Point& x : inst.points) {
    bool hit = false;
    for (std::size_t i : r.selected) hit = hit || inst.assigned[i].contains_point(x);
    if (!hit) return false;
  }
  return true;
}

inline Artifacts run_cover(const Config& c) {
  const json s = c.section("cover");
  std::vector<CoverRun> runs;
  if (s.contains("instances"))
    for (std::size_t i = 0; i < s["instances"].size(); ++i)
      runs.push_back({"instance" + std::to_string(i), io::cover_instance_from_json(s["instances"][i]), {}, false});
  if (s.contains("instance_files"))
    for (const json& f : s["instance_files"]) {
      const fs::path p = c.resolve(f.get<std::string>());
      runs.push_back({p.stem().string(), io::cover_instance_from_json(io::read_json_file(p)), {}, false});
    }
  if (s.contains("random")) {
    const json& r = s["random"];
    const int dim = r.value("dimension", 1);
    if (dim < 1 || dim > kMaxDim) throw ParseError("cover.random.dimension must be 1, 2 or 3");
    const auto sizes = r.value("sizes", std::vector<std::size_t>{10, 100, 1000});
    const int seeds = r.value("seeds", 10);
    const double lo = r.value("lo", 0.0), hi = r.value("hi", 10.0);
    const double slo = r.value("side_lo", 0.1), shi = r.value("side_hi", 2.0);
    if (!(slo > 0.0 && shi >= slo)) throw InvalidInput("cover.random: need 0 < side_lo <= side_hi");
    for (std::size_t n : sizes)
      for (int k = 0; k < seeds; ++k)
        runs.push_back({"random-d" + std::to_string(dim) + "-n" + std::to_string(n) + "-s" + std::to_string(k),
                        random_cover_instance(dim, n, lo, hi, slo, shi, c.seed + static_cast<std::uint64_t>(k) * 7919u + n),
                        {}, false});
  }
  if (runs.empty()) throw ParseError("cover needs instances, instance_files or random");
  for (auto& r : runs) r.instance.validate();

  parallel_for(runs.size(), c.threads, [&](std::size_t i) {
    runs[i].result = besicovitch_cover(runs[i].instance);
    runs[i].covered = covers_all(runs[i].instance, runs[i].result);
  });

  json jr = json::array();
  std::string csv = "instance,size,depth,probes\n";
  int worst = 0;
  bool all_covered = true;
  for (const CoverRun& r : runs) {
    worst = std::max(worst, r.result.max_overlap);
    all_covered = all_covered && r.covered;
    json res = io::to_json(r.result, r.instance);
    res["name"] = r.name;
    res["size"] = r.instance.points.size();
    res["dimension"] = r.instance.dim;
    res["coverage"] = r.covered;
    jr.push_back(res);
    for (const auto& [depth, n] : r.result.overlap_histogram)
      csv += r.name + "," + std::to_string(r.instance.points.size()) + "," + std::to_string(depth) + "," +
             std::to_string(n) + "\n";
  }
  json out{{"seed", c.seed}, {"max_overlap", worst}, {"coverage", all_covered}, {"instances", jr}};
  return {{json_artifact("cover.json", out), {"cover.csv", csv}}, {}};
}

// --- norms -----------------------------------------------------------------

inline std::string norms_csv(const NormReport& r, const std::string& prefix = "") {
  std::string csv;
  for (const NormEntry* e : r.entries())
    csv += prefix + e->definition + "," + e->semantics + "," + fmt(e->estimate) + "\n";
  return csv;
}

inline Artifacts run_norms(const Config& c) {
  const NamedMeasure nm = load_single_measure(c);
  const GridMeasure& m = nm.measure;
  const auto fns = function_items(c);
  if (fns.size() != 1) throw ParseError("norms takes exactly one function");
  const GridFunction f = load_function(c, fns[0], m);
  const DoublingConfig cfg = doubling_config(c, m.dim());
  const FamilyParams p = family_params(c, m.dim());
  const CubeFamily fam = checked_family(m, cfg, p, nm.name);
  const NormReport rep = evaluate_norms(m, f, fam, cfg, c.threads);

  json out = io::to_json(rep, fam, m.dim());
  out["measure"] = nm.name;
  out["function"] = fns[0].name;
  out["config"] = io::to_json(cfg);
  out["family"] = io::to_json(p, m.dim());
  out["candidate_count"] = fam.candidate_count;
  return {{json_artifact("norms.json", out), {"norms.csv", "definition,semantics,estimate\n" + norms_csv(rep)}}, {}};
}

// --- equivalence -----------------------------------------------------------

struct Envelopes {
  double ratio = 100.0;        // pairwise among the local definitions
  double containment = 100.0;  // RBMO / rbmo_yang
  double eta = 10.0;           // same definition across η values
  double noise_floor = kDefaultNoiseFloor;
};

inline Envelopes envelopes(const Config& c) {
  const json e = c.section("envelopes");
  Envelopes v;
  v.ratio = io::get_or(e, "ratio", v.ratio);
  v.containment = io::get_or(e, "containment", v.containment);
  v.eta = io::get_or(e, "eta", v.eta);
  v.noise_floor = io::get_or(e, "noise_floor", v.noise_floor);
  if (!(v.ratio >= 1.0 && v.containment > 0.0 && v.eta >= 1.0 && v.noise_floor >= 0.0))
    throw InvalidInput("envelopes: ratio, eta >= 1; containment > 0; noise_floor >= 0");
  return v;
}

struct JobResult {
  std::string measure, function;
  NormReport report;
};

/// Every (measure, function) job on the shared per-measure family.
inline std::vector<JobResult> run_batch(const Config& c, const std::vector<NamedMeasure>& ms,
                                        const std::vector<NamedFunction>& fns,
                                        std::optional<double> eta_override = std::nullopt) {
  std::vector<CubeFamily> fams;
  std::vector<DoublingConfig> cfgs;
  for (const NamedMeasure& nm : ms) {
    DoublingConfig cfg = doubling_config(c, nm.measure.dim());
    if (eta_override) {
      cfg.eta = *eta_override;
      cfg.validate();
    }
    cfgs.push_back(cfg);
    fams.push_back(checked_family(nm.measure, cfg, family_params(c, nm.measure.dim()), nm.name));
  }
  // Parse every function up front so config errors surface before any work.
  std::vector<GridFunction> funcs;
  for (const NamedMeasure& nm : ms)
    for (const NamedFunction& nf : fns) funcs.push_back(load_function(c, nf, nm.measure));

  std::vector<JobResult> out(ms.size() * fns.size());
  parallel_for(out.size(), c.threads, [&](std::size_t k) {
    const std::size_t i = k / fns.size(), j = k % fns.size();
    out[k] = {ms[i].name, fns[j].name, evaluate_norms(ms[i].measure, funcs[k], fams[i], cfgs[i], 1)};
  });
  return out;
}

struct RatioStats {
  std::string pair;
  std::size_t count = 0;
  double min = 0, median = 0, max = 0;
  double spread = 1.0;  // max over samples of max(r, 1/r)
};

inline RatioStats ratio_stats(std::string name, std::vector<double> v) {
  RatioStats s;
  s.pair = std::move(name);
  s.count = v.size();
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.max = v.back();
  s.median = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  for (double r : v) s.spread = std::max({s.spread, r, 1.0 / r});
  return s;
}

inline json to_json(const RatioStats& s) {
  json j{{"pair", s.pair}, {"count", s.count}, {"spread", s.spread}};
  if (s.count) {
    j["min"] = s.min;
    j["median"] = s.median;
    j["max"] = s.max;
  } else {
    j["min"] = j["median"] = j["max"] = nullptr;
  }
  return j;
}

struct EquivalenceSummary {
  std::vector<RatioStats> pairs;  // local definitions, a/b for a before b
  RatioStats containment;         // RBMO / rbmo_yang
  double envelope_spread = 1.0;   // max spread over pairs
  std::size_t envelope_flags = 0;
  std::size_t containment_flags = 0;
  std::size_t hard_failures = 0;
  json rows = json::array();
  json flags = json::array();
};

inline EquivalenceSummary summarize_equivalence(const std::vector<JobResult>& jobs, const Envelopes& env) {
  EquivalenceSummary s;
  const auto& defs = equivalence_definitions();
  std::map<std::string, std::vector<double>> samples;
  std::vector<double> contain;
  for (const JobResult& j : jobs) {
    json est = json::object(), ratios = json::object();
    for (const NormEntry* e : j.report.entries()) est[e->definition] = e->estimate;
    for (std::size_t a = 0; a < defs.size(); ++a)
      for (std::size_t b = a + 1; b < defs.size(); ++b) {
        const std::string key = defs[a] + "/" + defs[b];
        const double x = j.report.estimate(defs[a]), y = j.report.estimate(defs[b]);
        if (!(x > env.noise_floor && y > env.noise_floor)) {
          ratios[key] = nullptr;
          continue;
        }
        const double r = x / y;
        ratios[key] = r;
        samples[key].push_back(r);
        if (r > env.ratio || r < 1.0 / env.ratio) {
          ++s.envelope_flags;
          s.flags.push_back({{"kind", "envelope"}, {"measure", j.measure}, {"function", j.function},
                             {"pair", key}, {"ratio", r}});
        }
      }
    const double big = j.report.rbmo_global.estimate, yang = j.report.rbmo_yang.estimate;
    if (big > env.noise_floor && yang > env.noise_floor) {
      const double r = big / yang;
      ratios["RBMO/rbmo_yang"] = r;
      contain.push_back(r);
      if (r > env.containment) {
        ++s.containment_flags;
        s.flags.push_back({{"kind", "containment"}, {"measure", j.measure}, {"function", j.function},
                           {"pair", "RBMO/rbmo_yang"}, {"ratio", r}});
      }
    } else {
      ratios["RBMO/rbmo_yang"] = nullptr;
      if (big > env.noise_floor) {
        // RBMO is visible while rbmo_yang is below the floor: unbounded ratio.
        ++s.containment_flags;
        s.flags.push_back({{"kind", "containment"}, {"measure", j.measure}, {"function", j.function},
                           {"pair", "RBMO/rbmo_yang"}, {"ratio", nullptr}});
      }
    }
    if (j.report.rbmo1.estimate > j.report.rbmo_yang.estimate) {
      ++s.hard_failures;
      s.flags.push_back({{"kind", "hard"}, {"measure", j.measure}, {"function", j.function},
                         {"pair", "rbmo1<=rbmo_yang"},
                         {"ratio", j.report.rbmo1.estimate / j.report.rbmo_yang.estimate}});
    }
    s.rows.push_back({{"measure", j.measure}, {"function", j.function}, {"fingerprint", j.report.fingerprint},
                      {"excluded_count", j.report.excluded_count}, {"estimates", est}, {"ratios", ratios}});
  }
  for (std::size_t a = 0; a < defs.size(); ++a)
    for (std::size_t b = a + 1; b < defs.size(); ++b) {
      const std::string key = defs[a] + "/" + defs[b];
      s.pairs.push_back(ratio_stats(key, samples[key]));
      s.envelope_spread = std::max(s.envelope_spread, s.pairs.back().spread);
    }
  s.containment = ratio_stats("RBMO/rbmo_yang", contain);
  return s;
}

inline json to_json(const EquivalenceSummary& s, const Envelopes& env, std::uint64_t seed) {
  json pairs = json::array();
  for (const RatioStats& p : s.pairs) pairs.push_back(to_json(p));
  return {{"seed", seed},
          {"envelopes",
           {{"ratio", env.ratio}, {"containment", env.containment}, {"eta", env.eta}, {"noise_floor", env.noise_floor}}},
          {"aggregates", pairs},
          {"containment", to_json(s.containment)},
          {"envelope_spread", s.envelope_spread},
          {"envelope_flags", s.envelope_flags},
          {"containment_flags", s.containment_flags},
          {"hard_failures", s.hard_failures},
          {"flags", s.flags},
          {"rows", s.rows}};
}

inline Artifacts run_equivalence(const Config& c) {
  const auto ms = load_measures(c);
  const auto fns = function_items(c);
  if (fns.size() < 2) throw ParseError("equivalence needs at least two functions");
  const Envelopes env = envelopes(c);
  const auto jobs = run_batch(c, ms, fns);
  const EquivalenceSummary s = summarize_equivalence(jobs, env);

  std::string csv = "measure,function,definition,semantics,estimate\n";
  for (const JobResult& j : jobs) csv += norms_csv(j.report, j.measure + "," + j.function + ",");
  Artifacts arts{{json_artifact("equivalence.json", to_json(s, env, c.seed)), {"equivalence.csv", csv}}, {}};
  if (s.hard_failures) arts.failure = std::to_string(s.hard_failures) + " instance(s) with rbmo1 > rbmo_yang";
  return arts;
}

// --- η sweep ---------------------------------------------------------------

struct EtaSweep {
  std::vector<double> etas;
  std::vector<std::vector<JobResult>> runs;  // one batch per η
  double spread = 1.0;                       // worst per-definition ratio across η
  std::size_t flags = 0;
  json rows = json::array();
};

inline EtaSweep eta_sweep(const Config& c, const std::vector<NamedMeasure>& ms,
                          const std::vector<NamedFunction>& fns, std::vector<double> etas, const Envelopes& env) {
  if (etas.size() < 2) throw ParseError("eta-sweep needs at least two eta values");
  EtaSweep s;
  s.etas = etas;
  for (double eta : etas) s.runs.push_back(run_batch(c, ms, fns, eta));
  const std::size_t jobs = s.runs.front().size();
  for (std::size_t k = 0; k < jobs; ++k) {
    json per_def = json::object();
    for (const NormEntry* e0 : s.runs[0][k].report.entries()) {
      json values = json::array(), ratios = json::array();
      const double base = e0->estimate;
      for (std::size_t t = 0; t < etas.size(); ++t) {
        const double v = s.runs[t][k].report.estimate(e0->definition);
        values.push_back(v);
        if (t == 0) continue;
        if (base > env.noise_floor && v > env.noise_floor) {
          const double r = base / v;
          ratios.push_back(r);
          s.spread = std::max({s.spread, r, 1.0 / r});
          if (r > env.eta || r < 1.0 / env.eta) ++s.flags;
        } else if ((base > env.noise_floor) != (v > env.noise_floor)) {
          ratios.push_back(nullptr);
          ++s.flags;
        } else {
          ratios.push_back(nullptr);
        }
      }
      per_def[e0->definition] = {{"estimates", values}, {"ratios_to_first", ratios}};
    }
    s.rows.push_back({{"measure", s.runs[0][k].measure}, {"function", s.runs[0][k].function},
                      {"definitions", per_def}});
  }
  return s;
}

inline Artifacts run_eta_sweep(const Config& c) {
  const auto ms = load_measures(c);
  const auto fns = function_items(c);
  const Envelopes env = envelopes(c);
  const auto etas = c.doc.value("eta_values", std::vector<double>{1.5, 2.0});
  const EtaSweep s = eta_sweep(c, ms, fns, etas, env);

  std::string csv = "measure,function,definition,eta,estimate\n";
  for (std::size_t t = 0; t < etas.size(); ++t)
    for (const JobResult& j : s.runs[t])
      for (const NormEntry* e : j.report.entries())
        csv += j.measure + "," + j.function + "," + e->definition + "," + fmt(etas[t]) + "," + fmt(e->estimate) + "\n";
  json out{{"seed", c.seed}, {"eta_values", etas}, {"envelope", env.eta}, {"noise_floor", env.noise_floor},
           {"spread", s.spread}, {"flags", s.flags}, {"rows", s.rows}};
  return {{json_artifact("eta-sweep.json", out), {"eta-sweep.csv", csv}}, {}};
}

// --- dispatch --------------------------------------------------------------

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"growth", "doubling-map", "kcoeff", "cover",
                                              "norms",  "equivalence",  "eta-sweep"};
  return names;
}

inline Artifacts run(const std::string& name, const Config& c) {
  if (name == "growth") return run_growth(c);
  if (name == "doubling-map") return run_doubling_map(c);
  if (name == "kcoeff") return run_kcoeff(c);
  if (name == "cover") return run_cover(c);
  if (name == "norms") return run_norms(c);
  if (name == "equivalence") return run_equivalence(c);
  if (name == "eta-sweep") return run_eta_sweep(c);
  throw ParseError("unknown subcommand '" + name + "'");
}

inline void write_artifacts(const fs::path& dir, const Artifacts& arts) {
  for (const Artifact& a : arts.files) io::write_atomic(dir / a.filename, a.text);
}

}  // namespace exp
}  // namespace osc
