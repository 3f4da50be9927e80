#pragma once

// JSON bindings for measures, functions, cubes and reports, plus atomic file
// output. Uses nlohmann/json.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "covering.hpp"
#include "family.hpp"
#include "geometry.hpp"
#include "kcoeff.hpp"
#include "norms.hpp"

namespace osc::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

/// Writes to a sibling temporary file, then renames over the target.
inline void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline void write_json(const fs::path& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

// --- small helpers ---------------------------------------------------------

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

inline Point point_from_json(const json& j, int dim) {
  Point p{0.0, 0.0, 0.0};
  if (j.is_number()) {
    for (int i = 0; i < dim; ++i) p[i] = j.get<double>();
    return p;
  }
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ParseError("expected a point with " + std::to_string(dim) + " coordinates");
  for (int i = 0; i < dim; ++i) p[i] = j[static_cast<std::size_t>(i)].get<double>();
  return p;
}

inline json point_to_json(const Point& p, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[i]);
  return a;
}

// --- cubes -----------------------------------------------------------------

inline json to_json(const Cube& c) { return {{"center", point_to_json(c.center, c.dim)}, {"side", c.side}}; }

inline Cube cube_from_json(const json& j) {
  try {
    const json& c = j.at("center");
    const int dim = c.is_array() ? static_cast<int>(c.size()) : 1;
    return Cube(point_from_json(c, dim), j.at("side").get<double>(), dim);
  } catch (const json::exception& e) {
    throw ParseError(std::string("cube literal: ") + e.what());
  }
}

inline json to_json(const ChainEntry& e) {
  return {{"exponent", e.exponent}, {"side", e.side}, {"mass", e.mass}, {"doubling", e.doubling}};
}

inline json to_json(const KResult& k) { return {{"value", k.value}, {"steps", k.steps}, {"terms", k.terms}}; }

// --- measures --------------------------------------------------------------

inline MeasureSpec measure_spec_from_json(const json& j) {
  MeasureSpec s;
  try {
    if (j.contains("density")) {
      s.preset = "explicit";
      s.dim = j.at("dimension").get<int>();
      if (s.dim < 1 || s.dim > kMaxDim) throw ParseError("dimension must be 1, 2 or 3");
      const json& box = j.at("box");
      s.box_lo = point_from_json(box.at(0), s.dim);
      s.box_hi = point_from_json(box.at(1), s.dim);
      const json& cells = j.at("cells");
      if (static_cast<int>(cells.size()) != s.dim) throw ParseError("cells needs one entry per axis");
      for (int i = 0; i < s.dim; ++i) s.cells[i] = cells.at(static_cast<std::size_t>(i)).get<int>();
      s.density = j.at("density").get<std::vector<double>>();
      return s;
    }
    s.preset = j.at("preset").get<std::string>();
    const json params = j.value("params", json::object());
    s.dim = get_or(params, "dimension", 1);
    if (s.dim < 1 || s.dim > kMaxDim) throw ParseError("dimension must be 1, 2 or 3");
    if (params.contains("box")) {
      s.box_lo = point_from_json(params["box"].at(0), s.dim);
      s.box_hi = point_from_json(params["box"].at(1), s.dim);
    }
    if (params.contains("cells")) {
      const json& c = params["cells"];
      if (c.is_number()) {
        for (int i = 0; i < s.dim; ++i) s.cells[i] = c.get<int>();
      } else {
        if (static_cast<int>(c.size()) != s.dim) throw ParseError("cells needs one entry per axis");
        for (int i = 0; i < s.dim; ++i) s.cells[i] = c.at(static_cast<std::size_t>(i)).get<int>();
      }
    }
    s.level = get_or(params, "level", 1.0);
    s.background = get_or(params, "background", s.preset == "power-spike" ? 0.001 : 0.0);
    s.rate = get_or(params, "rate", 1.0);
    s.amplitude = get_or(params, "amplitude", 1.0);
    s.width = get_or(params, "width", 1.0);
    s.spike_mass = get_or(params, "spike_mass", 1.0);
    s.exponent = get_or(params, "exponent", 0.0);
    s.blocks = get_or(params, "blocks", 6);
    s.ratio = get_or(params, "ratio", 0.5);
    s.fill = get_or(params, "fill", 0.5);
    if (params.contains("center")) s.center = point_from_json(params["center"], s.dim);
  } catch (const json::exception& e) {
    throw ParseError(std::string("measure: ") + e.what());
  }
  return s;
}

inline GridMeasure measure_from_json(const json& j) { return build_measure(measure_spec_from_json(j)); }

/// Explicit-array form, the canonical on-disk representation.
inline json to_json(const GridMeasure& m) {
  json cells = json::array();
  for (int i = 0; i < m.dim(); ++i) cells.push_back(m.cells()[i]);
  return {{"dimension", m.dim()},
          {"box", {point_to_json(m.box_lo(), m.dim()), point_to_json(m.box_hi(), m.dim())}},
          {"cells", cells},
          {"density", std::vector<double>(m.density().begin(), m.density().end())}};
}

// --- functions -------------------------------------------------------------

inline FunctionSpec function_spec_from_json(const json& j, int dim) {
  FunctionSpec s;
  try {
    s.name = get_or<std::string>(j, "name", "");
    if (j.contains("values")) {
      s.kind = "explicit";
      s.values = j.at("values").get<std::vector<double>>();
      return s;
    }
    s.kind = j.at("kind").get<std::string>();
    s.axis = get_or(j, "axis", 0);
    s.value = get_or(j, "value", s.value);
    s.threshold = get_or(j, "threshold", s.threshold);
    s.left = get_or(j, "left", s.left);
    s.right = get_or(j, "right", s.right);
    if (j.contains("lo")) s.lo = point_from_json(j["lo"], dim);
    if (j.contains("hi")) s.hi = point_from_json(j["hi"], dim);
    s.inside = get_or(j, "inside", s.inside);
    s.outside = get_or(j, "outside", s.outside);
    s.frequency = get_or(j, "frequency", s.frequency);
    s.phase = get_or(j, "phase", s.phase);
    s.amplitude = get_or(j, "amplitude", s.amplitude);
    s.slope = get_or(j, "slope", s.slope);
    s.offset = get_or(j, "offset", s.offset);
    if (j.contains("center")) s.center = point_from_json(j["center"], dim);
    s.eps = get_or(j, "eps", s.eps);
    s.width = get_or(j, "width", s.width);
    s.period = get_or(j, "period", s.period);
    s.pieces = get_or(j, "pieces", s.pieces);
    s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  } catch (const json::exception& e) {
    throw ParseError(std::string("function: ") + e.what());
  }
  return s;
}

inline json to_json(const GridFunction& f) { return {{"values", f.values()}}; }

// --- configs ---------------------------------------------------------------

inline DoublingConfig doubling_config_from_json(const json& j, int dim) {
  DoublingConfig c = DoublingConfig::defaults(dim);
  c.n = get_or(j, "n", c.n);
  c.alpha = get_or(j, "alpha", c.alpha);
  c.beta = get_or(j, "beta", c.beta);
  c.eta = get_or(j, "eta", c.eta);
  if (j.is_object() && j.contains("c0") && !j["c0"].is_null()) c.c0 = j["c0"].get<double>();
  return c;
}

inline json to_json(const DoublingConfig& c) {
  json j{{"d", c.d}, {"n", c.n}, {"alpha", c.alpha}, {"beta", c.beta}, {"eta", c.eta}};
  j["c0"] = c.c0 ? json(*c.c0) : json(nullptr);
  return j;
}

inline FamilyParams family_params_from_json(const json& j, int dim, std::uint64_t seed) {
  FamilyParams p;
  p.centers_per_axis = get_or(j, "centers_per_axis", dim == 1 ? 64 : 16);
  p.jitter = get_or(j, "jitter", p.jitter);
  p.base_side = get_or(j, "base_side", p.base_side);
  p.ladder_lo = get_or(j, "ladder_lo", p.ladder_lo);
  p.ladder_hi = get_or(j, "ladder_hi", p.ladder_hi);
  p.chain_span = get_or(j, "chain_span", p.chain_span);
  p.offcenter_per_cube = get_or(j, "offcenter_per_cube", p.offcenter_per_cube);
  if (j.is_object() && j.contains("center_region")) {
    p.center_lo = point_from_json(j["center_region"].at(0), dim);
    p.center_hi = point_from_json(j["center_region"].at(1), dim);
  }
  p.seed = seed;
  return p;
}

inline json to_json(const FamilyParams& p, int dim) {
  json j{{"centers_per_axis", p.centers_per_axis}, {"jitter", p.jitter},
         {"base_side", p.base_side},               {"ladder_lo", p.ladder_lo},
         {"ladder_hi", p.ladder_hi},               {"chain_span", p.chain_span},
         {"offcenter_per_cube", p.offcenter_per_cube}, {"seed", p.seed}};
  if (p.center_lo && p.center_hi)
    j["center_region"] = {point_to_json(*p.center_lo, dim), point_to_json(*p.center_hi, dim)};
  return j;
}

// --- covering --------------------------------------------------------------

inline CoverInstance cover_instance_from_json(const json& j) {
  CoverInstance inst;
  try {
    inst.dim = j.at("dimension").get<int>();
    for (const json& c : j.at("cubes")) {
      const Cube q = cube_from_json(c);
      if (q.dim != inst.dim) throw ParseError("cover instance: cube dimension mismatch");
      inst.points.push_back(q.center);
      inst.assigned.push_back(q);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("cover instance: ") + e.what());
  }
  return inst;
}

inline json to_json(const CoverInstance& inst) {
  json cubes = json::array();
  for (const Cube& c : inst.assigned) cubes.push_back(to_json(c));
  return {{"dimension", inst.dim}, {"cubes", cubes}};
}

inline json to_json(const CoverResult& r, const CoverInstance& inst) {
  json sel = json::array();
  for (std::size_t i : r.selected) sel.push_back({{"index", i}, {"cube", to_json(inst.assigned[i])}});
  json hist = json::array();
  for (const auto& [depth, count] : r.overlap_histogram) hist.push_back({{"depth", depth}, {"probes", count}});
  return {{"selected", sel},
          {"max_overlap", r.max_overlap},
          {"probe_count", r.probe_count},
          {"overlap_histogram", hist}};
}

// --- norm reports ----------------------------------------------------------

inline json witness_to_json(const Witness& w, const CubeFamily& fam, int dim) {
  switch (w.kind) {
    case Witness::Kind::cube:
      return {{"kind", "cube"}, {"cube", to_json(fam.cubes[w.index].cube)}};
    case Witness::Kind::unit_cube:
      return {{"kind", "unit_cube"}, {"cube", to_json(Cube(fam.centers[w.index], 1.0, dim))}};
    case Witness::Kind::doubling_pair:
    case Witness::Kind::nested_pair: {
      const bool dbl = w.kind == Witness::Kind::doubling_pair;
      const CubePair& p = dbl ? fam.doubling_pairs[w.index] : fam.nested_pairs[w.index];
      return {{"kind", dbl ? "doubling_pair" : "nested_pair"},
              {"inner", to_json(fam.cubes[p.inner].cube)},
              {"outer", to_json(fam.cubes[p.outer].cube)},
              {"k", p.k}};
    }
    default:
      return {{"kind", "none"}};
  }
}

inline json to_json(const NormEntry& e, const CubeFamily& fam, int dim) {
  json conds = json::array();
  for (const auto& c : e.conditions)
    conds.push_back({{"name", c.name}, {"supremum", c.value}, {"argmax", witness_to_json(c.argmax, fam, dim)}});
  return {{"definition", e.definition},
          {"semantics", e.semantics},
          {"estimate", e.estimate},
          {"conditions", conds}};
}

inline json to_json(const NormReport& r, const CubeFamily& fam, int dim) {
  json defs = json::object();
  for (const NormEntry* e : r.entries()) defs[e->definition] = to_json(*e, fam, dim);
  if (!r.bmo_classical) defs["bmo_classical"] = nullptr;
  return {{"seed", r.seed},
          {"family_fingerprint", r.fingerprint},
          {"excluded_count", r.excluded_count},
          {"cube_count", r.cube_count},
          {"pair_count", r.pair_count},
          {"definitions", defs}};
}

}  // namespace osc::io
