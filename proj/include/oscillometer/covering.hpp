#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <vector>

#include "cube.hpp"

namespace osc {

struct CoverInstance {
  std::vector<Point> points;
  std::vector<Cube> assigned;  // assigned[i] is centered at points[i]
  int dim = 1;

  void validate() const {
    if (points.size() != assigned.size())
      throw InvalidInput("cover instance: one cube per point required");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (assigned[i].dim != dim) throw InvalidInput("cover instance: dimension mismatch");
      for (int a = 0; a < dim; ++a)
        if (assigned[i].center[a] != points[i][a])
          throw InvalidInput("cover instance: cube not centered at its point");
    }
  }
};

struct CoverResult {
  std::vector<std::size_t> selected;  // indices into the instance, in selection order
  int max_overlap = 0;
  std::map<int, std::size_t> overlap_histogram;  // depth -> probe count
  std::size_t probe_count = 0;
};

namespace detail {

inline bool lex_less(const Point& a, const Point& b, int dim) {
  for (int i = 0; i < dim; ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

inline int depth_at(const Point& z, const std::vector<const Cube*>& cubes) {
  int n = 0;
  for (const Cube* c : cubes) n += c->contains_point(z) ? 1 : 0;
  return n;
}

}  // namespace detail

/// Probe set: E, the corners and centers of the selected cubes, and the
/// corners of every pairwise intersection box.
inline std::vector<Point> cover_probes(const CoverInstance& inst,
                                       const std::vector<std::size_t>& selected) {
  const int d = inst.dim;
  std::vector<Point> probes(inst.points.begin(), inst.points.end());
  auto push_corners = [&](const Point& lo, const Point& hi) {
    for (int mask = 0; mask < (1 << d); ++mask) {
      Point p{0.0, 0.0, 0.0};
      for (int a = 0; a < d; ++a) p[a] = (mask >> a) & 1 ? hi[a] : lo[a];
      probes.push_back(p);
    }
  };
  for (std::size_t s : selected) {
    const Cube& c = inst.assigned[s];
    Point lo{}, hi{};
    for (int a = 0; a < d; ++a) {
      lo[a] = c.lo(a);
      hi[a] = c.hi(a);
    }
    probes.push_back(c.center);
    push_corners(lo, hi);
  }
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const Cube& a = inst.assigned[selected[i]];
    for (std::size_t j = i + 1; j < selected.size(); ++j) {
      const Cube& b = inst.assigned[selected[j]];
      Point lo{}, hi{};
      bool empty = false;
      for (int k = 0; k < d && !empty; ++k) {
        lo[k] = std::max(a.lo(k), b.lo(k));
        hi[k] = std::min(a.hi(k), b.hi(k));
        empty = lo[k] > hi[k];
      }
      if (!empty) push_corners(lo, hi);
    }
  }
  return probes;
}

/// Greedy Besicovitch extraction: visit cubes by decreasing side (ties by
/// lexicographic center) and keep a cube when its center is not yet covered.
inline CoverResult besicovitch_cover(const CoverInstance& inst) {
  inst.validate();
  CoverResult out;
  if (inst.points.empty()) return out;
  const int d = inst.dim;

  std::vector<std::size_t> order(inst.points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (inst.assigned[a].side != inst.assigned[b].side)
      return inst.assigned[a].side > inst.assigned[b].side;
    return detail::lex_less(inst.points[a], inst.points[b], d);
  });

  std::vector<const Cube*> chosen;
  for (std::size_t idx : order) {
    if (detail::depth_at(inst.points[idx], chosen) > 0) continue;
    out.selected.push_back(idx);
    chosen.push_back(&inst.assigned[idx]);
  }

  const auto probes = cover_probes(inst, out.selected);
  out.probe_count = probes.size();
  for (const auto& z : probes) {
    const int depth = detail::depth_at(z, chosen);
    out.max_overlap = std::max(out.max_overlap, depth);
    ++out.overlap_histogram[depth];
  }
  return out;
}

/// Random instance: points uniform in [lo, hi]^d, sides uniform in
/// [side_lo, side_hi].
inline CoverInstance random_cover_instance(int dim, std::size_t count, double lo, double hi,
                                           double side_lo, double side_hi, std::uint64_t seed) {
  Rng rng(seed);
  CoverInstance inst;
  inst.dim = dim;
  for (std::size_t i = 0; i < count; ++i) {
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) p[a] = rng.uniform(lo, hi);
    inst.points.push_back(p);
    inst.assigned.emplace_back(p, rng.uniform(side_lo, side_hi), dim);
  }
  return inst;
}

}  // namespace osc
