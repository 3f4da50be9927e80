#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "cube.hpp"

namespace osc {

using CellCounts = std::array<int, kMaxDim>;

/// Piecewise-constant density on a uniform grid over a bounded box.
///
/// Density values are mass per unit volume, stored row-major with the last
/// axis varying fastest. The measure is supported in the box: any part of a
/// cube outside it carries no mass. Instances are immutable after
/// construction and safe to share between threads.
class GridMeasure {
 public:
  GridMeasure() = default;

  GridMeasure(int dim, const Point& box_lo, const Point& box_hi, const CellCounts& cells,
              std::vector<double> density)
      : dim_(dim), lo_(box_lo), hi_(box_hi), cells_(cells), density_(std::move(density)) {
    if (dim < 1 || dim > kMaxDim) throw InvalidInput("measure dimension must be 1, 2 or 3");
    std::size_t count = 1;
    for (int i = 0; i < dim; ++i) {
      if (!(std::isfinite(lo_[i]) && std::isfinite(hi_[i]) && lo_[i] < hi_[i]))
        throw InvalidInput("measure box must satisfy lo < hi on every axis");
      if (cells_[i] <= 0) throw InvalidInput("cells per axis must be positive");
      width_[i] = (hi_[i] - lo_[i]) / cells_[i];
      count *= static_cast<std::size_t>(cells_[i]);
    }
    for (int i = dim; i < kMaxDim; ++i) {
      lo_[i] = hi_[i] = 0.0;
      cells_[i] = 1;
      width_[i] = 1.0;
    }
    if (density_.size() != count)
      throw InvalidInput("density has " + std::to_string(density_.size()) +
                         " entries, grid needs " + std::to_string(count));
    for (double v : density_)
      if (!(std::isfinite(v) && v >= 0.0))
        throw InvalidInput("density entries must be finite and nonnegative");
    cell_volume_ = 1.0;
    for (int i = 0; i < dim; ++i) cell_volume_ *= width_[i];
  }

  int dim() const { return dim_; }
  const Point& box_lo() const { return lo_; }
  const Point& box_hi() const { return hi_; }
  const CellCounts& cells() const { return cells_; }
  double cell_width(int axis) const { return width_[axis]; }
  double cell_volume() const { return cell_volume_; }
  std::size_t cell_count() const { return density_.size(); }
  std::span<const double> density() const { return density_; }

  /// Smallest admissible side length: one grid cell (the widest axis).
  double min_side() const {
    double w = 0.0;
    for (int i = 0; i < dim_; ++i) w = std::max(w, width_[i]);
    return w;
  }

  double cell_edge(int axis, int index) const {
    return lo_[axis] + index * ((hi_[axis] - lo_[axis]) / cells_[axis]);
  }

  std::array<int, kMaxDim> unflatten(std::size_t flat) const {
    std::array<int, kMaxDim> idx{0, 0, 0};
    for (int i = dim_ - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(flat % static_cast<std::size_t>(cells_[i]));
      flat /= static_cast<std::size_t>(cells_[i]);
    }
    return idx;
  }

  std::size_t flatten(const std::array<int, kMaxDim>& idx) const {
    std::size_t flat = 0;
    for (int i = 0; i < dim_; ++i) flat = flat * static_cast<std::size_t>(cells_[i]) + idx[i];
    return flat;
  }

  Point cell_center(std::size_t flat) const {
    const auto idx = unflatten(flat);
    Point p{0.0, 0.0, 0.0};
    for (int i = 0; i < dim_; ++i) p[i] = lo_[i] + (idx[i] + 0.5) * width_[i];
    return p;
  }

  double total_mass() const {
    double s = 0.0;
    for (double v : density_) s += v * cell_volume_;
    return s;
  }

  bool is_uniform() const {
    if (density_.empty() || !(density_.front() > 0.0)) return false;
    return std::all_of(density_.begin(), density_.end(),
                       [&](double v) { return v == density_.front(); });
  }

  bool contains_point(const Point& p) const {
    for (int i = 0; i < dim_; ++i)
      if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
    return true;
  }

  /// Calls fn(flat_index, overlap_volume) for every grid cell whose
  /// intersection with q has positive volume. Overlap is exact: the product
  /// of per-axis overlap lengths.
  template <class Fn>
  void for_each_overlap(const Cube& q, Fn&& fn) const {
    thread_local std::array<std::vector<std::pair<int, double>>, kMaxDim> spans;
    for (int a = 0; a < dim_; ++a) {
      auto& sp = spans[a];
      sp.clear();
      const double qlo = q.lo(a), qhi = q.hi(a);
      if (qhi <= lo_[a] || qlo >= hi_[a]) return;
      int i0 = static_cast<int>(std::floor((qlo - lo_[a]) / width_[a]));
      int i1 = static_cast<int>(std::floor((qhi - lo_[a]) / width_[a]));
      i0 = std::clamp(i0 - 1, 0, cells_[a] - 1);
      i1 = std::clamp(i1 + 1, 0, cells_[a] - 1);
      for (int i = i0; i <= i1; ++i) {
        const double len = std::min(qhi, cell_edge(a, i + 1)) - std::max(qlo, cell_edge(a, i));
        if (len > 0.0) sp.emplace_back(i, len);
      }
      if (sp.empty()) return;
    }
    switch (dim_) {
      case 1:
        for (const auto& [i, w] : spans[0]) fn(static_cast<std::size_t>(i), w);
        break;
      case 2: {
        const std::size_t k1 = static_cast<std::size_t>(cells_[1]);
        for (const auto& [i, wi] : spans[0])
          for (const auto& [j, wj] : spans[1]) fn(i * k1 + j, wi * wj);
        break;
      }
      default: {
        const std::size_t k1 = static_cast<std::size_t>(cells_[1]);
        const std::size_t k2 = static_cast<std::size_t>(cells_[2]);
        for (const auto& [i, wi] : spans[0])
          for (const auto& [j, wj] : spans[1])
            for (const auto& [k, wk] : spans[2]) fn((i * k1 + j) * k2 + k, wi * wj * wk);
        break;
      }
    }
  }

 private:
  int dim_ = 1;
  Point lo_{};
  Point hi_{};
  CellCounts cells_{1, 1, 1};
  std::array<double, kMaxDim> width_{1.0, 1.0, 1.0};
  double cell_volume_ = 1.0;
  std::vector<double> density_;
};

/// μ(q): Σ over cells of density × volume(cell ∩ q).
inline double measure_of_cube(const GridMeasure& m, const Cube& q) {
  if (!all_finite(q.center, q.dim) || !std::isfinite(q.side) || !(q.side > 0.0))
    throw InvalidInput("measure_of_cube: cube must be finite with positive side");
  if (q.dim != m.dim()) throw InvalidInput("measure_of_cube: dimension mismatch");
  const auto rho = m.density();
  double mass = 0.0;
  m.for_each_overlap(q, [&](std::size_t c, double v) { mass += rho[c] * v; });
  return mass;
}

/// Parameter pack shared by every doubling-cube computation.
struct DoublingConfig {
  int d = 1;
  double n = 1.0;
  double alpha = 2.0;
  double beta = 5.0;
  double eta = 1.5;
  std::optional<double> c0;

  // Defaults used across the project: n = d, α = 2, β = 2.5·2^d, η = 1.5.
  static DoublingConfig defaults(int d) {
    DoublingConfig c;
    c.d = d;
    c.n = d;
    c.alpha = 2.0;
    c.beta = 2.5 * std::pow(2.0, d);
    c.eta = 1.5;
    return c;
  }

  void validate() const {
    if (d < 1 || d > kMaxDim) throw InvalidInput("dimension must be 1, 2 or 3");
    if (!(n > 0.0 && n <= d)) throw InvalidInput("growth exponent n must lie in (0, d]");
    if (!(alpha > 1.0) || !std::isfinite(alpha)) throw InvalidInput("alpha must exceed 1");
    if (!(beta > std::pow(alpha, d)) || !std::isfinite(beta))
      throw InvalidInput("beta must exceed alpha^d");
    if (!(eta > 1.0 && eta <= alpha)) throw InvalidInput("eta must lie in (1, alpha]");
    if (c0 && !(*c0 >= 0.0)) throw InvalidInput("c0 must be nonnegative");
  }
};

struct GrowthEstimate {
  double c0 = 0.0;
  Cube argmax;
};

/// max over the sampled (x, l) of μ(Q(x,l)) / l^n. A lower bound for the true
/// growth constant restricted to scales at or above the grid resolution.
inline GrowthEstimate estimate_growth_constant(const GridMeasure& m, const DoublingConfig& cfg,
                                               std::span<const double> side_lengths,
                                               std::span<const Point> centers) {
  if (side_lengths.empty() || centers.empty())
    throw InvalidInput("estimate_growth_constant: empty sample set");
  const double lmin = m.min_side();
  for (double l : side_lengths)
    if (!(l >= lmin * (1.0 - 1e-12)) || !std::isfinite(l))
      throw InvalidInput("estimate_growth_constant: side below grid resolution");
  for (const auto& x : centers)
    if (!m.contains_point(x)) throw InvalidInput("estimate_growth_constant: center outside box");

  GrowthEstimate best{0.0, Cube(centers.front(), side_lengths.front(), m.dim())};
  for (double l : side_lengths) {
    const double scale = std::pow(l, cfg.n);
    for (const auto& x : centers) {
      const Cube q(x, l, m.dim());
      const double r = measure_of_cube(m, q) / scale;
      if (r > best.c0) best = {r, q};
    }
  }
  return best;
}

/// Cell centers (optionally strided) and the side ladder l_min·2^k up to the
/// box span; a sample whose estimate equals the maximal cell density when n = d.
inline std::pair<std::vector<double>, std::vector<Point>> default_growth_sample(
    const GridMeasure& m, std::size_t center_stride = 1) {
  std::vector<double> sides;
  double span = 0.0;
  for (int i = 0; i < m.dim(); ++i) span = std::max(span, m.box_hi()[i] - m.box_lo()[i]);
  for (double l = m.min_side(); l <= 2.0 * span; l *= 2.0) sides.push_back(l);
  std::vector<Point> centers;
  center_stride = std::max<std::size_t>(center_stride, 1);
  for (std::size_t c = 0; c < m.cell_count(); c += center_stride) centers.push_back(m.cell_center(c));
  return {std::move(sides), std::move(centers)};
}

// ---------------------------------------------------------------------------
// Measure zoo
// ---------------------------------------------------------------------------

struct MeasureSpec {
  std::string preset = "uniform";
  int dim = 1;
  Point box_lo{0.0, 0.0, 0.0};
  Point box_hi{8.0, 8.0, 8.0};
  CellCounts cells{512, 512, 512};

  double level = 1.0;        // uniform level; block level for lacunary-blocks
  double background = 0.0;   // floor added everywhere (power-spike default 0.001)
  double rate = 1.0;         // exponential decay rate
  double amplitude = 1.0;    // exponential / gaussian / power tail amplitude
  double width = 1.0;        // gaussian width
  double spike_mass = 1.0;   // single-cell spike mass (power-spike)
  double exponent = 0.0;     // power tail exponent; 0 disables the tail
  int blocks = 6;            // lacunary-blocks
  double ratio = 0.5;
  double fill = 0.5;
  std::optional<Point> center;  // defaults to the box midpoint

  std::vector<double> density;  // preset "explicit"
};

inline GridMeasure build_measure(const MeasureSpec& spec) {
  const int d = spec.dim;
  if (d < 1 || d > kMaxDim) throw InvalidInput("measure dimension must be 1, 2 or 3");
  std::size_t count = 1;
  for (int i = 0; i < d; ++i) {
    if (spec.cells[i] <= 0) throw InvalidInput("cells per axis must be positive");
    count *= static_cast<std::size_t>(spec.cells[i]);
  }

  if (spec.preset == "explicit")
    return GridMeasure(d, spec.box_lo, spec.box_hi, spec.cells, spec.density);

  // Geometry first so cell centers are available to the presets.
  const GridMeasure shape(d, spec.box_lo, spec.box_hi, spec.cells, std::vector<double>(count, 0.0));
  Point mid{0.0, 0.0, 0.0};
  for (int i = 0; i < d; ++i) mid[i] = 0.5 * (spec.box_lo[i] + spec.box_hi[i]);
  const Point c = spec.center.value_or(mid);

  std::vector<double> rho(count, 0.0);
  const std::string& p = spec.preset;
  if (p == "uniform") {
    std::fill(rho.begin(), rho.end(), spec.level);
  } else if (p == "exponential") {
    for (std::size_t k = 0; k < count; ++k) {
      const Point x = shape.cell_center(k);
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += x[i];
      rho[k] = spec.amplitude * std::exp(-spec.rate * s);
    }
  } else if (p == "gaussian") {
    if (!(spec.width > 0.0)) throw InvalidInput("gaussian width must be positive");
    for (std::size_t k = 0; k < count; ++k) {
      const Point x = shape.cell_center(k);
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) r2 += (x[i] - c[i]) * (x[i] - c[i]);
      rho[k] = spec.amplitude * std::exp(-r2 / (spec.width * spec.width));
    }
  } else if (p == "power-spike") {
    if (!(spec.exponent >= 0.0 && spec.exponent < d))
      throw InvalidInput("power-spike exponent must lie in [0, d)");
    if (!shape.contains_point(c)) throw InvalidInput("power-spike center outside box");
    const double floor_r = 0.5 * shape.min_side();
    for (std::size_t k = 0; k < count; ++k) {
      rho[k] = spec.background;
      if (spec.exponent > 0.0) {
        const Point x = shape.cell_center(k);
        double r = 0.0;
        for (int i = 0; i < d; ++i) r = std::max(r, std::abs(x[i] - c[i]));
        rho[k] += spec.amplitude * std::pow(std::max(r, floor_r), -spec.exponent);
      }
    }
    std::array<int, kMaxDim> idx{0, 0, 0};
    for (int i = 0; i < d; ++i)
      idx[i] = std::clamp(static_cast<int>(std::floor((c[i] - spec.box_lo[i]) / shape.cell_width(i))),
                          0, spec.cells[i] - 1);
    rho[shape.flatten(idx)] += spec.spike_mass / shape.cell_volume();
  } else if (p == "lacunary-blocks") {
    if (spec.blocks < 1 || !(spec.ratio > 0.0 && spec.ratio < 1.0) || !(spec.fill > 0.0))
      throw InvalidInput("lacunary-blocks needs blocks >= 1, ratio in (0,1), fill > 0");
    for (std::size_t k = 0; k < count; ++k) {
      const Point x = shape.cell_center(k);
      bool in_block = true;
      for (int i = 0; i < d && in_block; ++i) {
        const double t = x[i] - spec.box_lo[i];
        const double span = spec.box_hi[i] - spec.box_lo[i];
        bool hit = false;
        double start = span;
        for (int b = 1; b <= spec.blocks && !hit; ++b) {
          start *= spec.ratio;
          hit = t >= start && t < start * (1.0 + spec.fill);
        }
        in_block = hit;
      }
      rho[k] = spec.background + (in_block ? spec.level : 0.0);
    }
  } else {
    throw InvalidInput("unknown measure preset '" + p + "'");
  }
  return GridMeasure(d, spec.box_lo, spec.box_hi, spec.cells, std::move(rho));
}

}  // namespace osc
