#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "cube.hpp"
#include "measure.hpp"

namespace osc {

/// Piecewise-constant function on the grid of an associated GridMeasure.
class GridFunction {
 public:
  GridFunction() = default;

  GridFunction(const GridMeasure& m, std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() != m.cell_count())
      throw InvalidInput("function has " + std::to_string(values_.size()) +
                         " values, grid has " + std::to_string(m.cell_count()) + " cells");
    for (double v : values_)
      if (!std::isfinite(v)) throw InvalidInput("function values must be finite");
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  /// max |f| over cells of positive mass.
  double ess_sup(const GridMeasure& m) const {
    const auto rho = m.density();
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (rho[i] > 0.0) s = std::max(s, std::abs(values_[i]));
    return s;
  }

  template <class Op>
  GridFunction map(Op op) const {
    GridFunction g;
    g.values_ = values_;
    for (double& v : g.values_) v = op(v);
    return g;
  }

  GridFunction scaled(double lambda) const {
    GridFunction g;
    g.values_ = values_;
    for (double& v : g.values_) v *= lambda;
    return g;
  }

 private:
  std::vector<double> values_;
};

/// ∫_q f dμ together with μ(q), both from one pass over the overlapped cells.
/// The integral is accumulated relative to the first positive-weight cell,
/// so a constant f yields a mean that is exactly that constant.
struct MeanAccumulator {
  double mass = 0.0;
  double ref = 0.0;
  double shifted = 0.0;  // Σ (f - ref) dμ
  bool has_ref = false;

  double mean() const { return ref + shifted / mass; }
};

inline MeanAccumulator accumulate_mean(const GridMeasure& m, const GridFunction& f, const Cube& q) {
  const auto rho = m.density();
  MeanAccumulator acc;
  m.for_each_overlap(q, [&](std::size_t c, double v) {
    const double w = rho[c] * v;
    if (!(w > 0.0)) return;
    if (!acc.has_ref) {
      acc.ref = f[c];
      acc.has_ref = true;
    }
    acc.mass += w;
    acc.shifted += (f[c] - acc.ref) * w;
  });
  return acc;
}

/// m_Q f = (1/μ(Q)) ∫_Q f dμ.
inline double mean(const GridMeasure& m, const GridFunction& f, const Cube& q) {
  const auto acc = accumulate_mean(m, f, q);
  if (!(acc.mass > 0.0)) throw ZeroMassMean("mean over a cube of zero mass");
  return acc.mean();
}

/// ∫_q |f - c| dμ.
inline double abs_deviation_integral(const GridMeasure& m, const GridFunction& f, const Cube& q,
                                     double c) {
  const auto rho = m.density();
  double s = 0.0;
  m.for_each_overlap(q, [&](std::size_t k, double v) { s += std::abs(f[k] - c) * rho[k] * v; });
  return s;
}

/// (1/μ(ηq)) ∫_q |f - center_value| dμ; 0 when μ(ηq) = 0.
inline double oscillation_term(const GridMeasure& m, const GridFunction& f, const Cube& q,
                               double center_value, const DoublingConfig& cfg) {
  const double denom = measure_of_cube(m, q.scaled(cfg.eta));
  if (!(denom > 0.0)) return 0.0;
  return abs_deviation_integral(m, f, q, center_value) / denom;
}

// ---------------------------------------------------------------------------
// Function zoo, evaluated at cell centers.
// ---------------------------------------------------------------------------

struct FunctionSpec {
  std::string name;
  std::string kind = "constant";
  int axis = 0;
  double value = 1.0;          // constant
  double threshold = 4.0;      // step
  double left = 1.0, right = -1.0;
  Point lo{0.0, 0.0, 0.0}, hi{1.0, 1.0, 1.0};  // indicator box
  double inside = 1.0, outside = 0.0;
  double frequency = 1.0;      // sine / cosine (cycles per unit length)
  double phase = 0.0;
  double amplitude = 1.0;
  double slope = 1.0;          // linear
  double offset = 0.0;
  Point center{4.0, 4.0, 4.0};  // abs / log-distance / bump
  double eps = 0.01;
  double width = 1.0;
  double period = 1.0;         // sawtooth / square
  int pieces = 16;             // random-steps
  std::uint64_t seed = 1;      // random-steps / noise
  std::vector<double> values;  // explicit
};

inline GridFunction build_function(const GridMeasure& m, const FunctionSpec& s) {
  const std::size_t count = m.cell_count();
  const int d = m.dim();
  if (s.kind == "explicit") return GridFunction(m, s.values);
  if (s.axis < 0 || s.axis >= d) throw InvalidInput("function axis out of range");

  std::vector<double> v(count, 0.0);
  const double box_lo = m.box_lo()[s.axis];
  const double box_span = m.box_hi()[s.axis] - box_lo;

  std::vector<double> piece_values;
  if (s.kind == "random-steps") {
    if (s.pieces < 1) throw InvalidInput("random-steps needs pieces >= 1");
    Rng rng(s.seed);
    for (int i = 0; i < s.pieces; ++i) piece_values.push_back(rng.uniform(-1.0, 1.0) * s.amplitude);
  }
  Rng noise(s.seed);

  for (std::size_t k = 0; k < count; ++k) {
    const Point x = m.cell_center(k);
    const double t = x[s.axis];
    double r = 0.0;
    for (int i = 0; i < d; ++i) r += (x[i] - s.center[i]) * (x[i] - s.center[i]);
    r = std::sqrt(r);

    double y = 0.0;
    if (s.kind == "constant") {
      y = s.value;
    } else if (s.kind == "step") {
      y = t < s.threshold ? s.left : s.right;
    } else if (s.kind == "indicator") {
      bool in = true;
      for (int i = 0; i < d; ++i) in = in && x[i] >= s.lo[i] && x[i] < s.hi[i];
      y = in ? s.inside : s.outside;
    } else if (s.kind == "sine") {
      y = s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency * t + s.phase);
    } else if (s.kind == "linear") {
      y = s.slope * t + s.offset;
    } else if (s.kind == "abs") {
      y = s.amplitude * r;
    } else if (s.kind == "log-distance") {
      y = std::log(r + s.eps);
    } else if (s.kind == "bump") {
      y = s.amplitude * std::exp(-(r * r) / (s.width * s.width));
    } else if (s.kind == "sawtooth") {
      const double u = (t - box_lo) / s.period;
      y = s.amplitude * (u - std::floor(u));
    } else if (s.kind == "square") {
      const double u = (t - box_lo) / s.period;
      y = s.amplitude * ((static_cast<long long>(std::floor(u)) % 2 == 0) ? 1.0 : -1.0);
    } else if (s.kind == "chirp") {
      y = s.amplitude * (std::sin(std::numbers::pi * s.frequency * t * t) >= 0.0 ? 1.0 : -1.0);
    } else if (s.kind == "random-steps") {
      int piece = static_cast<int>(std::floor((t - box_lo) / box_span * s.pieces));
      piece = std::clamp(piece, 0, s.pieces - 1);
      y = piece_values[static_cast<std::size_t>(piece)];
    } else if (s.kind == "noise") {
      y = noise.uniform(-1.0, 1.0) * s.amplitude;
    } else {
      throw InvalidInput("unknown function kind '" + s.kind + "'");
    }
    v[k] = y;
  }
  return GridFunction(m, std::move(v));
}

}  // namespace osc
