#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace osc;

namespace {

bool covered(const CoverInstance& inst, const CoverResult& r) {
  for (const Point& x : inst.points) {
    bool hit = false;
    for (std::size_t i : r.selected) hit = hit || inst.assigned[i].contains_point(x);
    if (!hit) return false;
  }
  return true;
}

TEST(Cover, EmptyInstance) {
  CoverInstance inst;
  const CoverResult r = besicovitch_cover(inst);
  EXPECT_TRUE(r.selected.empty());
  EXPECT_EQ(r.max_overlap, 0);
}

TEST(Cover, Singleton) {
  CoverInstance inst;
  inst.dim = 2;
  inst.points = {{1, 2, 0}};
  inst.assigned = {Cube({1, 2, 0}, 0.5, 2)};
  const CoverResult r = besicovitch_cover(inst);
  EXPECT_EQ(r.selected, std::vector<std::size_t>{0});
  EXPECT_EQ(r.max_overlap, 1);
}

TEST(Cover, RejectsMisassignedCubes) {
  CoverInstance inst;
  inst.points = {{0, 0, 0}};
  inst.assigned = {Cube({0.1, 0, 0}, 1, 1)};
  EXPECT_THROW(besicovitch_cover(inst), InvalidInput);
}

TEST(Cover, TieBreakIsLexicographic) {
  CoverInstance inst;
  inst.points = {{2, 0, 0}, {1, 0, 0}};
  inst.assigned = {Cube({2, 0, 0}, 3, 1), Cube({1, 0, 0}, 3, 1)};
  EXPECT_EQ(besicovitch_cover(inst).selected, std::vector<std::size_t>{1});
}

TEST(Cover, OneDimensionalAgainstStabbingOracle) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto inst = random_cover_instance(1, 50 + seed, 0, 10, 0.1, 2, seed);
    const CoverResult r = besicovitch_cover(inst);
    ASSERT_TRUE(covered(inst, r));
    std::vector<std::pair<double, double>> iv;
    for (std::size_t i : r.selected) iv.emplace_back(inst.assigned[i].lo(0), inst.assigned[i].hi(0));
    EXPECT_EQ(r.max_overlap, oracle::interval_stabbing_depth(iv));
    EXPECT_LE(r.max_overlap, 2);
  }
}

TEST(Cover, MinimalityAndCoverageInHigherDimensions) {
  for (int d : {2, 3})
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto inst = random_cover_instance(d, 200, 0, 10, 0.1, 2, seed * 31 + d);
      const CoverResult r = besicovitch_cover(inst);
      EXPECT_TRUE(covered(inst, r));
      // No selected center lies in an earlier selected cube.
      for (std::size_t a = 0; a < r.selected.size(); ++a)
        for (std::size_t b = 0; b < a; ++b)
          EXPECT_FALSE(inst.assigned[r.selected[b]].contains_point(inst.points[r.selected[a]]));
      EXPECT_LE(r.max_overlap, 1 << d);
      std::size_t total = 0;
      for (const auto& [depth, n] : r.overlap_histogram) total += n;
      EXPECT_EQ(total, r.probe_count);
    }
}

TEST(Cover, ProbeSetFindsArrangementMaximum) {
  // Brute force over a fine lattice never beats the probe-set maximum.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = random_cover_instance(2, 60, 0, 5, 0.2, 2, seed);
    const CoverResult r = besicovitch_cover(inst);
    int best = 0;
    for (double x = -1; x <= 6; x += 0.02)
      for (double y = -1; y <= 6; y += 0.02) {
        int depth = 0;
        for (std::size_t i : r.selected) depth += inst.assigned[i].contains_point({x, y, 0});
        best = std::max(best, depth);
      }
    EXPECT_LE(best, r.max_overlap);
  }
}

}  // namespace
