#include <gtest/gtest.h>

#include <cmath>

#include "gcilab/search.hpp"

using namespace gcilab;

TEST(NelderMead, Quadratic) {
  const auto f = [](const std::vector<double>& x) { return (x[0] - 1) * (x[0] - 1) + 3 * (x[1] + 0.5) * (x[1] + 0.5); };
  const auto r = nelder_mead(f, {0, 0}, {-5, -5}, {5, 5}, 200);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], -0.5, 1e-4);
  EXPECT_LT(r.value, 1e-8);
}

TEST(NelderMead, RespectsBoundsAndZeroIterations) {
  const auto f = [](const std::vector<double>& x) { return x[0]; };
  EXPECT_NEAR(nelder_mead(f, {0.3}, {-1}, {1}, 100).x[0], -1.0, 1e-12);
  const auto once = nelder_mead(f, {3.0}, {-1}, {1}, 0);
  EXPECT_EQ(once.evaluations, 1u);
  EXPECT_EQ(once.x[0], 1.0);
}

TEST(Search, HullRectanglesFindsViolation) {
  CheckOptions o;
  o.seed = 3;
  o.qmc.budget = 4096;
  const auto r = search_counterexample(Family::hull_rectangles, 15, o);
  EXPECT_LT(r.best.margin, -3 * r.best.std_error);
  EXPECT_EQ(r.best.verdict, Verdict::violated);
  EXPECT_EQ(to_json(r)["family"], "hull-rectangles");
}

TEST(Search, SingleStepReturnsInitialInstance) {
  CheckOptions o;
  o.seed = 1;
  const auto r = search_counterexample(Family::hull_rectangles, 1, o);
  EXPECT_EQ(r.evaluations, 1u);
  EXPECT_EQ(r.best.margin, hull_counterexample(1.0, o).margin);
}

TEST(Search, BandTriplesDeterministicAndNoViolation) {
  CheckOptions o;
  o.seed = 4;
  o.qmc.budget = 4096;
  const auto a = search_counterexample(Family::band_triples, 6, o);
  const auto b = search_counterexample(Family::band_triples, 6, o);
  EXPECT_EQ(a.best.margin, b.best.margin);
  EXPECT_EQ(a.params, b.params);
  EXPECT_NE(a.best.verdict, Verdict::violated);
}

TEST(Search, RotatedBoxesRuns) {
  CheckOptions o;
  o.seed = 2;
  o.qmc.budget = 4096;
  const auto r = search_counterexample(Family::rotated_boxes, 4, o);
  EXPECT_EQ(r.params.size(), 3u);
  EXPECT_GT(r.evaluations, 5u);
  EXPECT_THROW(parse_family("spheres"), Error);
}
