#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gcilab/ineqlab.hpp"

using namespace gcilab;

namespace {

constexpr double kOneSigma = 0.6826894921370859;  // 2 Phi(1) - 1
constexpr double kRho09Square = 0.5963599497277655;
constexpr double kRho09Wide = 0.6821923740740011;  // c = (2, 1)
constexpr double kTwoSigma = 0.9544997361036416;   // 2 Phi(2) - 1

CorrelationModel bivariate(double rho) {
  Matrix s(2, 2);
  s << 1, rho, rho, 1;
  return CorrelationModel::from_covariance(s);
}

CorrelationModel rank_one(std::size_t n) { return CorrelationModel::from_covariance(Matrix::Ones(n, n)); }

CheckOptions opts(Seed seed) {
  CheckOptions o;
  o.seed = seed;
  return o;
}

}  // namespace

TEST(Verdict, Gate) {
  EXPECT_EQ(classify(0.31, 0.1), Verdict::supported);
  EXPECT_EQ(classify(-0.31, 0.1), Verdict::violated);
  EXPECT_EQ(classify(0.29, 0.1), Verdict::inconclusive);
  EXPECT_EQ(classify(0.0, 0.0), Verdict::supported);
}

TEST(Sidak, SpecExamples) {
  const auto id = check_sidak(CorrelationModel::identity(3), {1.0, 0.5, 2.0}, opts(1));
  EXPECT_LE(std::abs(id.margin), 3 * id.std_error + 1e-15);

  const auto r1 = check_sidak(rank_one(3), {1.0, 1.0, 1.0}, opts(1));
  EXPECT_NEAR(r1.lhs.total().value, kOneSigma, 1e-12);
  EXPECT_NEAR(r1.margin, kOneSigma - std::pow(kOneSigma, 3), 1e-12);
  EXPECT_EQ(r1.verdict, Verdict::supported);

  const auto rho = check_sidak(bivariate(0.5), {1.0, 1.0}, opts(1));
  EXPECT_EQ(rho.verdict, Verdict::supported);
  EXPECT_EQ(rho.backing, Backing::backed);
}

TEST(RefinedSidak, Examples) {
  const auto id = check_refined_sidak(CorrelationModel::identity(2), {1.0, 1.0}, 0.7, 0, opts(2));
  EXPECT_LE(std::abs(id.margin), 3 * id.std_error + 1e-15);

  const auto r = check_refined_sidak(bivariate(0.9), {1.0, 1.0}, 1.0, 0, opts(2));
  EXPECT_EQ(r.verdict, Verdict::supported);
  EXPECT_NEAR(r.margin, kTwoSigma * kRho09Square - kOneSigma * kRho09Wide, 3 * r.std_error + 1e-6);
}

TEST(RefinedSidak, InfiniteWideningIsSidakStep) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = CorrelationModel::random(4, 3, gen());
    const ThresholdVector c{0.8, 1.2, 1.5, 0.6};
    const std::size_t j = static_cast<std::size_t>(trial % 4);
    const auto refined = check_refined_sidak(m, c, kInf, j, opts(trial));
    const auto step = check_sidak_step(m, c, j, opts(trial));
    EXPECT_EQ(refined.margin, step.margin);
    EXPECT_NEAR(refined.std_error, step.std_error, 1e-11);
  }
  EXPECT_THROW(check_refined_sidak(bivariate(0.3), {1.0, 1.0}, 0.0, 0, opts(1)), Error);
}

TEST(SidakRatio, ExamplesAndMonotonicity) {
  EXPECT_NEAR(sidak_ratio(CorrelationModel::identity(3), {1.0, 2.0, 0.5}, opts(1)).value, 1.0, 1e-11);
  EXPECT_NEAR(sidak_ratio(rank_one(2), {1.0, 1.0}, opts(1)).value, 1.0 / kOneSigma, 1e-11);
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> w(0.1, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = CorrelationModel::random(4, 2, gen());
    const ThresholdVector c{w(gen), w(gen), w(gen), w(gen)};
    const std::size_t j = static_cast<std::size_t>(trial % 4);
    const auto base = sidak_ratio(m, c, opts(trial));
    const auto wide = sidak_ratio(m, c.with(j, c[j] + w(gen)), opts(trial));
    EXPECT_GE(base.value, wide.value - 3 * std::hypot(base.std_error, wide.std_error));
    EXPECT_GE(base.value, 1.0 - 3 * base.std_error);
  }
}

TEST(Royen, Examples) {
  const CorrelationModel blocks[] = {bivariate(0.6), bivariate(-0.4)};
  const auto bd = check_royen(CorrelationModel::block_diagonal(blocks), {1.0, 1.2, 0.7, 1.5}, 2, opts(4));
  EXPECT_LE(std::abs(bd.margin), 3 * bd.std_error);

  const auto r1 = check_royen(rank_one(2), {1.0, 1.0}, 1, opts(4));
  EXPECT_NEAR(r1.margin, kOneSigma - kOneSigma * kOneSigma, 1e-11);
  EXPECT_EQ(r1.verdict, Verdict::supported);

  for (Seed s = 0; s < 5; ++s) {
    const auto r = check_royen(CorrelationModel::random(4, 3, s), {1.0, 1.0, 1.0, 1.0}, 2, opts(s));
    EXPECT_NE(r.verdict, Verdict::violated);
  }
  EXPECT_THROW(check_royen(rank_one(2), {1.0, 1.0}, 2, opts(1)), Error);
}

TEST(StrongBands, EqualThresholdsAndIdentity) {
  const auto m = CorrelationModel::random(3, 2, 5);
  const ThresholdVector s{0.7, 1.1, 0.9};
  const auto same = check_strong_gci_bands(m, s, s, opts(5));
  EXPECT_EQ(same.verdict, Verdict::supported);
  EXPECT_EQ(same.backing, Backing::exploratory);

  // Identity model: each coordinate is the 1-D statement, which holds.
  const auto id = check_strong_gci_bands(CorrelationModel::identity(2), {0.5, 2.0}, {1.5, 0.3}, opts(5));
  const double p = [] {
    auto g = [](double c) { return std_normal_symmetric(c); };
    return g(2.0) * g(2.3) * g(0.5) * g(0.3) - g(0.5) * g(2.0) * g(1.5) * g(0.3);
  }();
  EXPECT_NEAR(id.margin, p, 1e-11);
}

TEST(StrongGci2d, EqualBodiesAndExample) {
  const auto p = Polygon2D::rotated_box(1.0, 0.4, 0.3);
  EXPECT_EQ(check_strong_gci_2d(p, p, opts(6)).verdict, Verdict::supported);
  const auto k = Polygon2D::box(1.0 / 3, 3);
  CheckOptions o = opts(6);
  o.engine = Engine::oracle;
  const auto r = check_strong_gci_2d(k, k.transposed(), o);
  EXPECT_EQ(r.verdict, Verdict::supported);
}

TEST(Slab, Examples) {
  const auto sq = Polygon2D::box(1, 1);
  const auto inside = check_slab(sq, {0, 1}, 1.0, opts(7));
  EXPECT_EQ(inside.margin, 0.0);

  // Axis-aligned boxes against axis slabs factor into 1-D terms: equality.
  CheckOptions o = opts(7);
  o.engine = Engine::oracle;
  const auto axis = check_slab(sq, {0, 1}, 0.5, o);
  EXPECT_LE(std::abs(axis.margin), 3 * axis.std_error);
  EXPECT_EQ(check_slab(Polygon2D::rotated_box(1, 1, 0.5), {0, 1}, 0.5, o).verdict, Verdict::supported);
  EXPECT_EQ(check_slab(Polygon2D::rotated_box(3.0, 0.1, 1.2), {1, 0}, 0.5, opts(7)).verdict, Verdict::supported);

  const SymmetricBand band(CorrelationModel::random(3, 2, 2), {1.0, 0.8, 1.3});
  Vector u(2);
  u << 0.3, 1.0;
  const auto r = check_slab(band, u, 0.4, opts(7));
  EXPECT_NE(r.verdict, Verdict::violated);
}

TEST(Unconditional, BoxesAndDiamond) {
  const std::vector<double> a{1.0, 0.3}, b{0.4, 2.0};
  const auto r = check_unconditional(HPolytope::box(a), HPolytope::box(b), opts(8));
  EXPECT_NE(r.verdict, Verdict::violated);
  const auto d = HPolytope::from_polygon(Polygon2D::diamond(2.0, 0.5));
  EXPECT_NE(check_unconditional(d, HPolytope::box(b), opts(8)).verdict, Verdict::violated);
  EXPECT_NE(check_unconditional(d, d, opts(8)).verdict, Verdict::violated);
  try {
    check_unconditional(HPolytope::from_polygon(Polygon2D::rotated_box(1, 0.5, 0.3)), d, opts(8));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotUnconditional);
  }
}

TEST(Unconditional, ThreeDimensionalFallsBackToMonteCarlo) {
  const std::vector<double> a{1.0, 0.3, 0.8}, b{0.4, 2.0, 0.5};
  CheckOptions o = opts(9);
  o.mc_budget = 20000;
  const auto r = check_unconditional(HPolytope::box(a), HPolytope::box(b), o);
  EXPECT_NE(r.verdict, Verdict::violated);
  EXPECT_EQ(r.lhs.terms[0].p.method, Method::mc);
}

TEST(LatticePremise, HoldsOnUnconditionalPairs) {
  const std::vector<double> a{1.0, 0.3}, b{0.4, 2.0};
  EXPECT_EQ(check_lattice_premise(HPolytope::box(a), HPolytope::box(b), 200, 1).pairs, 200u);
  const auto d = HPolytope::from_polygon(Polygon2D::diamond(2.0, 0.5));
  const auto oct = HPolytope::from_polygon(Polygon2D::from_points({{1, 0.3}, {0.3, 1}, {-0.3, 1}, {-1, 0.3}, {-1, -0.3}, {-0.3, -1}, {0.3, -1}, {1, -0.3}}));
  EXPECT_EQ(check_lattice_premise(d, oct, 500, 2).pairs, 500u);
  EXPECT_THROW(check_lattice_premise(HPolytope::from_polygon(Polygon2D::rotated_box(1, 0.5, 0.3)), d, 10, 1), Error);
}

TEST(Tehranchi, Examples) {
  const auto m = CorrelationModel::identity(2);
  EXPECT_NE(check_tehranchi(m, {1.0, 0.5}, {0.3, 1.5}, 0.0, 0.0, opts(10)).verdict, Verdict::violated);
  EXPECT_NE(check_tehranchi(m, {1.0, 1.0}, {1.0, 1.0}, 0.25, 0.5, opts(10)).verdict, Verdict::violated);
  const auto r = CorrelationModel::random(3, 2, 4);
  EXPECT_NE(check_tehranchi(r, {1.0, 0.6, 2.0}, {0.4, 1.5, 0.9}, 0.1, 0.4, opts(10)).verdict, Verdict::violated);
  EXPECT_THROW(check_tehranchi(m, {1.0, 1.0}, {1.0, 1.0}, 0.25, 0.4, opts(10)), Error);
  EXPECT_THROW(check_tehranchi(m, {1.0, 1.0}, {1.0, 1.0}, 0.0, 1.0, opts(10)), Error);
}

TEST(HullCounterexample, ReductionAndCoincidentBodies) {
  CheckOptions o = opts(11);
  o.engine = Engine::oracle;
  const auto r = hull_counterexample(3.0, o);
  EXPECT_EQ(r.verdict, Verdict::violated);
  EXPECT_EQ(r.backing, Backing::exploratory);
  EXPECT_NEAR(r.trace["reduction"]["gamma1_N"].get<double>(), 0.9973002039367398, 1e-9);
  EXPECT_NEAR(r.trace["reduction"]["gamma1_radius"].get<double>(), 0.981577874545901, 1e-9);
  EXPECT_GE(r.trace["reduction"]["difference"].get<double>(), 0.01);

  const auto one = hull_counterexample(1.0, opts(11));
  EXPECT_EQ(one.margin, 0.0);

  // The violation shrinks as N grows: margins rise toward 0 from below.
  const double m25 = hull_counterexample(2.5, o).margin, m3 = r.margin, m4 = hull_counterexample(4.0, o).margin;
  EXPECT_LT(m25, m3);
  EXPECT_LT(m3, m4);
  EXPECT_LT(m4, 0.0);
}

TEST(Tensorize, Identities) {
  const auto id = tensorize_check(CorrelationModel::identity(2), {1.0, 0.5}, {0.7, 1.2}, 2, opts(12));
  EXPECT_NE(id.verdict, Verdict::violated);
  const auto r1 = tensorize_check(rank_one(2), {1.0, 0.5}, {0.7, 1.2}, 2, opts(12));
  EXPECT_EQ(r1.verdict, Verdict::supported);
  const auto rnd = tensorize_check(CorrelationModel::random(3, 2, 7), {1.0, 0.5, 0.8}, {0.7, 1.2, 0.4}, 3, opts(12));
  EXPECT_EQ(rnd.verdict, Verdict::supported);
  EXPECT_THROW(tensorize_check(rank_one(2), {1.0, 1.0}, {1.0, 1.0}, 4, opts(1)), Error);
}

TEST(RogersShephard, Squares) {
  const auto r = check_rogers_shephard(Polygon2D::box(1, 1), Polygon2D::box(2, 0.5));
  EXPECT_NEAR(r.margin, 18.0 * 2.0 - 4.0 * 4.0, 1e-12);
  EXPECT_EQ(r.verdict, Verdict::supported);
}

TEST(Report, JsonShape) {
  const auto r = check_sidak(CorrelationModel::identity(2), {1.0, kInf}, opts(1));
  const json j = to_json(r);
  EXPECT_EQ(j["label"], "sidak");
  EXPECT_EQ(j["instance"]["thresholds"][1], "inf");
  EXPECT_EQ(j["verdict"], "inconclusive");  // independence: equality
  EXPECT_EQ(j["lhs"]["terms"].size(), 1u);
  EXPECT_EQ(j["rhs"]["terms"].size(), 2u);
}
