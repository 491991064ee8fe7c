#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gcilab/geometry.hpp"

using namespace gcilab;

namespace {

Polygon2D random_polygon(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.2, 2.0), ang(0.0, std::numbers::pi);
  std::uniform_int_distribution<int> count(2, 5);
  std::vector<Vec2> pts;
  const int m = count(gen);
  for (int i = 0; i < m; ++i) {
    const double r = u(gen), t = ang(gen);
    pts.push_back({r * std::cos(t), r * std::sin(t)});
    pts.push_back({-r * std::cos(t), -r * std::sin(t)});
  }
  pts.push_back({u(gen), 0.05});
  pts.push_back({-pts.back().x, -0.05});
  return Polygon2D::from_points(pts);
}

Vec2 unit(double t) { return {std::cos(t), std::sin(t)}; }

}  // namespace

TEST(Polygon, CanonicalForm) {
  const auto p = Polygon2D::from_points({{1, 1}, {-1, -1}, {0, 0}, {1, -1}, {-1, 1}, {1, 0}, {-1, 0}, {1, 1}});
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p.vertices().front(), (Vec2{-1, -1}));
  EXPECT_EQ(p.vertices()[1], (Vec2{1, -1}));
  EXPECT_DOUBLE_EQ(p.area(), 4.0);
}

TEST(Polygon, RejectsDegenerateAndAsymmetric) {
  EXPECT_THROW(Polygon2D::from_points({{1, 1}, {-1, -1}}), Error);
  try {
    Polygon2D::from_points({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSymmetric);
  }
}

TEST(Polygon, MinkowskiSumHomothety) {
  const auto p = Polygon2D::regular(3, 1.3, 0.2);
  const auto s = polygon_minkowski_sum(p, p);
  ASSERT_EQ(s.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_NEAR(s.vertices()[i].x, 2 * p.vertices()[i].x, 1e-12);
    EXPECT_NEAR(s.vertices()[i].y, 2 * p.vertices()[i].y, 1e-12);
  }
}

TEST(Polygon, SquarePlusRotatedSquareIsOctagon) {
  const auto sq = Polygon2D::box(1, 1);
  const auto rot = Polygon2D::rotated_box(1, 1, std::numbers::pi / 4);
  const auto s = polygon_minkowski_sum(sq, rot);
  EXPECT_EQ(s.size(), 8u);
  EXPECT_NEAR(support_function(s, {1, 0}), 1 + std::sqrt(2.0), 1e-12);
}

TEST(Polygon, ExampleRectanglesSum) {
  const auto k = Polygon2D::box(1.0 / 3, 3);
  const auto s = polygon_minkowski_sum(k, k.transposed());
  EXPECT_NEAR(support_function(s, {1, 0}), 10.0 / 3, 1e-12);
  EXPECT_NEAR(support_function(s, {0, 1}), 10.0 / 3, 1e-12);
}

TEST(Polygon, SupportAdditivityOnRandomPairs) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_polygon(gen), q = random_polygon(gen);
    const auto s = polygon_minkowski_sum(p, q);
    EXPECT_LE(s.size(), p.size() + q.size());
    for (int k = 0; k < 64; ++k) {
      const Vec2 u = unit(2 * std::numbers::pi * k / 64.0 + 0.01);
      EXPECT_NEAR(support_function(s, u), support_function(p, u) + support_function(q, u), 1e-9);
    }
  }
}

TEST(Polygon, HullUnion) {
  const auto k = Polygon2D::box(1.0 / 3, 3);
  const auto h = convex_hull_union(k, k.transposed());
  const auto diamond = Polygon2D::diamond(10.0 / 3, 10.0 / 3);
  for (const auto& v : h.vertices()) EXPECT_TRUE(contains(diamond, v));
  EXPECT_EQ(convex_hull_union(k, k), k);
  EXPECT_EQ(convex_hull_union(Polygon2D::box(1, 1), Polygon2D::box(2, 2)), Polygon2D::box(2, 2));

  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_polygon(gen), q = random_polygon(gen);
    const auto u = convex_hull_union(p, q);
    for (const auto& v : p.vertices()) EXPECT_TRUE(contains(u, v));
    for (const auto& v : q.vertices()) EXPECT_TRUE(contains(u, v));
    for (const auto& v : u.vertices()) {
      const bool from_input = std::ranges::find(p.vertices(), v) != p.vertices().end() ||
                              std::ranges::find(q.vertices(), v) != q.vertices().end();
      EXPECT_TRUE(from_input);
    }
  }
}

TEST(Polygon, IntersectionSemantics) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_polygon(gen), q = random_polygon(gen);
    const auto i = polygon_intersection(p, q);
    EXPECT_LE(i.area(), std::min(p.area(), q.area()) + 1e-12);
    for (int k = 0; k < 100; ++k) {
      const Vec2 x{g(gen), g(gen)};
      if (contains(i, x)) {
        EXPECT_TRUE(contains(p, x));
        EXPECT_TRUE(contains(q, x));
      }
    }
  }
}

TEST(Polygon, RogersShephardArea) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_polygon(gen), q = random_polygon(gen);
    const double lhs = polygon_minkowski_sum(p, q).area() * polygon_intersection(p, q).area();
    EXPECT_GE(lhs, p.area() * q.area() - 1e-9);
  }
}

TEST(Band, ThresholdAlgebra) {
  const auto m = CorrelationModel::identity(2);
  const SymmetricBand k(m, {1.0, 2.0}), t(m, {2.0, 1.0});
  EXPECT_EQ(band_intersect(k, t).thresholds(), (ThresholdVector{1.0, 1.0}));
  EXPECT_EQ(band_sum_outer(k, k).thresholds(), (ThresholdVector{2.0, 4.0}));
  const SymmetricBand inf(m, ThresholdVector::unbounded(2));
  EXPECT_EQ(band_intersect(k, inf).thresholds(), k.thresholds());
  EXPECT_EQ(band_sum_outer(k, inf).thresholds(), inf.thresholds());
  const SymmetricBand a(m, {1.0, kInf}), b(m, {kInf, 1.0});
  EXPECT_EQ(band_sum_outer(a, b).thresholds(), inf.thresholds());
  const SymmetricBand other(CorrelationModel::equicorrelated(2, 0.5), {1.0, 1.0});
  try {
    band_intersect(k, other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ModelMismatch);
  }
}

TEST(Band, SupportFunction) {
  Matrix u(1, 2);
  u << 2, 0;
  const SymmetricBand slab(CorrelationModel::from_factor_rows(u), {0.5});
  // |2 y_1| <= 0.5: h(u_1) = c_1 ||u_1||.
  EXPECT_NEAR(support_function(slab, Vector::Unit(2, 0) * 2), 0.5, 1e-12);
  EXPECT_TRUE(std::isinf(support_function(slab, Vector::Unit(2, 1))));
  EXPECT_THROW(support_function(slab, Vector::Zero(2)), Error);
}

TEST(Band, Containment) {
  const auto m = CorrelationModel::random(3, 2, 4);
  const SymmetricBand k(m, {1.0, 1.0, 1.0});
  EXPECT_TRUE(contains(k, Vector::Zero(2)));
  const Vector u1 = m.row(0);
  EXPECT_FALSE(contains(k, u1 * (1.0 + 1e-6) / u1.squaredNorm()));
  EXPECT_THROW(contains(k, Vector::Zero(3)), Error);
}

TEST(Band, FromPolygonMatchesPolygon) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> g;
  const auto p = random_polygon(gen);
  const auto b = SymmetricBand::from_polygon(p);
  for (int k = 0; k < 500; ++k) {
    const Vec2 x{g(gen), g(gen)};
    Vector y(2);
    y << x.x, x.y;
    EXPECT_EQ(contains(p, x), contains(b, y));
  }
}

TEST(HPolytope, SupportAndBoundedness) {
  const std::vector<double> w{1.0, 2.0, 0.5};
  const auto box = HPolytope::box(w);
  EXPECT_TRUE(box.is_bounded());
  EXPECT_TRUE(box.is_unconditional());
  Vector u(3);
  u << 1, -1, 2;
  EXPECT_NEAR(box.support(u), 1 + 2 + 1, 1e-12);

  Matrix n(1, 2);
  n << 1, 0;
  const auto slab = HPolytope::from_halfspaces(n, Vector::Ones(1));
  EXPECT_FALSE(slab.is_bounded());

  const auto p = Polygon2D::rotated_box(1, 0.5, 0.3);
  EXPECT_FALSE(HPolytope::from_polygon(p).is_unconditional());
  EXPECT_TRUE(HPolytope::from_polygon(Polygon2D::diamond(1, 2)).is_unconditional());
}

TEST(HPolytope, PolygonRoundTrip) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_polygon(gen);
    const auto back = polygon_from_hpolytope(HPolytope::from_polygon(p));
    ASSERT_EQ(back.size(), p.size());
    EXPECT_NEAR(back.area(), p.area(), 1e-9);
    for (int k = 0; k < 16; ++k) {
      const Vec2 u = unit(0.4 * k);
      Vector v(2);
      v << u.x, u.y;
      EXPECT_NEAR(HPolytope::from_polygon(p).support(v), support_function(p, u), 1e-9);
    }
  }
}

TEST(HPolytope, MinkowskiMembershipMatchesPolygonSum) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = random_polygon(gen), q = random_polygon(gen);
    const auto s = polygon_minkowski_sum(p, q);
    const auto hp = HPolytope::from_polygon(p), hq = HPolytope::from_polygon(q);
    int agree = 0, total = 0, borderline = 0;
    for (int k = 0; k < 200; ++k) {
      const Vec2 x{2 * g(gen), 2 * g(gen)};
      Vector y(2);
      y << x.x, x.y;
      // Skip points within 1e-7 of the boundary where tolerances differ.
      double gap = kInf;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto [n, off] = s.facet(i);
        gap = std::min(gap, std::abs(dot(n, x) - off));
      }
      if (gap < 1e-7) {
        ++borderline;
        continue;
      }
      ++total;
      if (minkowski_contains(hp, hq, y) == contains(s, x)) ++agree;
    }
    EXPECT_EQ(agree, total);
  }
}

TEST(HPolytope, MinkowskiWitnessAndSeparation) {
  const std::vector<double> a{1.0, 2.0}, b{0.5, 0.5};
  const auto k = HPolytope::box(a), t = HPolytope::box(b);
  Vector x(2);
  x << 1.5, -2.5;
  EXPECT_TRUE(minkowski_contains(k, t, x));
  x << 1.5 + 1e-6, 0;
  EXPECT_FALSE(minkowski_contains(k, t, x));
  EXPECT_THROW(minkowski_contains(k, t, Vector::Zero(3)), Error);
}

TEST(Polygon2D, SumKeepsSymmetryWithNoisyParallelEdges) {
  // vertices carry last-bit noise from an H- to V-description round trip
  const auto p = Polygon2D::from_points({{1.4957835147654679, -2.4622150620241743}, {1.7901689977758288, -1.8746144180786906},
                                         {1.8047595736359758, -0.45674607368275266}, {1.8047595736359758, 0.45674607368273668},
                                         {1.7901689977758288, 1.8746144180786908}, {1.4957835147654677, 2.4622150620241743},
                                         {-1.4957835147654679, 2.4622150620241743}, {-1.7901689977758288, 1.874614418078691},
                                         {-1.8047595736359758, 0.45674607368275311}, {-1.8047595736359758, -0.45674607368273623},
                                         {-1.7901689977758288, -1.8746144180786906}, {-1.4957835147654677, -2.4622150620241738}});
  const auto q = Polygon2D::from_points({{-2.2763564447780618, -1.6284888074510016}, {2.2763564447780622, -1.6284888074510013},
                                         {2.2763564447780618, 1.6284888074510013}, {-2.2763564447780618, 1.6284888074510013}});
  const auto sum = polygon_minkowski_sum(p, q);
  EXPECT_EQ(sum.size(), 12u);
  EXPECT_NEAR(sum.area(), p.area() + q.area() + 4 * (2.2763564447780618 * 2.4622150620241743 + 1.6284888074510013 * 1.8047595736359758), 1e-9);
}

TEST(Polygon2D, HullKeepsCornersOnNoisyVerticalEdges) {
  const std::vector<Vec2> pts{{-2.8003956343503544, -4.6443897287960372}, {1.0814559461207587, -4.6443897287960372},
                              {2.8003956343503544, -4.6443897287960372},  {2.8684568618744031, -2.934877938171137},
                              {2.8684568618744031, 1.5508743489503805},   {2.8684568618744031, 2.9348779381711378},
                              {2.8003956343503544, 4.6443897287960372},   {-1.0814559461207596, 4.6443897287960372},
                              {-2.8003956343503553, 4.6443897287960372},  {-2.868456861874404, 2.934877938171137},
                              {-2.8684568618744031, -1.5508743489503805}, {-2.8684568618744031, -2.9348779381711378}};
  const auto p = Polygon2D::from_points(pts);
  EXPECT_EQ(p.size(), 8u);
}
