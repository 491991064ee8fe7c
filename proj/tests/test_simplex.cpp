#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gcilab/simplex.hpp"

using namespace gcilab;

namespace {

Matrix box_rows(int d) {
  Matrix a(2 * d, d);
  a << Matrix::Identity(d, d), -Matrix::Identity(d, d);
  return a;
}

}  // namespace

TEST(Simplex, BoxSupport) {
  const Matrix a = box_rows(3);
  Vector b(6);
  b << 1, 2, 3, 1, 2, 3;
  Vector c(3);
  c << 1, -1, 0.5;
  const auto r = lp::maximize(a, b, c);
  ASSERT_EQ(r.status, lp::Status::optimal);
  EXPECT_NEAR(r.objective, 1 + 2 + 1.5, 1e-12);
  EXPECT_NEAR(r.x(0), 1.0, 1e-12);
  EXPECT_NEAR(r.x(1), -2.0, 1e-12);
}

TEST(Simplex, NegativeRightHandSideNeedsPhaseOne) {
  // x >= 1, x <= 2 written as -x <= -1, x <= 2.
  Matrix a(2, 1);
  a << -1, 1;
  Vector b(2);
  b << -1, 2;
  Vector c(1);
  c << -1;
  const auto r = lp::maximize(a, b, c);
  ASSERT_EQ(r.status, lp::Status::optimal);
  EXPECT_NEAR(r.x(0), 1.0, 1e-12);
}

TEST(Simplex, Infeasible) {
  Matrix a(2, 1);
  a << 1, -1;
  Vector b(2);
  b << -1, -1;  // x <= -1 and x >= 1
  EXPECT_EQ(lp::maximize(a, b, Vector::Ones(1)).status, lp::Status::infeasible);
  EXPECT_FALSE(lp::feasible(a, b));
}

TEST(Simplex, Unbounded) {
  Matrix a(1, 2);
  a << 1, 0;
  Vector b(1);
  b << 1;
  Vector c(2);
  c << 0, 1;
  const auto r = lp::maximize(a, b, c);
  EXPECT_EQ(r.status, lp::Status::unbounded);
  EXPECT_TRUE(std::isinf(r.objective));
}

TEST(Simplex, DegenerateVertexTerminates) {
  // Many constraints through the same optimal vertex (1, 1).
  Matrix a(8, 2);
  a << 1, 0, 0, 1, 1, 1, 2, 1, 1, 2, 3, 1, -1, 0, 0, -1;
  Vector b(8);
  b << 1, 1, 2, 3, 3, 4, 5, 5;
  Vector c(2);
  c << 1, 1;
  const auto r = lp::maximize(a, b, c);
  ASSERT_EQ(r.status, lp::Status::optimal);
  EXPECT_NEAR(r.objective, 2.0, 1e-12);
}

TEST(Simplex, PolygonSupportMatchesVertexMaximum) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 6;
    Matrix a(2 * m, 2);
    Vector b(2 * m);
    for (int i = 0; i < m; ++i) {
      const double t = M_PI * i / m + 0.1 * g(gen) / m;
      a.row(i) << std::cos(t), std::sin(t);
      a.row(i + m) = -a.row(i);
      b(i) = b(i + m) = 1.0 + 0.2 * std::abs(g(gen));
    }
    Vector c(2);
    c << g(gen), g(gen);
    const auto r = lp::maximize(a, b, c);
    ASSERT_EQ(r.status, lp::Status::optimal);
    EXPECT_TRUE(((a * r.x - b).array() <= 1e-9).all());
    // Optimum sits at the intersection of two active constraints.
    int active = 0;
    for (int i = 0; i < 2 * m; ++i)
      if (std::abs(a.row(i).dot(r.x) - b(i)) < 1e-9) ++active;
    EXPECT_GE(active, 2);
  }
}

TEST(Simplex, ShapeMismatch) {
  EXPECT_THROW(lp::maximize(Matrix::Ones(2, 2), Vector::Ones(3), Vector::Ones(2)), Error);
}
