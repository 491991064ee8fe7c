#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gcilab/normal.hpp"
#include "gcilab/quadrature.hpp"

using namespace gcilab;

namespace {

// Independent oracle: adaptive quadrature of the density from 0 to x.
double quadrature_cdf(double x) {
  const auto half = integrate([](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); },
                              0.0, std::abs(x), 1e-15);
  return x >= 0 ? 0.5 + half.value : 0.5 - half.value;
}

// Bisection against the quadrature CDF.
double bisect_quantile(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (quadrature_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(StdNormalCdf, SymmetryAndBoundaries) {
  EXPECT_EQ(std_normal_cdf(0.0), 0.5);
  EXPECT_EQ(std_normal_cdf(kInf), 1.0);
  EXPECT_EQ(std_normal_cdf(-kInf), 0.0);
}

TEST(StdNormalCdf, MatchesQuadratureOracle) {
  EXPECT_NEAR(quadrature_cdf(1.0), 0.841344746068543, 1e-14);
  for (double x = -8.0; x <= 8.0; x += 0.37) EXPECT_NEAR(std_normal_cdf(x), quadrature_cdf(x), 1e-12) << x;
}

TEST(InvStdNormalCdf, KnownValues) {
  EXPECT_NEAR(inv_std_normal_cdf(0.5), 0.0, 1e-15);
  const double oracle = bisect_quantile(0.975);
  EXPECT_NEAR(oracle, 1.959963984540054, 1e-9);
  EXPECT_NEAR(inv_std_normal_cdf(0.975), oracle, 1e-10);
}

TEST(InvStdNormalCdf, RoundTripAndSymmetry) {
  for (double p : {1e-12, 1e-6, 0.01, 0.1, 0.3, 0.5, 0.77, 0.9, 0.999, 1 - 1e-9})
    EXPECT_NEAR(std_normal_cdf(inv_std_normal_cdf(p)), p, 1e-10) << p;
  // p and 1-p must both be representable exactly for the mirror check.
  for (double p : {0.0625, 0.125, 0.25, 0.375, 0.5, 0.8125, 0.96875})
    EXPECT_NEAR(inv_std_normal_cdf(p), -inv_std_normal_cdf(1.0 - p), 1e-10) << p;
  for (double tail : {1e-12, 1e-30, 1e-200}) EXPECT_NEAR(inv_std_normal_upper(tail), -inv_std_normal_cdf(tail), 1e-10);
}

TEST(InvStdNormalCdf, RejectsOutOfRange) {
  for (double p : {0.0, 1.0, -0.1, 1.5}) {
    try {
      inv_std_normal_cdf(p);
      FAIL() << p;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
    }
  }
}

TEST(StdNormalInterval, TailsKeepPrecision) {
  EXPECT_NEAR(std_normal_interval(8.0, kInf), 6.220960574271784e-16, 1e-28);
  EXPECT_NEAR(std_normal_interval(-kInf, -8.0), 6.220960574271784e-16, 1e-28);
  EXPECT_NEAR(std_normal_symmetric(1.0), 0.682689492137086, 1e-14);
  EXPECT_EQ(std_normal_interval(1.0, 1.0), 0.0);
}
