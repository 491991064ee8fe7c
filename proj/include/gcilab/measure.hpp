#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "gcilab/error.hpp"
#include "gcilab/estimate.hpp"
#include "gcilab/geometry.hpp"
#include "gcilab/mvn.hpp"
#include "gcilab/parallel.hpp"
#include "gcilab/rng.hpp"

namespace gcilab {

inline constexpr std::uint64_t kMinMcBudget = 10000;
inline constexpr std::uint64_t kMcBatch = 1 << 16;

/// How polygon measures are evaluated.
enum class Engine { qmc, mc, oracle };

inline std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::qmc: return "qmc";
    case Engine::mc: return "mc";
    case Engine::oracle: return "oracle";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Content seeds: a body measured twice under one run seed gets the same stream,
// so identical bodies give identical estimates.

inline void hash_into(ContentHash& h, const Polygon2D& p) {
  h.add("polygon");
  for (const auto& v : p.vertices()) h.add(v.x).add(v.y);
}
inline void hash_into(ContentHash& h, const SymmetricBand& b) {
  h.add("band");
  b.model().hash_into(h);
  h.add(std::span<const double>(b.thresholds().values()));
}
inline void hash_into(ContentHash& h, const HPolytope& p) {
  h.add("hpolytope");
  h.add(std::span<const double>(p.normals().data(), static_cast<std::size_t>(p.normals().size())));
  h.add(std::span<const double>(p.offsets().data(), static_cast<std::size_t>(p.offsets().size())));
}

template <typename... Bodies>
Seed content_seed(Seed seed, const Bodies&... bodies) {
  ContentHash h;
  (hash_into(h, bodies), ...);
  return derive_seed(seed, h.value());
}

// ---------------------------------------------------------------------------

/// gamma_d of {|<y, u_i>| <= c_i}: the rectangle probability under Sigma = Gram(U).
inline ProbabilityEstimate gauss_measure_band(const SymmetricBand& k, const QmcOptions& opts, Seed seed) {
  return symmetric_rect_prob(k.model(), k.thresholds(), opts, seed);
}

inline ProbabilityEstimate gauss_measure_band_oracle(const SymmetricBand& k) {
  std::vector<double> lo(k.thresholds().size()), hi(k.thresholds().size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    hi[i] = k.thresholds()[i];
    lo[i] = -hi[i];
  }
  return oracle_rect_prob(k.model(), lo, hi);
}

/// Fraction of standard Gaussian samples landing in the body; binomial stderr.
/// `inside` receives each sample as an Eigen vector of length `dim`.
template <typename Inside>
ProbabilityEstimate gauss_measure_mc_by(Inside&& inside, std::size_t dim, std::uint64_t budget, Seed seed) {
  if (budget < kMinMcBudget) fail(ErrorCode::BudgetTooSmall, "Monte Carlo budget must be at least 10000");
  const std::size_t batches = static_cast<std::size_t>((budget + kMcBatch - 1) / kMcBatch);
  std::vector<std::uint64_t> hits(batches, 0);
  parallel_for(batches, [&](std::size_t b) {
    const std::uint64_t n = std::min<std::uint64_t>(kMcBatch, budget - b * kMcBatch);
    NormalSampler gauss(derive_seed(seed, b));
    Vector y(static_cast<Eigen::Index>(dim));
    std::uint64_t count = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
      for (Eigen::Index j = 0; j < y.size(); ++j) y(j) = gauss();
      if (inside(y)) ++count;
    }
    hits[b] = count;
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  const double p = static_cast<double>(total) / static_cast<double>(budget);
  const double se = std::max(kStdErrorFloor, std::sqrt(p * (1.0 - p) / static_cast<double>(budget)));
  return {p, se, budget, Method::mc, seed};
}

inline ProbabilityEstimate gauss_measure_mc(const Polygon2D& p, std::uint64_t budget, Seed seed) {
  return gauss_measure_mc_by([&](const Vector& y) { return contains(p, Vec2{y(0), y(1)}); }, 2, budget, seed);
}

inline ProbabilityEstimate gauss_measure_mc(const HPolytope& k, std::uint64_t budget, Seed seed) {
  return gauss_measure_mc_by([&](const Vector& y) { return k.contains(y); }, k.dim(), budget, seed);
}

inline ProbabilityEstimate gauss_measure_mc(const SymmetricBand& k, std::uint64_t budget, Seed seed) {
  return gauss_measure_mc_by([&](const Vector& y) { return k.contains(y); }, k.dim(), budget, seed);
}

/// Membership in K + T with cheap exits before the LP: points of K or T are in
/// the sum, and a facet normal n of either body with <x, n> > h_K(n) + h_T(n)
/// separates x from it.
class MinkowskiMembership {
 public:
  MinkowskiMembership(const HPolytope& k, const HPolytope& t) : k_(k), t_(t) {
    if (k.dim() != t.dim()) fail(ErrorCode::DimensionMismatch, "bodies live in different dimensions");
    normals_.resize(k.normals().rows() + t.normals().rows(), static_cast<Eigen::Index>(k.dim()));
    normals_ << k.normals(), t.normals();
    bound_.resize(normals_.rows());
    for (Eigen::Index i = 0; i < normals_.rows(); ++i) {
      const Vector n = normals_.row(i).transpose();
      bound_(i) = k.support(n) + t.support(n);
    }
  }

  bool operator()(const Vector& x) const {
    if (k_.contains(x) || t_.contains(x)) return true;
    if (((normals_ * x - bound_).array() > 1e-9).any()) return false;
    return minkowski_contains(k_, t_, x);
  }

 private:
  const HPolytope& k_;
  const HPolytope& t_;
  Matrix normals_;
  Vector bound_;
};

inline ProbabilityEstimate minkowski_measure_mc(const HPolytope& k, const HPolytope& t, std::uint64_t budget, Seed seed) {
  const MinkowskiMembership inside(k, t);
  return gauss_measure_mc_by(inside, k.dim(), budget, seed);
}

/// gamma_2 of a polygon by the chosen engine. qmc and oracle go through the
/// band of the polygon's facet pairs, which is the polygon itself.
inline ProbabilityEstimate polygon_measure(const Polygon2D& p, Engine engine, const QmcOptions& opts, std::uint64_t mc_budget,
                                           Seed seed) {
  switch (engine) {
    case Engine::mc: return gauss_measure_mc(p, mc_budget, seed);
    case Engine::oracle: return gauss_measure_band_oracle(SymmetricBand::from_polygon(p));
    case Engine::qmc: break;
  }
  return gauss_measure_band(SymmetricBand::from_polygon(p), opts, seed);
}

// ---------------------------------------------------------------------------
// Fibers over the first coordinate

/// {y : (s, y) in K} as an interval; empty when lo > hi.
inline std::pair<double, double> fiber_interval(const Polygon2D& p, double s) {
  double lo = -kInf, hi = kInf;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto [n, off] = p.facet(i);
    const double rhs = off - n.x * s;
    if (std::abs(n.y) <= kGeomTol) {
      if (rhs < -kGeomTol) return {1.0, -1.0};
    } else if (n.y > 0.0) {
      hi = std::min(hi, rhs / n.y);
    } else {
      lo = std::max(lo, rhs / n.y);
    }
  }
  return {lo, hi};
}

inline std::pair<double, double> fiber_interval(const SymmetricBand& b, double s) {
  if (b.dim() != 2) fail(ErrorCode::DimensionMismatch, "fiber measure needs a 2-D body");
  double lo = -kInf, hi = kInf;
  const Matrix& u = b.model().factor_rows();
  for (std::size_t i = 0; i < b.thresholds().size(); ++i) {
    const double c = b.thresholds()[i];
    if (std::isinf(c)) continue;
    const double a = u(static_cast<Eigen::Index>(i), 0), w = u(static_cast<Eigen::Index>(i), 1);
    // |a s + w y| <= c
    if (std::abs(w) <= kGeomTol) {
      if (std::abs(a * s) > c + kMembershipTol) return {1.0, -1.0};
      continue;
    }
    const double e1 = (-c - a * s) / w, e2 = (c - a * s) / w;
    lo = std::max(lo, std::min(e1, e2));
    hi = std::min(hi, std::max(e1, e2));
  }
  return {lo, hi};
}

/// f(s) = gamma_1 of the slice over s; an empty slice has measure 0.
template <typename Body>
ProbabilityEstimate fiber_measure(const Body& k, double s) {
  const auto [lo, hi] = fiber_interval(k, s);
  if (!(hi > lo)) return ProbabilityEstimate::exact(0.0);
  return ProbabilityEstimate::exact(std_normal_interval(lo, hi));
}

}  // namespace gcilab
