#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "gcilab/error.hpp"
#include "gcilab/estimate.hpp"
#include "gcilab/gauss_model.hpp"
#include "gcilab/normal.hpp"
#include "gcilab/parallel.hpp"
#include "gcilab/quadrature.hpp"
#include "gcilab/rng.hpp"

namespace gcilab {

/// Point-set size and randomization count for the lattice integrator.
/// `budget` counts lattice points per randomization; the total work is
/// budget * replicates.
struct QmcOptions {
  std::size_t budget = std::size_t{1} << 14;
  std::size_t replicates = 12;
};

inline constexpr std::size_t kMinQmcBudget = 1000;
inline constexpr double kStdErrorFloor = kClosedFormTol;

namespace detail {

/// Rows of the ordered Cholesky factor grouped by the last column they touch.
/// Variable k of the integral is constrained by every row in group k.
struct SeparationPlan {
  struct Row {
    std::vector<double> coef;  // coefficients on columns 0..k-1
    double last = 1.0;         // coefficient on column k
    double lower = 0.0;
    double upper = 0.0;
  };
  bool empty = false;  // some constraint can never hold
  std::vector<std::vector<Row>> groups;
};

inline SeparationPlan plan_separation(const Matrix& sigma, std::span<const double> lower, std::span<const double> upper) {
  const std::size_t n = static_cast<std::size_t>(sigma.rows());
  SeparationPlan plan;

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (lower[i] == -kInf && upper[i] == kInf) continue;
    const double var = sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    if (var <= 1e-300) {
      if (!(lower[i] <= 0.0 && 0.0 <= upper[i])) plan.empty = true;
      continue;
    }
    active.push_back(i);
  }
  if (plan.empty) return plan;

  // Ordering: at each step take the remaining variable whose interval is narrowest
  // given the earlier pivots held at their truncated means. Variables explained by
  // the current pivots join the group of the last pivot they load on.
  std::vector<std::size_t> pivots;
  std::vector<std::vector<double>> pivot_coef;  // L rows of the pivot variables
  std::vector<double> pivot_mean;               // E[y_k | its interval]
  auto coefficients = [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    std::vector<double> c(pivots.size(), 0.0);
    for (std::size_t k = 0; k < pivots.size(); ++k) {
      double v = sigma(ii, static_cast<Eigen::Index>(pivots[k]));
      for (std::size_t m = 0; m < k; ++m) v -= c[m] * pivot_coef[k][m];
      c[k] = v / pivot_coef[k][k];
    }
    return c;
  };

  while (!active.empty()) {
    struct Candidate {
      std::size_t var;
      std::vector<double> c;
      double lo, hi, root, width;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i : active) {
      const double var = sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
      std::vector<double> c = coefficients(i);
      double explained = 0.0, shift = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k) {
        explained += c[k] * c[k];
        shift += c[k] * pivot_mean[k];
      }
      const double residual = var - explained;
      if (residual > kPivotTol * var) {
        const double root = std::sqrt(residual);
        const double lo = (lower[i] - shift) / root, hi = (upper[i] - shift) / root;
        candidates.push_back({i, std::move(c), lo, hi, root, std_normal_interval(lo, hi)});
        continue;
      }
      std::ptrdiff_t last = -1;
      for (std::size_t k = 0; k < c.size(); ++k)
        if (std::abs(c[k]) > 1e-10 * std::sqrt(var)) last = static_cast<std::ptrdiff_t>(k);
      if (last < 0) {
        if (!(lower[i] <= 0.0 && 0.0 <= upper[i])) plan.empty = true;
        continue;
      }
      SeparationPlan::Row row;
      row.lower = lower[i];
      row.upper = upper[i];
      row.coef.assign(c.begin(), c.begin() + last);
      row.last = c[static_cast<std::size_t>(last)];
      plan.groups[static_cast<std::size_t>(last)].push_back(std::move(row));
    }
    if (plan.empty) return plan;
    if (candidates.empty()) break;
    auto chosen = std::min_element(candidates.begin(), candidates.end(),
                                   [](const Candidate& a, const Candidate& b) { return a.width < b.width; });
    active.clear();
    for (const auto& cand : candidates)
      if (cand.var != chosen->var) active.push_back(cand.var);

    const std::size_t i = chosen->var;
    const std::size_t k = pivots.size();
    const double best_lo = chosen->lo, best_hi = chosen->hi, best_root = chosen->root;
    std::vector<double> best_c = std::move(chosen->c);
    SeparationPlan::Row row;
    row.lower = lower[i];
    row.upper = upper[i];
    row.coef = best_c;
    row.last = best_root;
    best_c.push_back(best_root);
    pivots.push_back(i);
    pivot_coef.push_back(std::move(best_c));
    // Mean of a standard normal truncated to [best_lo, best_hi].
    const double mass = std_normal_interval(best_lo, best_hi);
    const double dens = (best_lo == -kInf ? 0.0 : std_normal_pdf(best_lo)) - (best_hi == kInf ? 0.0 : std_normal_pdf(best_hi));
    pivot_mean.push_back(mass > 1e-300 ? dens / mass : std::max(best_lo, std::min(best_hi, 0.0)));
    plan.groups.emplace_back();
    plan.groups[k].push_back(std::move(row));
  }
  return plan;
}

/// Z ~ N(0,1) conditioned on [lo, hi], driven by w in [0,1]; mirrored on the upper side
/// so right-tail draws keep their precision.
inline double truncated_normal_draw(double lo, double hi, double w) {
  if (lo > 0.0) return -truncated_normal_draw(-hi, -lo, 1.0 - w);
  const double a = std_normal_cdf(lo), b = std_normal_cdf(hi);
  const double p = std::clamp(a + w * (b - a), kTailFloor, 1.0 - 1e-16);
  return inv_std_normal_cdf(p);
}

/// Integrand on [0,1)^{r-1}; product of conditional interval probabilities.
inline double separation_integrand(const SeparationPlan& plan, std::span<const double> w, std::vector<double>& y) {
  double prod = 1.0;
  const std::size_t r = plan.groups.size();
  for (std::size_t k = 0; k < r; ++k) {
    double lo = -kInf, hi = kInf;
    for (const auto& row : plan.groups[k]) {
      double shift = 0.0;
      for (std::size_t m = 0; m < row.coef.size(); ++m) shift += row.coef[m] * y[m];
      double l = (row.lower - shift) / row.last;
      double h = (row.upper - shift) / row.last;
      if (row.last < 0.0) std::swap(l, h);
      lo = std::max(lo, l);
      hi = std::min(hi, h);
    }
    const double p = std_normal_interval(lo, hi);
    prod *= p;
    if (prod == 0.0) return 0.0;
    if (k + 1 < r) y[k] = truncated_normal_draw(lo, hi, w[k]);
  }
  return prod;
}

inline std::vector<double> richtmyer_generator(std::size_t dims) {
  std::vector<double> alpha;
  alpha.reserve(dims);
  for (std::size_t p = 2; alpha.size() < dims; ++p) {
    bool prime = true;
    for (std::size_t q = 2; q * q <= p; ++q)
      if (p % q == 0) {
        prime = false;
        break;
      }
    if (!prime) continue;
    const double root = std::sqrt(static_cast<double>(p));
    alpha.push_back(root - std::floor(root));
  }
  return alpha;
}

inline void check_rect_inputs(const CorrelationModel& model, std::span<const double> lower, std::span<const double> upper) {
  if (lower.size() != model.size() || upper.size() != model.size())
    fail(ErrorCode::InvalidBounds, "bounds length differs from model size");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i])
      fail(ErrorCode::InvalidBounds, "need lower_i <= upper_i for every coordinate");
}

}  // namespace detail

/// Pr(lower_i <= X_i <= upper_i for all i) by separation of variables and a
/// randomly shifted Richtmyer lattice folded by the baker's transform. Reproducible from
/// (seed, budget, replicates).
inline ProbabilityEstimate rect_prob(const CorrelationModel& model, std::span<const double> lower,
                                     std::span<const double> upper, const QmcOptions& opts, Seed seed) {
  detail::check_rect_inputs(model, lower, upper);
  if (opts.budget < kMinQmcBudget) fail(ErrorCode::BudgetTooSmall, "QMC budget must be at least 1000");
  if (opts.replicates < 2) fail(ErrorCode::BudgetTooSmall, "need at least two randomizations");

  const detail::SeparationPlan plan = detail::plan_separation(model.sigma(), lower, upper);
  const std::uint64_t samples = opts.budget * opts.replicates;
  if (plan.empty) return {0.0, kStdErrorFloor, samples, Method::closed_form, seed};
  const std::size_t r = plan.groups.size();
  if (r <= 1) {
    std::vector<double> y(1, 0.0);
    return {detail::separation_integrand(plan, {}, y), kStdErrorFloor, samples, Method::closed_form, seed};
  }

  const std::size_t dims = r - 1;
  const std::vector<double> alpha = detail::richtmyer_generator(dims);
  std::vector<double> means(opts.replicates, 0.0);
  parallel_for(opts.replicates, [&](std::size_t rep) {
    std::mt19937_64 gen(derive_seed(seed, rep));
    std::vector<double> shift(dims), x(dims), y(r, 0.0);
    for (double& s : shift) s = uniform01(gen);
    double sum = 0.0;
    for (std::size_t k = 0; k < opts.budget; ++k) {
      for (std::size_t j = 0; j < dims; ++j) {
        double v = static_cast<double>(k) * alpha[j] + shift[j];
        v -= std::floor(v);
        x[j] = 1.0 - std::abs(2.0 * v - 1.0);  // baker's transform
      }
      sum += detail::separation_integrand(plan, x, y);
    }
    means[rep] = sum / static_cast<double>(opts.budget);
  });

  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(means.size());
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  const double sd = std::sqrt(ss / static_cast<double>(means.size() - 1));
  const double se = std::max(kStdErrorFloor, sd / std::sqrt(static_cast<double>(means.size())));
  return {std::clamp(mean, 0.0, 1.0), se, samples, Method::qmc, seed};
}

/// Pr(|X_i| <= c_i for all i).
inline ProbabilityEstimate symmetric_rect_prob(const CorrelationModel& model, const ThresholdVector& c,
                                               const QmcOptions& opts, Seed seed) {
  if (c.size() != model.size()) fail(ErrorCode::InvalidBounds, "threshold length differs from model size");
  std::vector<double> lo(c.size()), hi(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    lo[i] = -c[i];
    hi[i] = c[i];
  }
  return rect_prob(model, lo, hi, opts, seed);
}

/// Pr(|X_i| <= c) in closed form.
inline ProbabilityEstimate marginal_symmetric_prob(const CorrelationModel& model, std::size_t i, double c) {
  const double s = model.stddev(i);
  if (s == 0.0) return ProbabilityEstimate::exact(1.0);
  return ProbabilityEstimate::exact(std_normal_symmetric(c / s));
}

inline constexpr std::size_t kOracleMaxDim = 3;

/// Deterministic nested adaptive quadrature of the standard Gaussian density
/// over {y in R^d : lower <= U y <= upper}, d <= 3. The innermost coordinate is
/// integrated in closed form.
inline ProbabilityEstimate oracle_rect_prob(const CorrelationModel& model, std::span<const double> lower,
                                            std::span<const double> upper) {
  detail::check_rect_inputs(model, lower, upper);
  const std::size_t d = model.dim();
  if (d > kOracleMaxDim) fail(ErrorCode::DimensionTooLarge, "quadrature oracle supports d <= 3");
  const Matrix& u = model.factor_rows();
  constexpr double kCut = 9.0;  // Gaussian mass beyond is below 1e-18 per side

  struct Constraint {
    std::vector<double> coef;
    std::size_t last;  // highest coordinate with a nonzero coefficient
    double lower, upper;
  };
  std::vector<Constraint> rows;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (lower[i] == -kInf && upper[i] == kInf) continue;
    Constraint c{std::vector<double>(d), 0, lower[i], upper[i]};
    const double scale = u.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff();
    bool any = false;
    for (std::size_t j = 0; j < d; ++j) {
      c.coef[j] = u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (std::abs(c.coef[j]) > 1e-14 * scale && scale > 0.0) {
        c.last = j;
        any = true;
      }
    }
    if (!any) {
      if (!(lower[i] <= 0.0 && 0.0 <= upper[i])) return {0.0, kOracleTol, 0, Method::quadrature_oracle, std::nullopt};
      continue;
    }
    rows.push_back(std::move(c));
  }

  std::vector<double> y(d, 0.0);
  auto range = [&](std::size_t level) {
    double lo = -kInf, hi = kInf;
    for (const auto& c : rows) {
      if (c.last != level) continue;
      double shift = 0.0;
      for (std::size_t j = 0; j < level; ++j) shift += c.coef[j] * y[j];
      double l = (c.lower - shift) / c.coef[level];
      double h = (c.upper - shift) / c.coef[level];
      if (c.coef[level] < 0.0) std::swap(l, h);
      lo = std::max(lo, l);
      hi = std::min(hi, h);
    }
    return std::pair{lo, hi};
  };

  // Boundary hyperplanes coef . y = bound.
  struct Plane {
    const std::vector<double>* coef;
    std::size_t last;
    double bound;
  };
  std::vector<Plane> planes;
  for (const auto& c : rows) {
    if (c.lower != -kInf) planes.push_back({&c.coef, c.last, c.lower});
    if (c.upper != kInf) planes.push_back({&c.coef, c.last, c.upper});
  }

  // With y_0..y_{level-1} fixed, the integrand in y_level is smooth between the
  // y_level coordinates of vertices of the remaining plane arrangement.
  auto breakpoints = [&](std::size_t level, double a, double b) {
    const std::size_t m = d - level;
    std::vector<double> cuts{a, b};
    std::vector<const Plane*> live;
    for (const auto& pl : planes)
      if (pl.last >= level) live.push_back(&pl);
    std::vector<std::size_t> pick(m);
    auto visit = [&](auto& self, std::size_t depth, std::size_t from) -> void {
      if (depth == m) {
        Matrix sys(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        Vector rhs(static_cast<Eigen::Index>(m));
        for (std::size_t r = 0; r < m; ++r) {
          const Plane& pl = *live[pick[r]];
          double shift = 0.0;
          for (std::size_t j = 0; j < level; ++j) shift += (*pl.coef)[j] * y[j];
          for (std::size_t j = 0; j < m; ++j)
            sys(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = (*pl.coef)[level + j];
          rhs(static_cast<Eigen::Index>(r)) = pl.bound - shift;
        }
        Eigen::FullPivLU<Matrix> lu(sys);
        if (lu.rank() < static_cast<Eigen::Index>(m)) return;
        const double t = lu.solve(rhs)(0);
        if (t > a && t < b) cuts.push_back(t);
        return;
      }
      for (std::size_t i = from; i < live.size(); ++i) {
        pick[depth] = i;
        self(self, depth + 1, i + 1);
      }
    };
    visit(visit, 0, 0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double u, double v) { return v - u < 1e-12; }), cuts.end());
    return cuts;
  };

  const std::array<double, 3> tolerance = {1e-9, 3e-10, 1e-10};
  auto level_mass = [&](auto& self, std::size_t level) -> double {
    const auto [lo, hi] = range(level);
    if (level + 1 == d) return std_normal_interval(lo, hi);
    const double a = std::max(lo, -kCut), b = std::min(hi, kCut);
    if (!(b > a)) return 0.0;
    const std::vector<double> cuts = breakpoints(level, a, b);
    auto integrand = [&](double t) {
      y[level] = t;
      return std_normal_pdf(t) * self(self, level + 1);
    };
    double total = 0.0;
    const double piece_tol = tolerance[level] / static_cast<double>(cuts.size());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) total += integrate(integrand, cuts[k], cuts[k + 1], piece_tol).value;
    return total;
  };
  const double value = level_mass(level_mass, 0);
  return {std::clamp(value, 0.0, 1.0), kOracleTol, 0, Method::quadrature_oracle, std::nullopt};
}

}  // namespace gcilab
