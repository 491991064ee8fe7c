#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "gcilab/error.hpp"
#include "gcilab/ineqlab.hpp"
#include "gcilab/normal.hpp"
#include "gcilab/report.hpp"

namespace gcilab {

/// c with Phi(c) = (1 + (1 - alpha)^(1/k)) / 2, via the upper tail
/// (1 - (1 - alpha)^(1/k)) / 2 = -expm1(log1p(-alpha) / k) / 2.
inline double sidak_critical_value(double alpha, std::size_t k) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::OutOfRange, "alpha must lie in (0, 1)");
  if (k < 1) fail(ErrorCode::OutOfRange, "need at least one coordinate");
  const double tail = -0.5 * std::expm1(std::log1p(-alpha) / static_cast<double>(k));
  return inv_std_normal_upper(tail);
}

/// Widenings searched by improved_confidence; the last entry is a = inf.
inline std::vector<double> confidence_grid() {
  std::vector<double> a;
  for (int j = 0; j <= 8; ++j) a.push_back(0.05 * std::ldexp(1.0, j));
  a.push_back(kInf);
  return a;
}

/// Finer grid for the critical-value inversion: small a is where the bound is
/// sharpest for strongly dependent coordinates.
inline std::vector<double> critical_value_grid() {
  std::vector<double> a;
  for (int j = 0; j <= 12; ++j) a.push_back(1e-3 * std::ldexp(1.0, j));
  a.push_back(kInf);
  return a;
}

inline void require_standardized(const CorrelationModel& model) {
  if (!model.is_standardized()) fail(ErrorCode::NotStandardized, "model must have unit variances");
}

/// A(a) = Pr(|Y_i| <= c + a for all i) / prod_i Pr(|Y_i| <= c + a); A(inf) = 1.
inline Estimate improvement_factor(const CorrelationModel& model, double c, double a, const CheckOptions& opt) {
  require_standardized(model);
  if (!(c > 0.0)) fail(ErrorCode::InvalidThreshold, "critical value must be positive");
  if (!(a >= 0.0)) fail(ErrorCode::InvalidParameters, "widening must be nonnegative");
  if (std::isinf(a)) return {1.0, kClosedFormTol};
  return sidak_ratio(model, ThresholdVector::constant(model.size(), c + a), opt);
}

struct CorrectionRow {
  double a = 0.0;
  Estimate factor;
  double lower = 0.0;  // factor - 3 stderr
  double level = 0.0;  // lower * (1 - alpha)
};

struct CorrectionResult {
  double alpha = 0.0;
  std::size_t k = 0;
  double c = 0.0;
  std::vector<CorrectionRow> rows;
  double a_best = kInf;  // inf also when falling back to A = 1
  double A_best = 1.0;
  bool fallback = true;
  ProbabilityEstimate joint;  // Pr(|Y_i| <= c for all i)
  double improved_level = 0.0;
  Seed seed = 0;
  std::uint64_t budget = 0;
  double runtime_ms = 0.0;
};

/// Remark procedure: keep Sidak's c and certify the level A(1 - alpha) with A
/// the best lower 3-sigma bound over the grid. The level is capped by the
/// joint probability's own lower bound, but never below the Sidak level
/// 1 - alpha, which holds unconditionally.
inline CorrectionResult improved_confidence(const CorrelationModel& model, double alpha, const CheckOptions& opt) {
  const Stopwatch clock;
  require_standardized(model);
  CorrectionResult out;
  out.alpha = alpha;
  out.k = model.size();
  out.c = sidak_critical_value(alpha, out.k);
  out.seed = opt.seed;
  out.budget = opt.qmc.budget;

  for (double a : confidence_grid()) {
    const Estimate f = improvement_factor(model, out.c, a, opt);
    const double lower = f.lower(kVerdictSigmas);
    out.rows.push_back({a, f, lower, lower * (1.0 - alpha)});
    if (lower > out.A_best) {
      out.A_best = lower;
      out.a_best = a;
      out.fallback = false;
    }
  }
  out.joint = detail::band_prob(model, ThresholdVector::constant(out.k, out.c), opt);
  const double cap = std::max(1.0 - alpha, out.joint.value - kVerdictSigmas * out.joint.std_error);
  out.improved_level = std::min({out.A_best * (1.0 - alpha), cap, 1.0});
  out.runtime_ms = clock.elapsed_ms();
  return out;
}

/// Certified lower bound on Pr(|Y_i| <= c for all i): max over the grid of
/// A_lower(c, a) * prod_i Pr(|Y_i| <= c). Stops early once `enough` is reached.
inline double refined_coverage_bound(const CorrelationModel& model, double c, const CheckOptions& opt,
                                     double enough = kInf) {
  const double product = std::pow(std_normal_symmetric(c), static_cast<double>(model.size()));
  double best = product;  // a = inf
  for (double a : critical_value_grid()) {
    if (std::isinf(a) || best >= enough) continue;
    best = std::max(best, improvement_factor(model, c, a, opt).lower(kVerdictSigmas) * product);
  }
  return best;
}

inline constexpr double kCriticalValueResolution = 1e-3;

/// Smallest c' (to kCriticalValueResolution) whose certified coverage bound
/// reaches 1 - alpha; never above the Sidak value.
inline double improved_critical_value(const CorrelationModel& model, double alpha, const CheckOptions& opt) {
  require_standardized(model);
  const double target = 1.0 - alpha;
  const double hi_start = sidak_critical_value(alpha, model.size());
  // Joint coverage never exceeds one marginal, so c' >= the k = 1 value.
  double lo = sidak_critical_value(alpha, 1), hi = hi_start;
  if (refined_coverage_bound(model, lo, opt, target) >= target) return lo;
  while (hi - lo > kCriticalValueResolution) {
    const double mid = 0.5 * (lo + hi);
    (refined_coverage_bound(model, mid, opt, target) >= target ? hi : lo) = mid;
  }
  return std::min(hi, hi_start);
}

/// Monte Carlo coverage Pr(|X_i| <= c for all i) with X = U Z.
inline ProbabilityEstimate simulate_coverage(const CorrelationModel& model, double c, std::uint64_t draws, Seed seed) {
  const Matrix& u = model.factor_rows();
  return gauss_measure_mc_by([&](const Vector& z) { return ((u * z).array().abs() <= c).all(); }, model.dim(), draws, seed);
}

inline json to_json(const CorrectionResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back(json{{"a", json_number(row.a)},
                        {"A", row.factor.value},
                        {"A_stderr", row.factor.std_error},
                        {"A_lower", row.lower},
                        {"level", row.level}});
  return json{{"kind", "correction"},
              {"alpha", r.alpha},
              {"k", r.k},
              {"c", r.c},
              {"a_grid", rows},
              {"A_best", r.A_best},
              {"a_best", r.fallback ? json(nullptr) : json_number(r.a_best)},
              {"fallback", r.fallback},
              {"joint", to_json(r.joint)},
              {"improved_level", r.improved_level},
              {"seed", r.seed},
              {"budget", r.budget},
              {"runtime_ms", r.runtime_ms}};
}

}  // namespace gcilab
