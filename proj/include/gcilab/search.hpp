#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "gcilab/error.hpp"
#include "gcilab/ineqlab.hpp"
#include "gcilab/nelder_mead.hpp"

namespace gcilab {

enum class Family { hull_rectangles, rotated_boxes, band_triples };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::hull_rectangles: return "hull-rectangles";
    case Family::rotated_boxes: return "rotated-boxes";
    case Family::band_triples: return "band-triples";
  }
  return "unknown";
}

inline Family parse_family(std::string_view s) {
  if (s == "hull-rectangles") return Family::hull_rectangles;
  if (s == "rotated-boxes") return Family::rotated_boxes;
  if (s == "band-triples") return Family::band_triples;
  fail(ErrorCode::InvalidParameters, "unknown family: " + std::string(s));
}

inline constexpr std::size_t kSearchRestarts = 5;

struct SearchResult {
  Family family = Family::hull_rectangles;
  std::vector<std::string> names;
  std::vector<double> params;
  InequalityReport best;
  std::size_t evaluations = 0;
  json trace = json::array();
  double runtime_ms = 0.0;
};

namespace detail {

/// One parameterized family: bounds, a fixed starting point and the report at a point.
struct FamilySpec {
  std::vector<std::string> names;
  std::vector<double> lower, upper, start;
  std::function<InequalityReport(const std::vector<double>&)> report;
};

inline FamilySpec family_spec(Family family, const CheckOptions& opt) {
  switch (family) {
    case Family::hull_rectangles:
      // log N; the paper's N = 3 sits inside.
      return {{"log_N"}, {-2.0}, {2.0}, {0.0}, [opt](const std::vector<double>& x) { return hull_counterexample(std::exp(x[0]), opt); }};
    case Family::rotated_boxes:
      // K = [-e^l, e^l] x [-e^-l, e^-l]; T = R(angle) S(rho) K with S the
      // shear taking e_1, e_2 to correlated unit vectors.
      return {{"log_aspect", "angle", "rho"},
              {-2.0, 0.0, -0.9},
              {2.0, std::numbers::pi / 2, 0.9},
              {1.0, std::numbers::pi / 2, 0.0},
              [opt](const std::vector<double>& x) {
                const double a = std::exp(x[0]), rho = x[2], c = std::cos(x[1]), s = std::sin(x[1]);
                const Polygon2D k = Polygon2D::box(a, 1.0 / a);
                const double r = std::sqrt(1.0 - rho * rho);
                // R(angle) [[1, rho], [0, r]]
                const Polygon2D t = k.transformed(c, c * rho - s * r, s, s * rho + c * r);
                return check_strong_gci_2d(k, t, opt);
              }};
    case Family::band_triples: {
      // Three unit rows in the plane at fixed angles; log thresholds s and t.
      Matrix u(3, 2);
      for (int i = 0; i < 3; ++i) u.row(i) << std::cos(i * std::numbers::pi / 3), std::sin(i * std::numbers::pi / 3);
      const auto model = CorrelationModel::from_factor_rows(u);
      return {{"log_s1", "log_s2", "log_s3", "log_t1", "log_t2", "log_t3"},
              std::vector<double>(6, -2.0),
              std::vector<double>(6, 2.0),
              {0.0, 0.5, -0.5, -0.5, 0.0, 0.5},
              [opt, model](const std::vector<double>& x) {
                const ThresholdVector s{std::exp(x[0]), std::exp(x[1]), std::exp(x[2])};
                const ThresholdVector t{std::exp(x[3]), std::exp(x[4]), std::exp(x[5])};
                return check_strong_gci_bands(model, s, t, opt);
              }};
    }
  }
  fail(ErrorCode::InvalidParameters, "unknown family");
}

}  // namespace detail

/// Minimizes the family's margin by Nelder-Mead: one run from the family's
/// fixed start, then random restarts, `steps` simplex updates each. steps <= 1
/// evaluates only the fixed start.
inline SearchResult search_counterexample(Family family, std::size_t steps, const CheckOptions& opt) {
  const Stopwatch clock;
  const auto spec = detail::family_spec(family, opt);
  SearchResult out;
  out.family = family;
  out.names = spec.names;
  bool have = false;
  std::mt19937_64 gen(derive_seed(opt.seed, 0x5ea6c4ULL));
  const std::size_t restarts = steps <= 1 ? 1 : kSearchRestarts;
  for (std::size_t run = 0; run < restarts; ++run) {
    std::vector<double> x0 = spec.start;
    if (run > 0)
      for (std::size_t j = 0; j < x0.size(); ++j) x0[j] = spec.lower[j] + (spec.upper[j] - spec.lower[j]) * uniform01(gen);
    const auto f = [&](const std::vector<double>& x) {
      auto r = spec.report(x);
      const double margin = r.margin;
      ++out.evaluations;
      json point = json::object();
      for (std::size_t j = 0; j < x.size(); ++j) point[spec.names[j]] = x[j];
      out.trace.push_back(json{{"restart", run}, {"params", point}, {"margin", margin}, {"stderr", r.std_error}});
      if (!have || margin < out.best.margin) {
        out.best = std::move(r);
        out.params = x;
        have = true;
      }
      return margin;
    };
    nelder_mead(f, x0, spec.lower, spec.upper, steps <= 1 ? 0 : steps);
  }
  out.runtime_ms = clock.elapsed_ms();
  return out;
}

inline json to_json(const SearchResult& r) {
  json params = json::object();
  for (std::size_t j = 0; j < r.params.size(); ++j) params[r.names[j]] = r.params[j];
  return json{{"kind", "search"},        {"family", to_string(r.family)}, {"best_params", params},
              {"best_margin", r.best.margin}, {"best_stderr", r.best.std_error}, {"best", to_json(r.best)},
              {"evaluations", r.evaluations}, {"trace", r.trace},           {"runtime_ms", r.runtime_ms}};
}

}  // namespace gcilab
