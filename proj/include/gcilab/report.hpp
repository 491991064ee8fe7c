#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gcilab/estimate.hpp"
#include "gcilab/gauss_model.hpp"
#include "gcilab/geometry.hpp"

namespace gcilab {

using json = nlohmann::ordered_json;

enum class Verdict { supported, violated, inconclusive };
/// backed: a proved statement, so a violation is a bug. exploratory: a conjecture
/// or a known-false form, reported but never fatal.
enum class Backing { backed, exploratory };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::supported: return "supported";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}
inline std::string_view to_string(Backing b) { return b == Backing::backed ? "theorem" : "exploratory"; }

inline constexpr double kVerdictSigmas = 3.0;

inline Verdict classify(double margin, double std_error) {
  if (margin >= kVerdictSigmas * std_error) return Verdict::supported;
  if (margin <= -kVerdictSigmas * std_error) return Verdict::violated;
  return Verdict::inconclusive;
}

/// One named probability inside a side of an inequality.
struct Term {
  std::string name;
  ProbabilityEstimate p;
};

/// factor * product of terms, with first-order error.
struct Side {
  double factor = 1.0;
  std::vector<Term> terms;

  Estimate total() const {
    Estimate e(1.0, 0.0);
    for (const auto& t : terms) e = e * Estimate(t.p);
    return factor * e;
  }
};

struct InequalityReport {
  std::string label;
  json instance = json::object();
  Side lhs, rhs;
  double margin = 0.0;
  double std_error = 0.0;
  Verdict verdict = Verdict::inconclusive;
  Backing backing = Backing::backed;
  Seed seed = 0;
  std::uint64_t budget = 0;
  double runtime_ms = 0.0;
  json trace = json::object();

  /// Theorem-backed check that came out violated.
  bool failed() const { return backing == Backing::backed && verdict == Verdict::violated; }
};

inline InequalityReport make_report(std::string label, Backing backing, Side lhs, Side rhs) {
  InequalityReport r;
  r.label = std::move(label);
  r.backing = backing;
  r.lhs = std::move(lhs);
  r.rhs = std::move(rhs);
  const Estimate diff = r.lhs.total() - r.rhs.total();
  r.margin = diff.value;
  r.std_error = diff.std_error;
  r.verdict = classify(r.margin, r.std_error);
  return r;
}

// ---------------------------------------------------------------------------
// JSON. Infinities are written as the strings "inf" / "-inf".

inline json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json_number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const ThresholdVector& c) {
  json out = json::array();
  for (double v : c.values()) out.push_back(json_number(v));
  return out;
}

inline json to_json(const CorrelationModel& m) { return json{{"sigma", to_json(m.sigma())}, {"rank", m.dim()}}; }

inline json to_json(const Polygon2D& p) {
  json out = json::array();
  for (const auto& v : p.vertices()) out.push_back(json::array({v.x, v.y}));
  return out;
}

inline json to_json(const HPolytope& h) {
  return json{{"normals", to_json(h.normals())}, {"offsets", to_json(Matrix(h.offsets().transpose()))[0]}};
}

inline json to_json(const SymmetricBand& b) {
  return json{{"factor_rows", to_json(b.model().factor_rows())}, {"thresholds", to_json(b.thresholds())}};
}

inline json to_json(const ProbabilityEstimate& p) {
  json out{{"value", p.value}, {"stderr", p.std_error}, {"samples", p.samples}, {"method", to_string(p.method)}};
  out["seed"] = p.seed ? json(*p.seed) : json(nullptr);
  return out;
}

inline json to_json(const Side& s) {
  const Estimate e = s.total();
  json terms = json::array();
  for (const auto& t : s.terms) {
    json j = to_json(t.p);
    j["name"] = t.name;
    terms.push_back(std::move(j));
  }
  return json{{"value", e.value}, {"stderr", e.std_error}, {"factor", s.factor}, {"terms", std::move(terms)}};
}

inline json to_json(const InequalityReport& r) {
  return json{{"kind", "inequality"},
              {"label", r.label},
              {"instance", r.instance},
              {"lhs", to_json(r.lhs)},
              {"rhs", to_json(r.rhs)},
              {"margin", r.margin},
              {"stderr", r.std_error},
              {"verdict", to_string(r.verdict)},
              {"backing", to_string(r.backing)},
              {"seed", r.seed},
              {"budget", r.budget},
              {"runtime_ms", r.runtime_ms},
              {"trace", r.trace}};
}

/// Wall-clock milliseconds since construction.
class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace gcilab
