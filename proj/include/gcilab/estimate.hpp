#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

#include "gcilab/rng.hpp"

namespace gcilab {

enum class Method { closed_form, quadrature_oracle, qmc, mc };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "closed-form";
    case Method::quadrature_oracle: return "quadrature-oracle";
    case Method::qmc: return "qmc";
    case Method::mc: return "mc";
  }
  return "unknown";
}

/// Stated tolerances carried as the stderr of deterministic results.
inline constexpr double kClosedFormTol = 1e-12;
inline constexpr double kOracleTol = 1e-7;

/// A probability with its standard error and provenance.
struct ProbabilityEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  Method method = Method::closed_form;
  std::optional<Seed> seed;

  static ProbabilityEstimate exact(double v) { return {v, kClosedFormTol, 0, Method::closed_form, std::nullopt}; }
};

/// Value with first-order error, for products and ratios of estimates.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;

  Estimate() = default;
  Estimate(double v, double s) : value(v), std_error(s) {}
  Estimate(const ProbabilityEstimate& p) : value(p.value), std_error(p.std_error) {}  // NOLINT(implicit)

  double lower(double k = 3.0) const { return value - k * std_error; }
  double upper(double k = 3.0) const { return value + k * std_error; }
};

/// stderr(ab) ~ |a| s_b + |b| s_a.
inline Estimate operator*(const Estimate& a, const Estimate& b) {
  return {a.value * b.value, std::abs(a.value) * b.std_error + std::abs(b.value) * a.std_error};
}

inline Estimate operator/(const Estimate& a, const Estimate& b) {
  const double q = a.value / b.value;
  return {q, (a.std_error + std::abs(q) * b.std_error) / std::abs(b.value)};
}

inline Estimate operator*(double k, const Estimate& a) { return {k * a.value, std::abs(k) * a.std_error}; }

inline Estimate pow(const Estimate& a, int n) {
  const double v = std::pow(a.value, n);
  return {v, std::abs(n * std::pow(a.value, n - 1)) * a.std_error};
}

/// Difference of independent estimates; errors add in quadrature.
inline Estimate operator-(const Estimate& a, const Estimate& b) {
  return {a.value - b.value, std::hypot(a.std_error, b.std_error)};
}

}  // namespace gcilab
