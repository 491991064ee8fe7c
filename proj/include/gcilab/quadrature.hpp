#pragma once

#include <array>
#include <cmath>

namespace gcilab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780, 0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
QuadratureResult gauss_kronrod15(F& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const double fc = f(mid);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[static_cast<std::size_t>(i)];
    const double sum = f(mid - dx) + f(mid + dx);
    kronrod += kKronrodWeights[static_cast<std::size_t>(i)] * sum;
    if (i % 2 == 1) gauss += kGaussWeights[static_cast<std::size_t>(i / 2)] * sum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <typename F>
QuadratureResult adaptive(F& f, double a, double b, double tol, QuadratureResult whole, int depth) {
  if (whole.error <= tol || depth <= 0 || b - a < 1e-12) return whole;
  const double mid = 0.5 * (a + b);
  const QuadratureResult left = gauss_kronrod15(f, a, mid);
  const QuadratureResult right = gauss_kronrod15(f, mid, b);
  if (left.error + right.error <= tol) return {left.value + right.value, left.error + right.error};
  const QuadratureResult l = adaptive(f, a, mid, 0.5 * tol, left, depth - 1);
  const QuadratureResult r = adaptive(f, mid, b, 0.5 * tol, right, depth - 1);
  return {l.value + r.value, l.error + r.error};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) on a finite interval to absolute tolerance.
template <typename F>
QuadratureResult integrate(F&& f, double a, double b, double tol, int max_depth = 40) {
  if (!(b > a)) return {};
  auto& fn = f;
  return detail::adaptive(fn, a, b, tol, detail::gauss_kronrod15(fn, a, b), max_depth);
}

/// Same, but the interval is first cut into `pieces` equal panels.
template <typename F>
QuadratureResult integrate_panels(F&& f, double a, double b, int pieces, double tol, int max_depth = 40) {
  QuadratureResult total;
  if (!(b > a)) return total;
  const double h = (b - a) / pieces;
  for (int k = 0; k < pieces; ++k) {
    const double lo = a + k * h, hi = (k + 1 == pieces) ? b : a + (k + 1) * h;
    const QuadratureResult part = integrate(f, lo, hi, tol / pieces, max_depth);
    total.value += part.value;
    total.error += part.error;
  }
  return total;
}

}  // namespace gcilab
