#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace gcilab {

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Minimizes f from x0 for at most `iterations` simplex updates. Points are
/// clamped into [lower, upper] before evaluation. iterations == 0 evaluates x0 only.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                                    const std::vector<double>& lower, const std::vector<double>& upper,
                                    std::size_t iterations, double step = 0.1) {
  const std::size_t k = x0.size();
  std::size_t evals = 0;
  auto clamp = [&](std::vector<double> x) {
    for (std::size_t j = 0; j < k; ++j) x[j] = std::clamp(x[j], lower[j], upper[j]);
    return x;
  };
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };

  x0 = clamp(std::move(x0));
  if (iterations == 0) return {x0, eval(x0), 1};

  std::vector<std::vector<double>> pts{x0};
  for (std::size_t j = 0; j < k; ++j) {
    auto p = x0;
    const double h = step * (upper[j] - lower[j]);
    p[j] = p[j] + h <= upper[j] ? p[j] + h : p[j] - h;
    pts.push_back(clamp(std::move(p)));
  }
  std::vector<double> val;
  for (const auto& p : pts) val.push_back(eval(p));

  auto combine = [&](const std::vector<double>& c, const std::vector<double>& p, double t) {
    std::vector<double> out(k);
    for (std::size_t j = 0; j < k; ++j) out[j] = c[j] + t * (p[j] - c[j]);
    return clamp(std::move(out));
  };

  std::vector<std::size_t> order(k + 1);
  for (std::size_t it = 0; it < iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[k - 1];
    std::vector<double> centroid(k, 0.0);
    for (std::size_t i : order)
      if (i != worst)
        for (std::size_t j = 0; j < k; ++j) centroid[j] += pts[i][j] / static_cast<double>(k);

    const auto reflected = combine(centroid, pts[worst], -1.0);
    const double fr = eval(reflected);
    if (fr < val[best]) {
      const auto expanded = combine(centroid, pts[worst], -2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        pts[worst] = expanded, val[worst] = fe;
      } else {
        pts[worst] = reflected, val[worst] = fr;
      }
    } else if (fr < val[second]) {
      pts[worst] = reflected, val[worst] = fr;
    } else {
      const bool outside = fr < val[worst];
      const auto contracted = combine(centroid, outside ? reflected : pts[worst], 0.5);
      const double fc = eval(contracted);
      if (fc < std::min(fr, val[worst])) {
        pts[worst] = contracted, val[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= k; ++i) {
          if (i == best) continue;
          pts[i] = combine(pts[best], pts[i], 0.5);
          val[i] = eval(pts[i]);
        }
      }
    }
  }
  const auto it = std::min_element(val.begin(), val.end());
  return {pts[static_cast<std::size_t>(it - val.begin())], *it, evals};
}

}  // namespace gcilab
