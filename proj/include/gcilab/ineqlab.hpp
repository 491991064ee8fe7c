#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gcilab/error.hpp"
#include "gcilab/geometry.hpp"
#include "gcilab/measure.hpp"
#include "gcilab/mvn.hpp"
#include "gcilab/report.hpp"

namespace gcilab {

/// Knobs shared by every checker. Band probabilities always use the lattice
/// engine; `engine` picks how polygon measures are taken.
struct CheckOptions {
  QmcOptions qmc{};
  std::uint64_t mc_budget = 1'000'000;
  Engine engine = Engine::qmc;
  Seed seed = 0;

  std::uint64_t budget() const { return engine == Engine::mc ? mc_budget : qmc.budget; }
};

namespace detail {

inline ProbabilityEstimate band_prob(const CorrelationModel& model, const ThresholdVector& c, const CheckOptions& opt) {
  const SymmetricBand band(model, c);
  return gauss_measure_band(band, opt.qmc, content_seed(opt.seed, band));
}

inline ProbabilityEstimate poly_prob(const Polygon2D& p, const CheckOptions& opt) {
  return polygon_measure(p, opt.engine, opt.qmc, opt.mc_budget, content_seed(opt.seed, p));
}

inline std::string idx(std::size_t i) { return std::to_string(i + 1); }

inline void check_index(const CorrelationModel& model, std::size_t index) {
  if (index >= model.size()) fail(ErrorCode::OutOfRange, "coordinate index out of range");
}

inline void check_thresholds(const CorrelationModel& model, const ThresholdVector& c) {
  if (c.size() != model.size()) fail(ErrorCode::DimensionMismatch, "one threshold per coordinate");
}

inline InequalityReport finish(InequalityReport r, const CheckOptions& opt, const Stopwatch& clock) {
  r.seed = opt.seed;
  r.budget = opt.budget();
  r.runtime_ms = clock.elapsed_ms();
  return r;
}

inline json band_instance(const CorrelationModel& model, const ThresholdVector& c) {
  return json{{"model", to_json(model)}, {"thresholds", to_json(c)}};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rectangle-probability inequalities

/// Pr(|X_i| <= c_i for all i) >= prod_i Pr(|X_i| <= c_i).
inline InequalityReport check_sidak(const CorrelationModel& model, const ThresholdVector& c, const CheckOptions& opt) {
  const Stopwatch clock;
  detail::check_thresholds(model, c);
  Side lhs{1.0, {{"Pr(all |X_i| <= c_i)", detail::band_prob(model, c, opt)}}};
  Side rhs;
  for (std::size_t i = 0; i < c.size(); ++i)
    rhs.terms.push_back({"Pr(|X_" + detail::idx(i) + "| <= c_" + detail::idx(i) + ")", marginal_symmetric_prob(model, i, c[i])});
  auto r = make_report("sidak", Backing::backed, std::move(lhs), std::move(rhs));
  r.instance = detail::band_instance(model, c);
  return detail::finish(std::move(r), opt, clock);
}

/// Splits off one coordinate: Pr(all) >= Pr(|X_j| <= c_j) Pr(rest).
inline InequalityReport check_sidak_step(const CorrelationModel& model, const ThresholdVector& c, std::size_t index,
                                         const CheckOptions& opt) {
  const Stopwatch clock;
  detail::check_thresholds(model, c);
  detail::check_index(model, index);
  const std::string j = detail::idx(index);
  Side lhs{1.0, {{"Pr(all |X_i| <= c_i)", detail::band_prob(model, c, opt)}}};
  Side rhs{1.0,
           {{"Pr(|X_" + j + "| <= c_" + j + ")", marginal_symmetric_prob(model, index, c[index])},
            {"Pr(|X_i| <= c_i, i != " + j + ")", detail::band_prob(model, c.with(index, kInf), opt)}}};
  auto r = make_report("sidak-step", Backing::backed, std::move(lhs), std::move(rhs));
  r.instance = detail::band_instance(model, c);
  r.instance["index"] = index;
  return detail::finish(std::move(r), opt, clock);
}

/// Pr(|X_j| <= c_j + a) Pr(all <= c) >= Pr(|X_j| <= c_j) Pr(|X_j| <= c_j + a, rest <= c).
/// a = inf turns this into check_sidak_step.
inline InequalityReport check_refined_sidak(const CorrelationModel& model, const ThresholdVector& c, double a,
                                            std::size_t index, const CheckOptions& opt) {
  const Stopwatch clock;
  detail::check_thresholds(model, c);
  detail::check_index(model, index);
  if (!(a > 0.0)) fail(ErrorCode::InvalidParameters, "widening a must be in (0, inf]");
  const std::string j = detail::idx(index);
  const double wide = c[index] + a;
  Side lhs{1.0,
           {{"Pr(|X_" + j + "| <= c_" + j + " + a)", marginal_symmetric_prob(model, index, wide)},
            {"Pr(all |X_i| <= c_i)", detail::band_prob(model, c, opt)}}};
  Side rhs{1.0,
           {{"Pr(|X_" + j + "| <= c_" + j + ")", marginal_symmetric_prob(model, index, c[index])},
            {"Pr(|X_" + j + "| <= c_" + j + " + a, rest <= c)", detail::band_prob(model, c.with(index, wide), opt)}}};
  auto r = make_report("refined-sidak", Backing::backed, std::move(lhs), std::move(rhs));
  r.instance = detail::band_instance(model, c);
  r.instance["a"] = json_number(a);
  r.instance["index"] = index;
  return detail::finish(std::move(r), opt, clock);
}

/// Pr(all |X_i| <= c_i) / prod_i Pr(|X_i| <= c_i); coordinates with c_i = inf
/// contribute a factor 1 to the product.
inline Estimate sidak_ratio(const CorrelationModel& model, const ThresholdVector& c, const CheckOptions& opt) {
  detail::check_thresholds(model, c);
  Estimate product(1.0, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i)
    if (std::isfinite(c[i])) product = product * Estimate(marginal_symmetric_prob(model, i, c[i]));
  return Estimate(detail::band_prob(model, c, opt)) / product;
}

/// Pr(all) >= Pr(first k) Pr(last n - k).
inline InequalityReport check_royen(const CorrelationModel& model, const ThresholdVector& c, std::size_t split,
                                    const CheckOptions& opt) {
  const Stopwatch clock;
  detail::check_thresholds(model, c);
  const std::size_t n = model.size();
  if (split < 1 || split >= n) fail(ErrorCode::InvalidParameters, "split k must satisfy 1 <= k < n");
  std::vector<double> first(c.values()), last(c.values());
  for (std::size_t i = 0; i < n; ++i) (i < split ? last : first)[i] = kInf;
  Side lhs{1.0, {{"Pr(all |X_i| <= c_i)", detail::band_prob(model, c, opt)}}};
  Side rhs{1.0,
           {{"Pr(|X_i| <= c_i, i <= k)", detail::band_prob(model, ThresholdVector(first), opt)},
            {"Pr(|X_i| <= c_i, i > k)", detail::band_prob(model, ThresholdVector(last), opt)}}};
  auto r = make_report("royen", Backing::backed, std::move(lhs), std::move(rhs));
  r.instance = detail::band_instance(model, c);
  r.instance["split"] = split;
  return detail::finish(std::move(r), opt, clock);
}

/// Pr(<= s + t) Pr(<= min(s, t)) >= Pr(<= s) Pr(<= t): the conjecture in
/// rectangle form, exploratory.
inline InequalityReport check_strong_gci_bands(const CorrelationModel& model, const ThresholdVector& s,
                                               const ThresholdVector& t, const CheckOptions& opt) {
  const Stopwatch clock;
  detail::check_thresholds(model, s);
  detail::check_thresholds(model, t);
  Side lhs{1.0,
           {{"Pr(|X_i| <= s_i + t_i)", detail::band_prob(model, s.plus(t), opt)},
            {"Pr(|X_i| <= min(s_i, t_i))", detail::band_prob(model, s.min(t), opt)}}};
  Side rhs{1.0, {{"Pr(|X_i| <= s_i)", detail::band_prob(model, s, opt)}, {"Pr(|X_i| <= t_i)", detail::band_prob(model, t, opt)}}};
  auto r = make_report("strong-gci-bands", Backing::exploratory, std::move(lhs), std::move(rhs));
  r.instance = json{{"model", to_json(model)}, {"s", to_json(s)}, {"t", to_json(t)}};
  return detail::finish(std::move(r), opt, clock);
}

// ---------------------------------------------------------------------------
// Geometric forms

/// gamma(P + Q) gamma(P n Q) >= gamma(P) gamma(Q) with the exact planar sum.
inline InequalityReport check_strong_gci_2d(const Polygon2D& p, const Polygon2D& q, const CheckOptions& opt) {
  const Stopwatch clock;
  Side lhs{1.0,
           {{"gamma(K+T)", detail::poly_prob(polygon_minkowski_sum(p, q), opt)},
            {"gamma(K n T)", detail::poly_prob(polygon_intersection(p, q), opt)}}};
  Side rhs{1.0, {{"gamma(K)", detail::poly_prob(p, opt)}, {"gamma(T)", detail::poly_prob(q, opt)}}};
  auto r = make_report("strong-gci-2d", Backing::exploratory, std::move(lhs), std::move(rhs));
  r.instance = json{{"K", to_json(p)}, {"T", to_json(q)}, {"engine", to_string(opt.engine)}};
  return detail::finish(std::move(r), opt, clock);
}

namespace detail {

/// conv(K u T) for the slab T = {|<x, u>| <= w} is again a slab, of half-width
/// max(h_K(u), w); its measure is exact.
inline InequalityReport slab_report(double h_k, double w, const ProbabilityEstimate& k, const ProbabilityEstimate& k_cap_t) {
  const double hull = std::max(h_k, w);
  Side lhs{1.0, {{"gamma(conv(K u T))", ProbabilityEstimate::exact(std_normal_symmetric(hull))}, {"gamma(K n T)", k_cap_t}}};
  Side rhs{1.0, {{"gamma(K)", k}, {"gamma(T)", ProbabilityEstimate::exact(std_normal_symmetric(w))}}};
  auto r = make_report("slab", Backing::backed, std::move(lhs), std::move(rhs));
  r.trace = json{{"support_K_u", json_number(h_k)}, {"hull_half_width", json_number(hull)}};
  return r;
}

}  // namespace detail

/// Hull inequality with T the slab {|<x, u>| <= width}; u is normalized first.
inline InequalityReport check_slab(const Polygon2D& k, Vec2 u, double width, const CheckOptions& opt) {
  const Stopwatch clock;
  if (u.x == 0.0 && u.y == 0.0) fail(ErrorCode::ZeroDirection, "slab direction must be nonzero");
  if (!(width > 0.0)) fail(ErrorCode::InvalidParameters, "slab width must be positive");
  u = (1.0 / norm(u)) * u;
  const double h = support_function(k, u);
  const Polygon2D cap = width >= h ? k : polygon_clip_slab(k, u, width);
  auto r = detail::slab_report(h, width, detail::poly_prob(k, opt), detail::poly_prob(cap, opt));
  r.instance = json{{"K", to_json(k)}, {"direction", json::array({u.x, u.y})}, {"width", width}, {"engine", to_string(opt.engine)}};
  return detail::finish(std::move(r), opt, clock);
}

/// Band form: K n T is the band with the extra row u.
inline InequalityReport check_slab(const SymmetricBand& k, const Vector& u, double width, const CheckOptions& opt) {
  const Stopwatch clock;
  if (!(width > 0.0)) fail(ErrorCode::InvalidParameters, "slab width must be positive");
  const double len = u.norm();
  if (len == 0.0) fail(ErrorCode::ZeroDirection, "slab direction must be nonzero");
  const Vector unit = u / len;
  const double h = k.support(unit);
  ProbabilityEstimate cap;
  const auto whole = detail::band_prob(k.model(), k.thresholds(), opt);
  if (width >= h) {
    cap = whole;
  } else {
    Matrix rows(k.model().size() + 1, static_cast<Eigen::Index>(k.dim()));
    rows << k.model().factor_rows(), unit.transpose();
    std::vector<double> c = k.thresholds().values();
    c.push_back(width);
    cap = detail::band_prob(CorrelationModel::from_factor_rows(rows), ThresholdVector(c), opt);
  }
  auto r = detail::slab_report(h, width, whole, cap);
  r.instance = json{{"K", to_json(k)}, {"direction", to_json(Matrix(unit.transpose()))[0]}, {"width", width}};
  return detail::finish(std::move(r), opt, clock);
}

/// Strong GCI for unconditional bodies (a theorem). Planar bodies use the exact
/// sum; higher dimensions fall back to LP membership and Monte Carlo.
inline InequalityReport check_unconditional(const HPolytope& k, const HPolytope& t, const CheckOptions& opt) {
  const Stopwatch clock;
  if (!k.is_unconditional() || !t.is_unconditional()) fail(ErrorCode::NotUnconditional, "bodies must be unconditional");
  if (k.dim() != t.dim()) fail(ErrorCode::DimensionMismatch, "bodies live in different dimensions");
  InequalityReport r;
  if (k.dim() == 2) {
    const auto p = polygon_from_hpolytope(k), q = polygon_from_hpolytope(t);
    r = check_strong_gci_2d(p, q, opt);
  } else {
    const HPolytope cap = k.intersect(t);
    Side lhs{1.0,
             {{"gamma(K+T)", minkowski_measure_mc(k, t, opt.mc_budget, content_seed(opt.seed, k, t))},
              {"gamma(K n T)", gauss_measure_mc(cap, opt.mc_budget, content_seed(opt.seed, cap))}}};
    Side rhs{1.0,
             {{"gamma(K)", gauss_measure_mc(k, opt.mc_budget, content_seed(opt.seed, k))},
              {"gamma(T)", gauss_measure_mc(t, opt.mc_budget, content_seed(opt.seed, t))}}};
    r = make_report("", Backing::backed, std::move(lhs), std::move(rhs));
  }
  r.label = "unconditional";
  r.backing = Backing::backed;
  r.instance = json{{"K", to_json(k)}, {"T", to_json(t)}, {"engine", to_string(k.dim() == 2 ? opt.engine : Engine::mc)}};
  auto out = detail::finish(std::move(r), opt, clock);
  if (k.dim() != 2) out.budget = opt.mc_budget;
  return out;
}

/// Outcome of the pointwise lattice check; failures throw instead.
struct PremiseReport {
  std::size_t pairs = 0;
  Seed seed = 0;
  double runtime_ms = 0.0;
};

inline json to_json(const PremiseReport& r) {
  return json{{"kind", "premise"}, {"label", "lattice-premise"}, {"pairs", r.pairs}, {"failures", 0},
              {"seed", r.seed},    {"runtime_ms", r.runtime_ms}};
}

/// For x in K n Q and y in T n Q (Q the closed positive orthant) checks
/// min(x, y) in K n T and max(x, y) in K + T.
inline PremiseReport check_lattice_premise(const HPolytope& k, const HPolytope& t, std::size_t samples, Seed seed) {
  const Stopwatch clock;
  if (!k.is_unconditional() || !t.is_unconditional()) fail(ErrorCode::NotUnconditional, "bodies must be unconditional");
  if (k.dim() != t.dim()) fail(ErrorCode::DimensionMismatch, "bodies live in different dimensions");
  const std::size_t d = k.dim();
  std::mt19937_64 gen(derive_seed(seed, 0x1a77ULL));
  auto draw = [&](const HPolytope& body) {
    Vector reach(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) reach(static_cast<Eigen::Index>(j)) = body.support(Vector::Unit(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j)));
    Vector x(static_cast<Eigen::Index>(d));
    for (int attempt = 0; attempt < 1'000'000; ++attempt) {
      for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = reach(j) * uniform01(gen);
      if (body.contains(x)) return x;
    }
    fail(ErrorCode::DegenerateInput, "rejection sampling found no point in the body");
  };
  const MinkowskiMembership in_sum(k, t);
  for (std::size_t i = 0; i < samples; ++i) {
    const Vector x = draw(k), y = draw(t);
    const Vector meet = x.cwiseMin(y), join = x.cwiseMax(y);
    if (!k.contains(meet) || !t.contains(meet)) fail(ErrorCode::PremiseViolated, "meet left K n T at pair " + std::to_string(i));
    if (!in_sum(join)) fail(ErrorCode::PremiseViolated, "join left K + T at pair " + std::to_string(i));
  }
  return {samples, seed, clock.elapsed_ms()};
}

/// gamma(K) gamma(T) <= (1 - s)^(-d/2) gamma(alpha (K n T)) gamma(beta (K + T)) for
/// sqrt(s) <= t < 1, alpha = sqrt(2(1-s)/(1+t)), beta = sqrt((1-s)/(2(1-t))).
/// K + T is replaced by the outer band, which only enlarges the right side.
inline InequalityReport check_tehranchi(const CorrelationModel& model, const ThresholdVector& k_thr,
                                        const ThresholdVector& t_thr, double s, double t, const CheckOptions& opt) {
  const Stopwatch clock;
  detail::check_thresholds(model, k_thr);
  detail::check_thresholds(model, t_thr);
  if (!(s >= 0.0) || !(std::sqrt(s) <= t) || !(t < 1.0)) fail(ErrorCode::InvalidParameters, "need 0 <= s, sqrt(s) <= t < 1");
  const double alpha = std::sqrt(2.0 * (1.0 - s) / (1.0 + t));
  const double beta = std::sqrt((1.0 - s) / (2.0 * (1.0 - t)));
  const double d = static_cast<double>(model.dim());
  Side bound{std::pow(1.0 - s, -0.5 * d),
             {{"gamma(alpha (K n T))", detail::band_prob(model, k_thr.min(t_thr).scaled(alpha), opt)},
              {"gamma(beta (K + T))", detail::band_prob(model, k_thr.plus(t_thr).scaled(beta), opt)}}};
  Side product{1.0, {{"gamma(K)", detail::band_prob(model, k_thr, opt)}, {"gamma(T)", detail::band_prob(model, t_thr, opt)}}};
  auto r = make_report("tehranchi", Backing::backed, std::move(bound), std::move(product));
  r.instance = json{{"model", to_json(model)}, {"K", to_json(k_thr)}, {"T", to_json(t_thr)}, {"s", s}, {"t", t}};
  r.trace = json{{"alpha", alpha}, {"beta", beta}, {"dim", model.dim()}, {"sum_body", "outer band s_i + t_i"}};
  return detail::finish(std::move(r), opt, clock);
}

/// K = [-1/N, 1/N] x [-N, N], T its transpose: the hull inequality
/// gamma(conv(K u T)) gamma(K n T) >= gamma(K) gamma(T), plus the one-dimensional
/// comparison gamma_1([-N, N]) <= gamma_1([-r, r]), r = (N + 1/N)/sqrt(2), that it would force.
inline InequalityReport hull_counterexample(double n, const CheckOptions& opt) {
  const Stopwatch clock;
  if (!(n > 0.0) || !std::isfinite(n)) fail(ErrorCode::InvalidParameters, "N must be positive");
  const Polygon2D k = Polygon2D::box(1.0 / n, n), t = k.transposed();
  Side lhs{1.0,
           {{"gamma(conv(K u T))", detail::poly_prob(convex_hull_union(k, t), opt)},
            {"gamma(K n T)", detail::poly_prob(polygon_intersection(k, t), opt)}}};
  Side rhs{1.0, {{"gamma(K)", detail::poly_prob(k, opt)}, {"gamma(T)", detail::poly_prob(t, opt)}}};
  auto r = make_report("hull-counterexample", Backing::exploratory, std::move(lhs), std::move(rhs));

  const double radius = (n + 1.0 / n) / std::numbers::sqrt2;
  const auto one = CorrelationModel::identity(1);
  const double g_n = oracle_rect_prob(one, std::vector{-n}, std::vector{n}).value;
  const double g_r = oracle_rect_prob(one, std::vector{-radius}, std::vector{radius}).value;
  r.instance = json{{"N", n}, {"K", to_json(k)}, {"T", to_json(t)}, {"engine", to_string(opt.engine)}};
  r.trace = json{{"reduction",
                  {{"gamma1_N", g_n},
                   {"radius", radius},
                   {"gamma1_radius", g_r},
                   {"difference", g_n - g_r},
                   {"implied_inequality_holds", g_n <= g_r},
                   {"method", "quadrature-oracle"}}}};
  return detail::finish(std::move(r), opt, clock);
}

/// Strong-GCI ratio Pr(s+t) Pr(min) / (Pr(s) Pr(t)) for the N-fold product model
/// against the base ratio to the N-th power.
inline InequalityReport tensorize_check(const CorrelationModel& model, const ThresholdVector& s, const ThresholdVector& t,
                                        std::size_t copies, const CheckOptions& opt) {
  const Stopwatch clock;
  detail::check_thresholds(model, s);
  detail::check_thresholds(model, t);
  if (copies != 2 && copies != 3) fail(ErrorCode::InvalidParameters, "N must be 2 or 3");
  auto ratio = [&](const CorrelationModel& m, const ThresholdVector& a, const ThresholdVector& b) {
    const Estimate top = Estimate(detail::band_prob(m, a.plus(b), opt)) * Estimate(detail::band_prob(m, a.min(b), opt));
    const Estimate bottom = Estimate(detail::band_prob(m, a, opt)) * Estimate(detail::band_prob(m, b, opt));
    return top / bottom;
  };
  const Estimate base = ratio(model, s, t);
  const Estimate product = ratio(model.tensor_power(copies), s.repeated(copies), t.repeated(copies));
  const Estimate powered = pow(base, static_cast<int>(copies));

  auto as_term = [](std::string name, const Estimate& e) {
    return Term{std::move(name), {e.value, e.std_error, 0, Method::qmc, std::nullopt}};
  };
  auto r = make_report("tensorization", Backing::backed, Side{1.0, {as_term("ratio(K^N, T^N)", product)}},
                       Side{1.0, {as_term("ratio(K, T)^N", powered)}});
  // An identity: either side may be the larger one.
  r.verdict = std::abs(r.margin) <= kVerdictSigmas * r.std_error ? Verdict::supported : Verdict::violated;
  r.instance = json{{"model", to_json(model)}, {"s", to_json(s)}, {"t", to_json(t)}, {"N", copies}};
  r.trace = json{{"base_ratio", base.value}, {"base_ratio_stderr", base.std_error}};
  return detail::finish(std::move(r), opt, clock);
}

/// Rogers-Shephard in the plane: area(P + Q) area(P n Q) >= area(P) area(Q); exact geometry.
inline InequalityReport check_rogers_shephard(const Polygon2D& p, const Polygon2D& q) {
  const Stopwatch clock;
  auto area = [](std::string name, double a) { return Term{std::move(name), {a, 0.0, 0, Method::closed_form, std::nullopt}}; };
  auto r = make_report("rogers-shephard", Backing::backed,
                       Side{1.0, {area("area(K+T)", polygon_minkowski_sum(p, q).area()), area("area(K n T)", polygon_intersection(p, q).area())}},
                       Side{1.0, {area("area(K)", p.area()), area("area(T)", q.area())}});
  r.instance = json{{"K", to_json(p)}, {"T", to_json(q)}};
  r.runtime_ms = clock.elapsed_ms();
  return r;
}

}  // namespace gcilab
