#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "gcilab/error.hpp"
#include "gcilab/gauss_model.hpp"
#include "gcilab/normal.hpp"
#include "gcilab/simplex.hpp"

namespace gcilab {

inline constexpr double kGeomTol = 1e-12;
inline constexpr double kMembershipTol = 1e-12;

struct Vec2 {
  double x = 0.0, y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 rotate(Vec2 a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// Centrally symmetric convex polygon, vertices counterclockwise starting from
/// the lowest (then leftmost) vertex, no repeated or collinear vertices.
class Polygon2D {
 public:
  /// Convex hull of the points; must be symmetric about the origin with
  /// non-empty interior.
  static Polygon2D from_points(std::vector<Vec2> pts) {
    Polygon2D p;
    p.v_ = hull(std::move(pts));
    if (p.v_.size() < 4) fail(ErrorCode::DegenerateInput, "symmetric polygon needs at least 4 vertices");
    p.check_symmetric();
    return p;
  }

  /// [-a, a] x [-b, b].
  static Polygon2D box(double a, double b) { return from_points({{-a, -b}, {a, -b}, {a, b}, {-a, b}}); }

  /// Image of box(a, b) under rotation by `angle`.
  static Polygon2D rotated_box(double a, double b, double angle) {
    std::vector<Vec2> pts{{-a, -b}, {a, -b}, {a, b}, {-a, b}};
    for (auto& q : pts) q = rotate(q, angle);
    return from_points(std::move(pts));
  }

  /// {|x|/a + |y|/b <= 1}.
  static Polygon2D diamond(double a, double b) { return from_points({{a, 0}, {0, b}, {-a, 0}, {0, -b}}); }

  /// Regular 2m-gon with circumradius r.
  static Polygon2D regular(std::size_t half_count, double r, double phase = 0.0) {
    std::vector<Vec2> pts;
    const std::size_t m = 2 * half_count;
    for (std::size_t k = 0; k < m; ++k) {
      const double t = phase + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
      pts.push_back({r * std::cos(t), r * std::sin(t)});
    }
    return from_points(std::move(pts));
  }

  const std::vector<Vec2>& vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }
  Vec2 edge(std::size_t i) const { return v_[(i + 1) % v_.size()] - v_[i]; }

  /// Outward unit normal and offset of edge i.
  std::pair<Vec2, double> facet(std::size_t i) const {
    const Vec2 e = edge(i);
    const double len = norm(e);
    const Vec2 n{e.y / len, -e.x / len};
    return {n, dot(n, v_[i])};
  }

  double area() const {
    double s = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) s += cross(v_[i], v_[(i + 1) % v_.size()]);
    return 0.5 * s;
  }

  Polygon2D scaled(double k) const {
    std::vector<Vec2> pts;
    for (const auto& q : v_) pts.push_back(k * q);
    return from_points(std::move(pts));
  }

  /// Applies the linear map [[a, b], [c, d]].
  Polygon2D transformed(double a, double b, double c, double d) const {
    std::vector<Vec2> pts;
    for (const auto& q : v_) pts.push_back({a * q.x + b * q.y, c * q.x + d * q.y});
    return from_points(std::move(pts));
  }

  Polygon2D transposed() const { return transformed(0, 1, 1, 0); }

  bool operator==(const Polygon2D& other) const { return v_ == other.v_; }

  /// Monotone chain; drops duplicates and collinear points. Result starts at the
  /// lowest-then-leftmost vertex and runs counterclockwise.
  static std::vector<Vec2> hull(std::vector<Vec2> pts) {
    for (auto& q : pts) {
      if (q.x == 0.0) q.x = 0.0;
      if (q.y == 0.0) q.y = 0.0;
    }
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](Vec2 a, Vec2 b) { return std::abs(a.x - b.x) <= kGeomTol && std::abs(a.y - b.y) <= kGeomTol; }),
              pts.end());
    if (pts.size() < 3) return pts;
    double scale = 0.0;
    for (const auto& q : pts) scale = std::max({scale, std::abs(q.x), std::abs(q.y)});
    const double eps = kGeomTol * scale * scale;
    std::vector<Vec2> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& q : pts) {
      while (k >= 2 && cross(h[k - 1] - h[k - 2], q - h[k - 2]) <= 0.0) --k;
      h[k++] = q;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
      while (k >= lower && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
      h[k++] = pts[i];
    }
    h.resize(k - 1);
    // The chains never test their shared endpoints, so sweep the closed ring once more.
    for (bool changed = true; changed && h.size() > 3;) {
      changed = false;
      for (std::size_t i = 0; i < h.size() && h.size() > 3; ++i) {
        const Vec2 prev = h[(i + h.size() - 1) % h.size()], next = h[(i + 1) % h.size()];
        if (cross(h[i] - prev, next - prev) <= eps) {
          h.erase(h.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
          break;
        }
      }
    }
    const auto start = std::min_element(h.begin(), h.end(), [](Vec2 a, Vec2 b) { return a.y < b.y || (a.y == b.y && a.x < b.x); });
    std::rotate(h.begin(), start, h.end());
    return h;
  }

 private:
  void check_symmetric() const {
    double scale = 0.0;
    for (const auto& q : v_) scale = std::max(scale, norm(q));
    const double tol = 1e-9 * std::max(1.0, scale);
    for (const auto& q : v_) {
      const bool found = std::any_of(v_.begin(), v_.end(), [&](Vec2 w) { return norm(w + q) <= tol; });
      if (!found) fail(ErrorCode::NotSymmetric, "polygon is not centrally symmetric");
    }
  }

  std::vector<Vec2> v_;
};

/// Closed halfspaces <n, x> <= offset with unit normals, closed under n -> -n.
class HPolytope {
 public:
  struct Halfspace {
    Vector normal;
    double offset;
  };

  /// Normalizes every row and adds the mirrored halfspace where it is missing.
  static HPolytope from_halfspaces(const Matrix& normals, const Vector& offsets) {
    if (normals.rows() != offsets.size() || normals.rows() == 0) fail(ErrorCode::DimensionMismatch, "one offset per normal");
    HPolytope p;
    p.dim_ = static_cast<std::size_t>(normals.cols());
    for (Eigen::Index i = 0; i < normals.rows(); ++i) {
      const double len = normals.row(i).norm();
      if (len == 0.0) fail(ErrorCode::ZeroDirection, "zero halfspace normal");
      if (!(offsets(i) > 0.0)) fail(ErrorCode::InvalidThreshold, "halfspace offsets must be positive");
      p.add(normals.row(i).transpose() / len, offsets(i) / len);
      p.add(-normals.row(i).transpose() / len, offsets(i) / len);
    }
    p.rebuild();
    return p;
  }

  static HPolytope box(std::span<const double> half_widths) {
    const auto d = static_cast<Eigen::Index>(half_widths.size());
    return from_halfspaces(Matrix::Identity(d, d), Eigen::Map<const Vector>(half_widths.data(), d));
  }

  static HPolytope from_polygon(const Polygon2D& poly) {
    Matrix n(static_cast<Eigen::Index>(poly.size()), 2);
    Vector b(static_cast<Eigen::Index>(poly.size()));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto [nv, off] = poly.facet(i);
      n(static_cast<Eigen::Index>(i), 0) = nv.x;
      n(static_cast<Eigen::Index>(i), 1) = nv.y;
      b(static_cast<Eigen::Index>(i)) = off;
    }
    return from_halfspaces(n, b);
  }

  std::size_t dim() const { return dim_; }
  const std::vector<Halfspace>& halfspaces() const { return h_; }
  const Matrix& normals() const { return a_; }
  const Vector& offsets() const { return b_; }

  bool contains(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != dim_) fail(ErrorCode::DimensionMismatch, "point dimension differs from body");
    return ((a_ * x - b_).array() <= kMembershipTol).all();
  }

  /// h(u) = max <u, x> over the body, by linear programming; +inf if unbounded.
  double support(const Vector& u) const {
    if (static_cast<std::size_t>(u.size()) != dim_) fail(ErrorCode::DimensionMismatch, "direction dimension differs from body");
    if (u.norm() == 0.0) fail(ErrorCode::ZeroDirection, "support function needs a nonzero direction");
    return lp::maximize(a_, b_, u).objective;
  }

  bool is_bounded() const {
    for (std::size_t j = 0; j < dim_; ++j) {
      Vector e = Vector::Zero(static_cast<Eigen::Index>(dim_));
      e(static_cast<Eigen::Index>(j)) = 1.0;
      if (!std::isfinite(support(e)) || !std::isfinite(support(-e))) return false;
    }
    return true;
  }

  /// Symmetric under every coordinate reflection (halfspaces map onto halfspaces).
  bool is_unconditional(double tol = 1e-9) const {
    for (const auto& hs : h_) {
      for (std::size_t mask = 0; mask < (std::size_t{1} << dim_); ++mask) {
        Vector flipped = hs.normal;
        for (std::size_t j = 0; j < dim_; ++j)
          if (mask >> j & 1U) flipped(static_cast<Eigen::Index>(j)) *= -1.0;
        const bool found = std::any_of(h_.begin(), h_.end(), [&](const Halfspace& o) {
          return (o.normal - flipped).norm() <= tol && std::abs(o.offset - hs.offset) <= tol * std::max(1.0, hs.offset);
        });
        if (!found) return false;
      }
    }
    return true;
  }

  /// Intersection: union of the halfspace lists.
  HPolytope intersect(const HPolytope& other) const {
    if (other.dim_ != dim_) fail(ErrorCode::DimensionMismatch, "bodies live in different dimensions");
    HPolytope p = *this;
    for (const auto& hs : other.h_) p.add(hs.normal, hs.offset);
    p.rebuild();
    return p;
  }

  HPolytope scaled(double k) const {
    HPolytope p = *this;
    for (auto& hs : p.h_) hs.offset *= k;
    p.rebuild();
    return p;
  }

 private:
  void add(const Vector& n, double off) {
    for (const auto& hs : h_)
      if ((hs.normal - n).norm() <= 1e-12 && std::abs(hs.offset - off) <= 1e-12 * std::max(1.0, off)) return;
    h_.push_back({n, off});
  }
  void rebuild() {
    a_.resize(static_cast<Eigen::Index>(h_.size()), static_cast<Eigen::Index>(dim_));
    b_.resize(static_cast<Eigen::Index>(h_.size()));
    for (std::size_t i = 0; i < h_.size(); ++i) {
      a_.row(static_cast<Eigen::Index>(i)) = h_[i].normal.transpose();
      b_(static_cast<Eigen::Index>(i)) = h_[i].offset;
    }
  }

  std::size_t dim_ = 0;
  std::vector<Halfspace> h_;
  Matrix a_;
  Vector b_;
};

/// {y in R^d : |<y, u_i>| <= c_i for all i}; the rows u_i come from the model.
class SymmetricBand {
 public:
  SymmetricBand(CorrelationModel model, ThresholdVector c) : model_(std::move(model)), c_(std::move(c)) {
    if (c_.size() != model_.size()) fail(ErrorCode::DimensionMismatch, "one threshold per model row");
  }

  /// Facet pairs of a symmetric polygon as band rows (unit normals, support offsets).
  static SymmetricBand from_polygon(const Polygon2D& poly) {
    const std::size_t m = poly.size() / 2;
    Matrix u(static_cast<Eigen::Index>(m), 2);
    std::vector<double> c(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto [n, off] = poly.facet(i);
      u(static_cast<Eigen::Index>(i), 0) = n.x;
      u(static_cast<Eigen::Index>(i), 1) = n.y;
      c[i] = off;
    }
    return {CorrelationModel::from_factor_rows(std::move(u)), ThresholdVector(std::move(c))};
  }

  const CorrelationModel& model() const { return model_; }
  const ThresholdVector& thresholds() const { return c_; }
  std::size_t dim() const { return model_.dim(); }

  bool contains(const Vector& y) const {
    if (static_cast<std::size_t>(y.size()) != dim()) fail(ErrorCode::DimensionMismatch, "point dimension differs from body");
    const Vector proj = model_.factor_rows() * y;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (std::abs(proj(static_cast<Eigen::Index>(i))) > c_[i] + kMembershipTol) return false;
    return true;
  }

  /// Halfspace form of the finite constraints (normals not normalized).
  std::pair<Matrix, Vector> constraints() const {
    std::vector<std::size_t> finite;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (std::isfinite(c_[i])) finite.push_back(i);
    Matrix a(static_cast<Eigen::Index>(2 * finite.size()), static_cast<Eigen::Index>(dim()));
    Vector b(static_cast<Eigen::Index>(2 * finite.size()));
    for (std::size_t k = 0; k < finite.size(); ++k) {
      const auto r = model_.factor_rows().row(static_cast<Eigen::Index>(finite[k]));
      a.row(static_cast<Eigen::Index>(2 * k)) = r;
      a.row(static_cast<Eigen::Index>(2 * k + 1)) = -r;
      b(static_cast<Eigen::Index>(2 * k)) = b(static_cast<Eigen::Index>(2 * k + 1)) = c_[finite[k]];
    }
    return {a, b};
  }

  double support(const Vector& u) const {
    if (static_cast<std::size_t>(u.size()) != dim()) fail(ErrorCode::DimensionMismatch, "direction dimension differs from body");
    if (u.norm() == 0.0) fail(ErrorCode::ZeroDirection, "support function needs a nonzero direction");
    const auto [a, b] = constraints();
    if (a.rows() == 0) return kInf;
    return lp::maximize(a, b, u).objective;
  }

  SymmetricBand scaled(double k) const { return {model_, c_.scaled(k)}; }

 private:
  CorrelationModel model_;
  ThresholdVector c_;
};

// ---------------------------------------------------------------------------
// Band algebra

inline void require_same_model(const SymmetricBand& k, const SymmetricBand& t) {
  if (!k.model().same_factor(t.model())) fail(ErrorCode::ModelMismatch, "bands must share a model");
}

/// Thresholds min(s_i, t_i): exactly K intersect T.
inline SymmetricBand band_intersect(const SymmetricBand& k, const SymmetricBand& t) {
  require_same_model(k, t);
  return {k.model(), k.thresholds().min(t.thresholds())};
}

/// Thresholds s_i + t_i: contains K + T, with equality when the rows exhaust
/// the facet normals of the sum.
inline SymmetricBand band_sum_outer(const SymmetricBand& k, const SymmetricBand& t) {
  require_same_model(k, t);
  return {k.model(), k.thresholds().plus(t.thresholds())};
}

// ---------------------------------------------------------------------------
// Polygon operations

/// Edge merge: walks the edges of both polygons in order of angle, starting
/// from the sum of their lowest vertices.
inline Polygon2D polygon_minkowski_sum(const Polygon2D& p, const Polygon2D& q) {
  auto angle = [](Vec2 e) {
    const double t = std::atan2(e.y, e.x);
    return t < 0.0 ? t + 2.0 * std::numbers::pi : t;
  };
  std::vector<std::pair<double, Vec2>> edges;
  for (std::size_t i = 0; i < p.size(); ++i) edges.emplace_back(angle(p.edge(i)), p.edge(i));
  for (std::size_t i = 0; i < q.size(); ++i) edges.emplace_back(angle(q.edge(i)), q.edge(i));
  std::stable_sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Vec2> out;
  Vec2 cur = p.vertices().front() + q.vertices().front();
  for (const auto& [t, e] : edges) {
    out.push_back(cur);
    cur = cur + e;
  }
  return Polygon2D::from_points(std::move(out));
}

inline Polygon2D convex_hull_union(const Polygon2D& p, const Polygon2D& q) {
  std::vector<Vec2> pts = p.vertices();
  pts.insert(pts.end(), q.vertices().begin(), q.vertices().end());
  return Polygon2D::from_points(std::move(pts));
}

/// Keeps the part of `poly` with <n, x> <= offset (Sutherland-Hodgman step).
inline std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, Vec2 n, double offset) {
  std::vector<Vec2> out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 cur = poly[i], nxt = poly[(i + 1) % m];
    const double fc = dot(n, cur) - offset, fn = dot(n, nxt) - offset;
    if (fc <= kGeomTol) out.push_back(cur);
    if ((fc < -kGeomTol && fn > kGeomTol) || (fc > kGeomTol && fn < -kGeomTol)) {
      const double t = fc / (fc - fn);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  return out;
}

inline Polygon2D polygon_intersection(const Polygon2D& p, const Polygon2D& q) {
  std::vector<Vec2> pts = p.vertices();
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto [n, off] = q.facet(i);
    pts = clip_halfplane(pts, n, off);
  }
  return Polygon2D::from_points(std::move(pts));
}

/// P intersected with the slab |<x, u>| <= width.
inline Polygon2D polygon_clip_slab(const Polygon2D& p, Vec2 u, double width) {
  auto pts = clip_halfplane(p.vertices(), u, width);
  pts = clip_halfplane(pts, -u, width);
  return Polygon2D::from_points(std::move(pts));
}

/// Vertices of a bounded 2-D H-polytope.
inline Polygon2D polygon_from_hpolytope(const HPolytope& h) {
  if (h.dim() != 2) fail(ErrorCode::DimensionMismatch, "polygon conversion needs a 2-D body");
  // A bounded symmetric body lies inside the box spanned by its axis supports.
  const double bx = h.support(Vector::Unit(2, 0)), by = h.support(Vector::Unit(2, 1));
  if (!std::isfinite(bx) || !std::isfinite(by)) fail(ErrorCode::DegenerateInput, "H-polytope is unbounded");
  std::vector<Vec2> pts{{-2 * bx, -2 * by}, {2 * bx, -2 * by}, {2 * bx, 2 * by}, {-2 * bx, 2 * by}};
  for (const auto& hs : h.halfspaces()) pts = clip_halfplane(pts, {hs.normal(0), hs.normal(1)}, hs.offset);
  return Polygon2D::from_points(std::move(pts));
}

// ---------------------------------------------------------------------------
// Support functions and membership

inline double support_function(const Polygon2D& p, Vec2 u) {
  if (u.x == 0.0 && u.y == 0.0) fail(ErrorCode::ZeroDirection, "support function needs a nonzero direction");
  double best = -kInf;
  for (const auto& v : p.vertices()) best = std::max(best, dot(u, v));
  return best;
}
inline double support_function(const HPolytope& h, const Vector& u) { return h.support(u); }
inline double support_function(const SymmetricBand& b, const Vector& u) { return b.support(u); }

inline bool contains(const Polygon2D& p, Vec2 x) {
  const auto& v = p.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 e = p.edge(i);
    if (cross(e, x - v[i]) < -kMembershipTol * std::max(1.0, norm(e))) return false;
  }
  return true;
}
inline bool contains(const HPolytope& h, const Vector& x) { return h.contains(x); }
inline bool contains(const SymmetricBand& b, const Vector& y) { return b.contains(y); }

/// x in K + T iff some k in K has x - k in T; decided by phase-one feasibility of
/// A_K k <= b_K, -A_T k <= b_T - A_T x.
inline bool minkowski_contains(const HPolytope& k, const HPolytope& t, const Vector& x) {
  if (k.dim() != t.dim() || static_cast<std::size_t>(x.size()) != k.dim())
    fail(ErrorCode::DimensionMismatch, "bodies and point must share a dimension");
  const Eigen::Index rk = k.normals().rows(), rt = t.normals().rows();
  Matrix a(rk + rt, static_cast<Eigen::Index>(k.dim()));
  Vector b(rk + rt);
  a.topRows(rk) = k.normals();
  b.head(rk) = k.offsets();
  a.bottomRows(rt) = -t.normals();
  b.tail(rt) = t.offsets() - t.normals() * x;
  return lp::feasible(a, b);
}

}  // namespace gcilab
