#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "gcilab/error.hpp"
#include "gcilab/gauss_model.hpp"

namespace gcilab::lp {

inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr std::size_t kIterationCap = 10000;

enum class Status { optimal, infeasible, unbounded };

struct Result {
  Status status = Status::infeasible;
  double objective = 0.0;
  Vector x;
};

namespace detail {

/// Dense tableau over columns [x+ | x- | slack | artificial | rhs].
class Tableau {
 public:
  Tableau(const Matrix& a, const Vector& b) : rows_(a.rows()), vars_(a.cols()) {
    artificial_ = 0;
    for (Eigen::Index i = 0; i < rows_; ++i)
      if (b(i) < 0.0) ++artificial_;
    cols_ = 2 * vars_ + rows_ + artificial_;
    t_ = Matrix::Zero(rows_, cols_ + 1);
    basis_.resize(static_cast<std::size_t>(rows_));
    Eigen::Index art = 2 * vars_ + rows_;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const double sign = b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).segment(0, vars_) = sign * a.row(i);
      t_.row(i).segment(vars_, vars_) = -sign * a.row(i);
      t_(i, 2 * vars_ + i) = sign;
      t_(i, cols_) = sign * b(i);
      if (b(i) < 0.0) {
        t_(i, art) = 1.0;
        basis_[static_cast<std::size_t>(i)] = art++;
      } else {
        basis_[static_cast<std::size_t>(i)] = 2 * vars_ + i;
      }
    }
  }

  Eigen::Index first_artificial() const { return 2 * vars_ + rows_; }
  bool has_artificials() const { return artificial_ > 0; }

  /// Minimizes cost . z over the first `usable` columns with Bland's rule.
  Status minimize(const Vector& cost, Eigen::Index usable, std::size_t& iterations) {
    while (true) {
      if (++iterations > kIterationCap) fail(ErrorCode::SolverFailure, "simplex iteration cap exceeded");
      Eigen::Index entering = -1;
      for (Eigen::Index j = 0; j < usable && entering < 0; ++j) {
        if (is_basic(j)) continue;
        double reduced = cost(j);
        for (Eigen::Index i = 0; i < rows_; ++i) reduced -= cost(basis_[static_cast<std::size_t>(i)]) * t_(i, j);
        if (reduced < -kPivotEps) entering = j;
      }
      if (entering < 0) return Status::optimal;

      Eigen::Index leaving = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double coef = t_(i, entering);
        if (coef <= kPivotEps) continue;
        const double ratio = t_(i, cols_) / coef;
        if (ratio < best - 1e-12 ||
            (std::abs(ratio - best) <= 1e-12 && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)])) {
          best = ratio;
          leaving = i;
        }
      }
      if (leaving < 0) return Status::unbounded;
      pivot(leaving, entering);
    }
  }

  /// Moves artificial variables that stayed basic at level zero out of the basis.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < first_artificial()) continue;
      for (Eigen::Index j = 0; j < first_artificial(); ++j) {
        if (!is_basic(j) && std::abs(t_(i, j)) > kPivotEps) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  double objective(const Vector& cost) const {
    double v = 0.0;
    for (Eigen::Index i = 0; i < rows_; ++i) v += cost(basis_[static_cast<std::size_t>(i)]) * t_(i, cols_);
    return v;
  }

  Vector primal() const {
    Vector z = Vector::Zero(cols_);
    for (Eigen::Index i = 0; i < rows_; ++i) z(basis_[static_cast<std::size_t>(i)]) = t_(i, cols_);
    return z.segment(0, vars_) - z.segment(vars_, vars_);
  }

  Eigen::Index cols() const { return cols_; }
  Eigen::Index vars() const { return vars_; }

 private:
  static constexpr double kPivotEps = 1e-11;

  bool is_basic(Eigen::Index j) const {
    for (Eigen::Index b : basis_)
      if (b == j) return true;
    return false;
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  Eigen::Index rows_, vars_, cols_ = 0, artificial_ = 0;
  Matrix t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace detail

/// maximize c.x subject to A x <= b, x free. Two-phase simplex with Bland's rule;
/// phase one declares infeasibility when the artificial sum exceeds kFeasibilityTol.
inline Result maximize(const Matrix& a, const Vector& b, const Vector& c) {
  if (a.rows() != b.size() || a.cols() != c.size()) fail(ErrorCode::DimensionMismatch, "LP shapes disagree");
  detail::Tableau tab(a, b);
  std::size_t iterations = 0;
  if (tab.has_artificials()) {
    Vector phase1 = Vector::Zero(tab.cols());
    phase1.tail(tab.cols() - tab.first_artificial()).setOnes();
    tab.minimize(phase1, tab.cols(), iterations);
    if (tab.objective(phase1) > kFeasibilityTol) return {Status::infeasible, 0.0, Vector()};
    tab.expel_artificials();
  }
  Vector cost = Vector::Zero(tab.cols());
  cost.segment(0, tab.vars()) = -c;
  cost.segment(tab.vars(), tab.vars()) = c;
  if (tab.minimize(cost, tab.first_artificial(), iterations) == Status::unbounded)
    return {Status::unbounded, std::numeric_limits<double>::infinity(), Vector()};
  Vector x = tab.primal();
  return {Status::optimal, c.dot(x), x};
}

/// Whether {x : A x <= b} is non-empty (to kFeasibilityTol).
inline bool feasible(const Matrix& a, const Vector& b) {
  return maximize(a, b, Vector::Zero(a.cols())).status != Status::infeasible;
}

}  // namespace gcilab::lp
