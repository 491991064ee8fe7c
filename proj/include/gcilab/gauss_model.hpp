#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "gcilab/error.hpp"
#include "gcilab/normal.hpp"
#include "gcilab/rng.hpp"

namespace gcilab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kPivotTol = 1e-10;

/// Zero-mean Gaussian X = U Y with Y standard in R^d. Row i of U is u_i, and
/// sigma = U U^T. Immutable once built.
class CorrelationModel {
 public:
  /// Pivoted Cholesky; rank is the number of pivots above kPivotTol.
  static CorrelationModel from_covariance(const Matrix& m);

  /// Takes u_i as given; the ambient dimension is the column count.
  static CorrelationModel from_factor_rows(Matrix rows) {
    if (rows.rows() == 0 || rows.cols() == 0) fail(ErrorCode::InvalidDimension, "empty factor");
    Matrix sigma = rows * rows.transpose();
    return CorrelationModel(std::move(sigma), std::move(rows));
  }

  /// n uniform unit vectors in R^d (normalized Gaussian draws).
  static CorrelationModel random(std::size_t n, std::size_t d, Seed seed) {
    if (d < 1 || d > n) fail(ErrorCode::InvalidDimension, "random_correlation needs 1 <= d <= n");
    NormalSampler normal(seed);
    Matrix rows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      double norm = 0.0;
      do {
        for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = normal();
        norm = rows.row(i).norm();
      } while (norm < 1e-12);
      rows.row(i) /= norm;
    }
    return from_factor_rows(std::move(rows));
  }

  /// Exchangeable correlation: unit variances, all off-diagonals rho.
  static CorrelationModel equicorrelated(std::size_t n, double rho) {
    Matrix m = Matrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), rho);
    m.diagonal().setOnes();
    return from_covariance(m);
  }

  static CorrelationModel identity(std::size_t n) {
    return from_factor_rows(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }

  /// Independent copies stacked block-diagonally (the N-fold product).
  static CorrelationModel block_diagonal(std::span<const CorrelationModel> blocks) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& b : blocks) {
      rows += b.factor_.rows();
      cols += b.factor_.cols();
    }
    if (rows == 0) fail(ErrorCode::InvalidDimension, "no blocks");
    Matrix u = Matrix::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
      u.block(r, c, b.factor_.rows(), b.factor_.cols()) = b.factor_;
      r += b.factor_.rows();
      c += b.factor_.cols();
    }
    return from_factor_rows(std::move(u));
  }

  CorrelationModel tensor_power(std::size_t copies) const {
    std::vector<CorrelationModel> blocks(copies, *this);
    return block_diagonal(blocks);
  }

  /// Model of the sub-vector (X_i)_{i in idx}.
  CorrelationModel select(std::span<const std::size_t> idx) const {
    Matrix u(static_cast<Eigen::Index>(idx.size()), factor_.cols());
    for (std::size_t k = 0; k < idx.size(); ++k) u.row(static_cast<Eigen::Index>(k)) = factor_.row(static_cast<Eigen::Index>(idx[k]));
    return from_factor_rows(std::move(u));
  }

  /// X_i / sigma_i for every coordinate with positive variance.
  CorrelationModel normalized() const {
    Matrix u = factor_;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const double s = std::sqrt(sigma_(i, i));
      if (s > 0.0) u.row(i) /= s;
    }
    return from_factor_rows(std::move(u));
  }

  CorrelationModel with_row_negated(std::size_t i) const {
    Matrix u = factor_;
    u.row(static_cast<Eigen::Index>(i)) *= -1.0;
    return from_factor_rows(std::move(u));
  }

  /// Appends u as a new last coordinate.
  CorrelationModel with_row(const Vector& u) const {
    if (u.size() != factor_.cols()) fail(ErrorCode::DimensionMismatch, "row length differs from model dimension");
    Matrix rows(factor_.rows() + 1, factor_.cols());
    rows.topRows(factor_.rows()) = factor_;
    rows.row(factor_.rows()) = u.transpose();
    return from_factor_rows(std::move(rows));
  }

  bool is_standardized(double tol = 1e-10) const {
    return ((sigma_.diagonal().array() - 1.0).abs() <= tol).all();
  }

  std::size_t size() const { return static_cast<std::size_t>(sigma_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(factor_.cols()); }
  const Matrix& sigma() const { return sigma_; }
  const Matrix& factor_rows() const { return factor_; }
  Vector row(std::size_t i) const { return factor_.row(static_cast<Eigen::Index>(i)).transpose(); }
  double stddev(std::size_t i) const {
    return std::sqrt(std::max(0.0, sigma_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i))));
  }

  /// Models are equal when they realize the same factor (same body geometry).
  bool same_factor(const CorrelationModel& other) const {
    return factor_.rows() == other.factor_.rows() && factor_.cols() == other.factor_.cols() &&
           (factor_ - other.factor_).cwiseAbs().maxCoeff() <= 1e-12;
  }

  void hash_into(ContentHash& h) const {
    h.add_bits(static_cast<std::uint64_t>(factor_.rows())).add_bits(static_cast<std::uint64_t>(factor_.cols()));
    for (Eigen::Index i = 0; i < factor_.rows(); ++i)
      for (Eigen::Index j = 0; j < factor_.cols(); ++j) h.add(factor_(i, j));
  }

 private:
  CorrelationModel(Matrix sigma, Matrix factor) : sigma_(std::move(sigma)), factor_(std::move(factor)) {}

  Matrix sigma_;
  Matrix factor_;
};

inline Matrix gram(const Matrix& rows) { return rows * rows.transpose(); }

inline CorrelationModel CorrelationModel::from_covariance(const Matrix& m) {
  const Eigen::Index n = m.rows();
  if (n == 0 || m.cols() != n) fail(ErrorCode::NotSymmetric, "covariance must be a non-empty square matrix");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) fail(ErrorCode::NotSymmetric, "matrix is not symmetric");

  Matrix residual = 0.5 * (m + m.transpose());
  Matrix l = Matrix::Zero(n, n);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});

  Eigen::Index rank = 0;
  for (; rank < n; ++rank) {
    // Largest remaining diagonal becomes the pivot; first index wins ties.
    Eigen::Index best = rank;
    for (Eigen::Index i = rank + 1; i < n; ++i)
      if (residual(perm[i], perm[i]) > residual(perm[best], perm[best])) best = i;
    for (Eigen::Index i = rank; i < n; ++i)
      if (residual(perm[i], perm[i]) < -kPivotTol) fail(ErrorCode::NotPSD, "negative pivot in Cholesky factorization");
    const double pivot = residual(perm[best], perm[best]);
    if (pivot <= kPivotTol) break;
    std::swap(perm[rank], perm[best]);

    const Eigen::Index p = perm[rank];
    const double root = std::sqrt(pivot);
    for (Eigen::Index i = rank; i < n; ++i) l(perm[i], rank) = residual(perm[i], p) / root;
    for (Eigen::Index i = rank; i < n; ++i)
      for (Eigen::Index j = rank; j < n; ++j) residual(perm[i], perm[j]) -= l(perm[i], rank) * l(perm[j], rank);
  }
  // A PSD remainder with diagonal below tolerance has off-diagonals below it too.
  for (Eigen::Index i = rank; i < n; ++i)
    for (Eigen::Index j = rank; j < n; ++j)
      if (std::abs(residual(perm[i], perm[j])) > 1e-8) fail(ErrorCode::NotPSD, "indefinite remainder after factorization");

  if (rank == 0) {
    // All-zero covariance: keep one dimension so the model stays well formed.
    return CorrelationModel(m, Matrix::Zero(n, 1));
  }
  return CorrelationModel(0.5 * (m + m.transpose()), l.leftCols(rank));
}

/// Symmetric thresholds c_i in (0, inf].
class ThresholdVector {
 public:
  ThresholdVector() = default;
  ThresholdVector(std::initializer_list<double> values) : ThresholdVector(std::vector<double>(values)) {}
  explicit ThresholdVector(std::vector<double> values) : bounds_(std::move(values)) {
    for (double v : bounds_)
      if (!(v > 0.0)) fail(ErrorCode::InvalidThreshold, "thresholds must be strictly positive");
  }

  static ThresholdVector constant(std::size_t n, double value) { return ThresholdVector(std::vector<double>(n, value)); }
  static ThresholdVector unbounded(std::size_t n) { return constant(n, kInf); }

  std::size_t size() const { return bounds_.size(); }
  double operator[](std::size_t i) const { return bounds_[i]; }
  const std::vector<double>& values() const { return bounds_; }

  ThresholdVector scaled(double factor) const {
    std::vector<double> out(bounds_);
    for (double& v : out) v *= factor;
    return ThresholdVector(std::move(out));
  }
  ThresholdVector with(std::size_t i, double value) const {
    std::vector<double> out(bounds_);
    out.at(i) = value;
    return ThresholdVector(std::move(out));
  }
  /// Extended arithmetic: inf + x = inf.
  ThresholdVector plus(const ThresholdVector& other) const {
    check_same_size(other);
    std::vector<double> out(bounds_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = bounds_[i] + other.bounds_[i];
    return ThresholdVector(std::move(out));
  }
  /// min(inf, x) = x.
  ThresholdVector min(const ThresholdVector& other) const {
    check_same_size(other);
    std::vector<double> out(bounds_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(bounds_[i], other.bounds_[i]);
    return ThresholdVector(std::move(out));
  }
  ThresholdVector repeated(std::size_t copies) const {
    std::vector<double> out;
    out.reserve(bounds_.size() * copies);
    for (std::size_t k = 0; k < copies; ++k) out.insert(out.end(), bounds_.begin(), bounds_.end());
    return ThresholdVector(std::move(out));
  }

  bool operator==(const ThresholdVector&) const = default;

 private:
  void check_same_size(const ThresholdVector& other) const {
    if (other.size() != size()) fail(ErrorCode::DimensionMismatch, "threshold vectors differ in length");
  }

  std::vector<double> bounds_;
};

}  // namespace gcilab
