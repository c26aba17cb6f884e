#pragma once

// Smooth convex objectives with analytic gradients.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "jfw/errors.hpp"
#include "jfw/linalg.hpp"

namespace jfw {

template <typename O>
concept Objective = requires(const O& obj, const typename O::Point& x) {
  typename O::Point;
  { obj.value(x) } -> std::convertible_to<double>;
  { obj.gradient(x) } -> std::convertible_to<typename O::Point>;
  { obj.zero_point() } -> std::convertible_to<typename O::Point>;
};

/// H(c) = c^2 on |c| <= delta, 2 delta |c| - delta^2 beyond. Note the
/// quadratic branch is c^2, not c^2 / 2.
inline double huber(double c, double delta) {
  const double a = std::abs(c);
  return a <= delta ? c * c : 2.0 * delta * a - delta * delta;
}

inline double huber_grad(double c, double delta) {
  if (std::abs(c) <= delta) return 2.0 * c;
  return c > 0.0 ? 2.0 * delta : -2.0 * delta;
}

namespace detail {

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::ShapeMismatch, what);
}

/// log(1 + exp(u)) without overflow.
inline double softplus(double u) { return std::log1p(std::exp(-std::abs(u))) + std::max(0.0, u); }

/// 1 / (1 + exp(-u)) without overflow.
inline double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

}  // namespace detail

/// (1/m) sum_i log(1 + exp(-b_i <a_i, x>)), labels in {-1, +1}.
class LogisticObjective {
 public:
  using Point = DenseVector;

  LogisticObjective(DenseMatrix features, DenseVector labels)
      : features_(std::move(features)), labels_(std::move(labels)) {
    detail::require_shape(features_.rows() == labels_.size(), "one label per feature row");
    if (features_.rows() < 1) throw Error(ErrorKind::EmptyDataset, "logistic objective needs m >= 1");
    for (Eigen::Index i = 0; i < labels_.size(); ++i) {
      if (labels_[i] != 1.0 && labels_[i] != -1.0) {
        throw Error(ErrorKind::ShapeMismatch, "labels must be -1 or +1");
      }
    }
  }

  double value(const Point& x) const {
    check(x);
    const DenseVector margins = labels_.cwiseProduct(features_ * x);
    double total = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) total += detail::softplus(-margins[i]);
    return total / static_cast<double>(samples());
  }

  Point gradient(const Point& x) const {
    check(x);
    const DenseVector margins = labels_.cwiseProduct(features_ * x);
    DenseVector weights(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
      weights[i] = -labels_[i] * detail::sigmoid(-margins[i]);
    }
    return features_.transpose() * weights / static_cast<double>(samples());
  }

  Point zero_point() const { return Point::Zero(features_.cols()); }
  Eigen::Index samples() const { return features_.rows(); }

 private:
  void check(const Point& x) const {
    detail::require_shape(x.size() == features_.cols(), "x must have one entry per feature");
  }

  DenseMatrix features_;
  DenseVector labels_;
};

/// (1/m) sum_i H_delta(y_i - <a_i, x>).
class HuberRidgeObjective {
 public:
  using Point = DenseVector;

  HuberRidgeObjective(DenseMatrix features, DenseVector targets, double delta)
      : features_(std::move(features)), targets_(std::move(targets)), delta_(delta) {
    detail::require_shape(features_.rows() == targets_.size(), "one target per feature row");
    if (features_.rows() < 1) throw Error(ErrorKind::EmptyDataset, "huber objective needs m >= 1");
    if (!(delta_ > 0.0)) throw Error(ErrorKind::ConfigError, "delta must be positive");
  }

  double value(const Point& x) const {
    check(x);
    const DenseVector r = targets_ - features_ * x;
    double total = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) total += huber(r[i], delta_);
    return total / static_cast<double>(features_.rows());
  }

  Point gradient(const Point& x) const {
    check(x);
    const DenseVector r = targets_ - features_ * x;
    DenseVector w(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) w[i] = -huber_grad(r[i], delta_);
    return features_.transpose() * w / static_cast<double>(features_.rows());
  }

  Point zero_point() const { return Point::Zero(features_.cols()); }
  double delta() const noexcept { return delta_; }

 private:
  void check(const Point& x) const {
    detail::require_shape(x.size() == features_.cols(), "x must have one entry per feature");
  }

  DenseMatrix features_;
  DenseVector targets_;
  double delta_;
};

struct Observation {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// sum over observed (i, j) of H_delta(A_ij - X_ij); unaveraged.
class MatrixCompletionObjective {
 public:
  using Point = DenseMatrix;

  MatrixCompletionObjective(std::vector<Observation> observed, int rows, int cols, double delta)
      : observed_(std::move(observed)), rows_(rows), cols_(cols), delta_(delta) {
    if (rows_ < 1 || cols_ < 1) throw Error(ErrorKind::ShapeMismatch, "matrix shape must be positive");
    if (!(delta_ > 0.0)) throw Error(ErrorKind::ConfigError, "delta must be positive");
    std::set<std::pair<int, int>> seen;
    for (const auto& o : observed_) {
      if (o.row < 0 || o.row >= rows_ || o.col < 0 || o.col >= cols_) {
        throw Error(ErrorKind::ShapeMismatch, "observation index outside the matrix");
      }
      if (!seen.emplace(o.row, o.col).second) {
        throw Error(ErrorKind::DuplicateRating, "duplicate observation (" + std::to_string(o.row) +
                                                    ", " + std::to_string(o.col) + ")");
      }
    }
  }

  double value(const Point& x) const {
    check(x);
    double total = 0.0;
    for (const auto& o : observed_) total += huber(o.value - x(o.row, o.col), delta_);
    return total;
  }

  Point gradient(const Point& x) const {
    check(x);
    Point g = Point::Zero(rows_, cols_);
    for (const auto& o : observed_) g(o.row, o.col) = -huber_grad(o.value - x(o.row, o.col), delta_);
    return g;
  }

  Point zero_point() const { return Point::Zero(rows_, cols_); }

  const std::vector<Observation>& observed() const noexcept { return observed_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  double delta() const noexcept { return delta_; }

 private:
  void check(const Point& x) const {
    detail::require_shape(x.rows() == rows_ && x.cols() == cols_, "x must match the rating matrix");
  }

  std::vector<Observation> observed_;
  int rows_;
  int cols_;
  double delta_;
};

/// sum_test H(A_ij - X_ij) / sum_test H(A_ij).
inline double normalized_test_error(const MatrixCompletionObjective& test, const DenseMatrix& x) {
  double denom = 0.0;
  for (const auto& o : test.observed()) denom += huber(o.value, test.delta());
  if (!(denom > 0.0)) throw Error(ErrorKind::DegenerateTestSet, "every test rating is zero");
  return test.value(x) / denom;
}

/// 0.5 x^T Q x + <q, x> + offset with Q symmetric PSD.
class QuadraticObjective {
 public:
  using Point = DenseVector;

  QuadraticObjective(DenseMatrix psd, DenseVector linear, double offset)
      : psd_(std::move(psd)), linear_(std::move(linear)), offset_(offset) {
    detail::require_shape(psd_.rows() == psd_.cols(), "quadratic term must be square");
    detail::require_shape(psd_.rows() == linear_.size(), "linear term must match the quadratic");
    if ((psd_ - psd_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, psd_.cwiseAbs().maxCoeff())) {
      throw Error(ErrorKind::ShapeMismatch, "quadratic term must be symmetric");
    }
  }

  double value(const Point& x) const {
    check(x);
    return 0.5 * x.dot(psd_ * x) + linear_.dot(x) + offset_;
  }

  Point gradient(const Point& x) const {
    check(x);
    return psd_ * x + linear_;
  }

  Point zero_point() const { return Point::Zero(linear_.size()); }

  const DenseMatrix& psd() const noexcept { return psd_; }
  const DenseVector& linear() const noexcept { return linear_; }
  double offset() const noexcept { return offset_; }

 private:
  void check(const Point& x) const {
    detail::require_shape(x.size() == linear_.size(), "x must match the quadratic dimension");
  }

  DenseMatrix psd_;
  DenseVector linear_;
  double offset_;
};

/// <c, x>; minimized over a ball by a single oracle call.
class LinearObjective {
 public:
  using Point = DenseVector;

  explicit LinearObjective(DenseVector c) : c_(std::move(c)) {}

  double value(const Point& x) const {
    detail::require_shape(x.size() == c_.size(), "x must match the cost vector");
    return c_.dot(x);
  }
  Point gradient(const Point& x) const {
    detail::require_shape(x.size() == c_.size(), "x must match the cost vector");
    return c_;
  }
  Point zero_point() const { return Point::Zero(c_.size()); }

 private:
  DenseVector c_;
};

}  // namespace jfw
