#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "jfw/errors.hpp"

namespace jfw {

using DenseVector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// Top singular triple; only the product u * sigma * v^T is sign-invariant.
struct SingularTriple {
  double sigma = 0.0;
  DenseVector u;
  DenseVector v;
  int iterations = 0;

  DenseMatrix rank_one() const { return sigma * u * v.transpose(); }
};

inline double inner(const DenseMatrix& a, const DenseMatrix& b) { return a.cwiseProduct(b).sum(); }
inline double inner(const DenseVector& a, const DenseVector& b) { return a.dot(b); }

template <typename Derived>
double l1_norm(const Eigen::MatrixBase<Derived>& x) {
  return x.cwiseAbs().sum();
}

template <typename Derived>
double l2_norm(const Eigen::MatrixBase<Derived>& x) {
  return x.norm();  // Frobenius for matrices
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
  return x.allFinite();
}

/// Deterministic unit vector drawn from a seeded Gaussian.
inline DenseVector random_unit_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  DenseVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  const double nv = v.norm();
  if (nv == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / nv;
}

/// Alternating power iteration for the top singular triple of `m`:
///   u <- M v / |M v|,  v <- M^T u / |M^T u|.
/// Stops once |M v - sigma u| <= tol * sigma for the current pair.
inline SingularTriple power_iteration(const DenseMatrix& m, double tol, int max_iters,
                                      std::uint64_t seed) {
  if (m.rows() == 0 || m.cols() == 0) throw Error(ErrorKind::ZeroMatrix, "empty matrix");
  if (!(tol > 0.0)) throw Error(ErrorKind::NoConvergence, "tol must be positive");
  const double fro = m.norm();
  if (fro == 0.0) throw Error(ErrorKind::ZeroMatrix, "matrix has zero Frobenius norm");

  SingularTriple t;
  t.v = random_unit_vector(m.cols(), seed);
  t.u = m * t.v;
  double nu = t.u.norm();
  if (nu <= 1e-300) throw Error(ErrorKind::NoConvergence, "start vector in the null space");
  t.u /= nu;

  DenseVector mv(m.rows());
  for (int it = 1; it <= max_iters; ++it) {
    t.v.noalias() = m.transpose() * t.u;
    t.sigma = t.v.norm();
    if (t.sigma <= 1e-300) throw Error(ErrorKind::NoConvergence, "iterate collapsed to zero");
    t.v /= t.sigma;
    mv.noalias() = m * t.v;
    const double residual = (mv - t.sigma * t.u).norm();
    t.iterations = it;
    if (residual <= tol * t.sigma) {
      // sigma = u^T M v after the final refresh of u.
      nu = mv.norm();
      t.u = mv / nu;
      t.sigma = nu;
      return t;
    }
    nu = mv.norm();
    t.u = mv / nu;
  }
  throw Error(ErrorKind::NoConvergence,
              "power iteration did not converge in " + std::to_string(max_iters) + " steps");
}

/// Singular values by a dense SVD. Meant for small matrices only.
inline DenseVector singular_values(const DenseMatrix& m) {
  Eigen::JacobiSVD<DenseMatrix> svd(m);
  return svd.singularValues();
}

inline double nuclear_norm_exact(const DenseMatrix& m) { return singular_values(m).sum(); }

struct NormEstimate {
  double value = 0.0;
  bool approximate = false;
};

/// Nuclear norm; exact through a dense SVD up to `exact_limit` in both
/// dimensions, otherwise an upper estimate: the top-k singular values by
/// deflated power iteration plus sqrt(rank_tail) * |tail|_F.
inline NormEstimate nuclear_norm(const DenseMatrix& m, Eigen::Index exact_limit = 64, int top_k = 20,
                                 std::uint64_t seed = 0) {
  if (m.rows() <= exact_limit && m.cols() <= exact_limit) return {nuclear_norm_exact(m), false};
  const Eigen::Index rank_cap = std::min(m.rows(), m.cols());
  DenseMatrix residual = m;
  double head = 0.0;
  double head_sq = 0.0;
  const double total_sq = m.squaredNorm();
  int taken = 0;
  for (; taken < top_k && taken < rank_cap; ++taken) {
    if (residual.norm() <= 1e-12 * std::sqrt(total_sq)) break;
    const auto t = power_iteration(residual, 1e-8, 20000, seed + static_cast<std::uint64_t>(taken));
    head += t.sigma;
    head_sq += t.sigma * t.sigma;
    residual -= t.rank_one();
  }
  const double tail_sq = std::max(0.0, total_sq - head_sq);
  const double tail_rank = static_cast<double>(rank_cap - taken);
  return {head + std::sqrt(tail_rank * tail_sq), true};
}

}  // namespace jfw
