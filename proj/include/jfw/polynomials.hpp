#pragma once

// Jacobi orthogonal polynomials, normalized so that J_k(1) = 1, generated by
//
//   J_0(l) = 1,  J_1(l) = a_0 l + b_0,
//   J_{k+1}(l) = (a_k l + b_k) J_k(l) - c_k J_{k-1}(l),
//
// together with the weighted-norm machinery used to check their
// orthogonality and minimality on the unit interval.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "jfw/errors.hpp"

namespace jfw {

struct JacobiParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;  // fixed mixing scalar of the accelerated solver

  /// Throws DegenerateParams unless alpha >= beta > -1 and gamma in [0, 1].
  void validate() const {
    if (!(alpha > -1.0) || !(beta > -1.0)) {
      throw Error(ErrorKind::DegenerateParams, "alpha and beta must exceed -1");
    }
    if (alpha < beta) {
      throw Error(ErrorKind::DegenerateParams, "alpha must be >= beta");
    }
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
      throw Error(ErrorKind::DegenerateParams, "gamma must lie in [0, 1]");
    }
  }

  /// alpha == beta with gamma == 1 zeroes the fresh-update weight for every k.
  bool frozen() const noexcept { return alpha == beta && gamma == 1.0; }
};

struct RecurrenceCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double tau = 0.0;
  int k = 0;
};

/// Coefficients in powers of the polynomial variable: coeffs[i] multiplies l^i.
struct PolynomialCoeffs {
  std::vector<double> coeffs{1.0};

  int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }

  /// Horner evaluation.
  template <std::floating_point T>
  T operator()(T x) const noexcept {
    T acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + static_cast<T>(*it);
    return acc;
  }
};

namespace detail {

inline void require_nonzero(double value, const char* what) {
  if (std::abs(value) <= 1e-14) {
    throw Error(ErrorKind::DegenerateParams, std::string("vanishing denominator ") + what);
  }
}

}  // namespace detail

/// Three-term recurrence coefficients for step k. Only alpha and beta are
/// read; gamma plays no role in the polynomial family itself.
inline RecurrenceCoeffs recurrence_coeffs(const JacobiParams& params, int k) {
  if (k < 0) throw Error(ErrorKind::DegenerateParams, "k must be nonnegative");
  const double alpha = params.alpha;
  const double beta = params.beta;
  RecurrenceCoeffs rc;
  rc.k = k;
  rc.tau = k + alpha + beta + 1.0;
  if (k == 0) {
    detail::require_nonzero(1.0 + alpha, "1 + alpha");
    rc.a = (alpha + beta + 2.0) / (2.0 * (1.0 + alpha));
    rc.b = (alpha - beta) / (2.0 * (1.0 + alpha));
    rc.c = 0.0;
    return rc;
  }
  const double tau = rc.tau;
  const double kd = static_cast<double>(k);
  detail::require_nonzero(tau, "tau_k");
  detail::require_nonzero(tau - beta, "tau_k - beta");
  detail::require_nonzero(tau + kd - 1.0, "tau_k + k - 1");
  const double base = tau * (tau - beta);
  rc.a = (tau + kd) * (tau + kd + 1.0) / (2.0 * base);
  rc.b = (tau + kd) * (alpha * alpha - beta * beta) / (2.0 * base * (tau + kd - 1.0));
  rc.c = kd * (kd + beta) * (tau + kd + 1.0) / (base * (tau + kd - 1.0));
  return rc;
}

/// J_k(lambda) by forward recursion.
template <std::floating_point T>
T eval_jacobi(const JacobiParams& params, int k, T lambda) {
  if (k < 0) throw Error(ErrorKind::DegenerateParams, "k must be nonnegative");
  T prev = 1;
  if (k == 0) return prev;
  const auto rc0 = recurrence_coeffs(params, 0);
  T curr = static_cast<T>(rc0.a) * lambda + static_cast<T>(rc0.b);
  for (int j = 1; j < k; ++j) {
    const auto rc = recurrence_coeffs(params, j);
    const T next = (static_cast<T>(rc.a) * lambda + static_cast<T>(rc.b)) * curr -
                   static_cast<T>(rc.c) * prev;
    prev = curr;
    curr = next;
  }
  return curr;
}

struct OmegaValue {
  double value = 0.0;
  bool in_unit_interval = true;  // false is a diagnostic, not an error
};

/// Weight on the fresh update inside the accelerated recursion:
/// a_k (1 - gamma) + b_k.
inline OmegaValue omega(const JacobiParams& params, int k) {
  const auto rc = recurrence_coeffs(params, k);
  const double w = rc.a * (1.0 - params.gamma) + rc.b;
  return {w, w >= 0.0 && w <= 1.0};
}

/// Runs the recurrence on coefficient vectors, giving J_k in the monomial basis.
inline PolynomialCoeffs expand_coeffs(const JacobiParams& params, int k) {
  if (k < 0) throw Error(ErrorKind::DegenerateParams, "k must be nonnegative");
  std::vector<double> prev{1.0};
  if (k == 0) return {prev};
  const auto rc0 = recurrence_coeffs(params, 0);
  std::vector<double> curr{rc0.b, rc0.a};
  for (int j = 1; j < k; ++j) {
    const auto rc = recurrence_coeffs(params, j);
    std::vector<double> next(curr.size() + 1, 0.0);
    for (std::size_t i = 0; i < curr.size(); ++i) {
      next[i + 1] += rc.a * curr[i];
      next[i] += rc.b * curr[i];
    }
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= rc.c * prev[i];
    prev = std::move(curr);
    curr = std::move(next);
  }
  return {curr};
}

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n - 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::QuadratureUnderResolved, "need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// gauss_legendre(n), computed once per n.
inline const QuadratureRule& cached_gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
  return it->second;
}

/// Integral over u in [0, 1] of |poly(l)|^p (2 - 2u)^alpha (2u)^beta with
/// l = 2u - 1, which is the Jacobi weight (1 - l)^alpha (1 + l)^beta carried
/// to the unit interval. p must be 1 or 2.
inline double weighted_poly_norm(const PolynomialCoeffs& poly, double alpha, double beta, int p,
                                 int nodes) {
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw Error(ErrorKind::DegenerateParams, "alpha and beta must exceed -1");
  }
  if (p != 1 && p != 2) throw Error(ErrorKind::DegenerateParams, "p must be 1 or 2");
  if (nodes < poly.degree() + 1) {
    throw Error(ErrorKind::QuadratureUnderResolved,
                "nodes=" + std::to_string(nodes) + " below degree+1=" +
                    std::to_string(poly.degree() + 1));
  }
  const auto& rule = cached_gauss_legendre(nodes);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double u = 0.5 * (rule.nodes[i] + 1.0);
    const double l = 2.0 * u - 1.0;
    const double weight = std::pow(2.0 - 2.0 * u, alpha) * std::pow(2.0 * u, beta);
    const double v = std::abs(poly(l));
    total += 0.5 * rule.weights[i] * (p == 1 ? v : v * v) * weight;
  }
  return total;
}

/// Weighted L2 inner product by polarization:
/// <f, g> = (||f + g||^2 - ||f - g||^2) / 4.
inline double weighted_inner_product(const PolynomialCoeffs& f, const PolynomialCoeffs& g,
                                     double alpha, double beta, int nodes) {
  const std::size_t n = std::max(f.coeffs.size(), g.coeffs.size());
  PolynomialCoeffs sum{std::vector<double>(n, 0.0)};
  PolynomialCoeffs diff{std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const double fi = i < f.coeffs.size() ? f.coeffs[i] : 0.0;
    const double gi = i < g.coeffs.size() ? g.coeffs[i] : 0.0;
    sum.coeffs[i] = fi + gi;
    diff.coeffs[i] = fi - gi;
  }
  return 0.25 * (weighted_poly_norm(sum, alpha, beta, 2, nodes) -
                 weighted_poly_norm(diff, alpha, beta, 2, nodes));
}

}  // namespace jfw
