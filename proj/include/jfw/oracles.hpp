#pragma once

// Linear minimization oracles over norm balls centered at the origin.

#include <cstdint>
#include <string_view>
#include <type_traits>

#include "jfw/errors.hpp"
#include "jfw/linalg.hpp"

namespace jfw {

enum class SetKind { L2Ball, L1Ball, NuclearBall };

constexpr std::string_view to_string(SetKind kind) noexcept {
  switch (kind) {
    case SetKind::L2Ball: return "l2_ball";
    case SetKind::L1Ball: return "l1_ball";
    case SetKind::NuclearBall: return "nuclear_ball";
  }
  return "unknown";
}

struct ConstraintSet {
  SetKind kind = SetKind::L2Ball;
  double radius = 1.0;

  void validate() const {
    if (!(radius > 0.0)) throw Error(ErrorKind::ConfigError, "constraint radius must be positive");
  }
};

template <typename Point>
struct LmoResult {
  Point s;
  bool stationary = false;  // gradient vanished; every feasible point is optimal
};

inline constexpr double kStationaryThreshold = 1e-14;

/// Power-iteration budget used by the nuclear-ball oracle.
inline constexpr int kOracleMaxIters = 20000;

/// Norm of `x` in the geometry of `set`. Entrywise norms apply to matrices
/// under the L1/L2 kinds; the nuclear norm is exact up to 64x64.
template <typename Point>
NormEstimate set_norm(const ConstraintSet& set, const Point& x) {
  switch (set.kind) {
    case SetKind::L2Ball: return {l2_norm(x), false};
    case SetKind::L1Ball: return {l1_norm(x), false};
    case SetKind::NuclearBall:
      if constexpr (std::is_same_v<Point, DenseMatrix>) {
        return nuclear_norm(x);
      } else {
        throw Error(ErrorKind::ShapeMismatch, "nuclear ball needs a matrix point");
      }
  }
  return {};
}

/// argmin over the set of <g, s>.
template <typename Point>
LmoResult<Point> lmo(const ConstraintSet& set, const Point& g, double tol, std::uint64_t seed) {
  LmoResult<Point> out;
  const double t = set.radius;
  if (set.kind == SetKind::NuclearBall && !std::is_same_v<Point, DenseMatrix>) {
    throw Error(ErrorKind::ShapeMismatch, "nuclear ball needs a matrix gradient");
  }
  if (l2_norm(g) <= kStationaryThreshold) {
    out.s = Point::Zero(g.rows(), g.cols());
    out.stationary = true;
    return out;
  }
  switch (set.kind) {
    case SetKind::L2Ball:
      out.s = (-t / l2_norm(g)) * g;
      break;
    case SetKind::L1Ball: {
      Eigen::Index best = 0;
      double best_abs = -1.0;
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double a = std::abs(g.data()[i]);
        if (a > best_abs) {
          best_abs = a;
          best = i;
        }
      }
      out.s = Point::Zero(g.rows(), g.cols());
      out.s.data()[best] = g.data()[best] > 0.0 ? -t : t;
      break;
    }
    case SetKind::NuclearBall:
      if constexpr (std::is_same_v<Point, DenseMatrix>) {
        const auto triple = power_iteration(g, tol, kOracleMaxIters, seed);
        out.s = (-t) * triple.u * triple.v.transpose();
      }
      break;
  }
  return out;
}

inline bool contains(const ConstraintSet& set, const auto& x, double slack) {
  return set_norm(set, x).value <= set.radius * (1.0 + slack);
}

/// Euclidean (Frobenius) diameter; every supported ball attains 2 * radius
/// at a pair of antipodal extreme points.
inline double diameter(const ConstraintSet& set) { return 2.0 * set.radius; }

}  // namespace jfw
