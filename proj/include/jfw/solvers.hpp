#pragma once

// Vanilla Frank-Wolfe and its Jacobi-accelerated variant.
//
// Both solvers share one loop. At iterate x_k the oracle returns s_k and
//   y_{k+1} = x_k + g_k (s_k - x_k),   g_k = 2 / (k + 2).
// FW takes x_{k+1} = y_{k+1}. The accelerated variant mixes in the previous
// iterate with the Jacobi recurrence coefficients:
//   z_{k+1} = (a_k (1 - gamma) + b_k) y_{k+1} - c_k x_k
//   x_{k+1} = z_{k+1} + gamma a_k x_k.
// The two weights on {y_{k+1}, x_k} sum to one, so the update is affine but
// not necessarily convex; feasibility is measured each step, never enforced.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "jfw/errors.hpp"
#include "jfw/linalg.hpp"
#include "jfw/objectives.hpp"
#include "jfw/oracles.hpp"
#include "jfw/polynomials.hpp"

namespace jfw {

enum class Method { FW, JFW };

constexpr std::string_view to_string(Method m) noexcept { return m == Method::FW ? "fw" : "jfw"; }

struct SolverConfig {
  Method method = Method::FW;
  int max_iters = 100;
  std::optional<JacobiParams> jacobi;
  double oracle_tol = 1e-8;
  std::uint64_t seed = 0;
  bool record_gap = true;
  double gap_floor = 1e-12;  // stop once the duality gap drops below this

  void validate() const {
    if (max_iters < 1) throw Error(ErrorKind::ConfigError, "max_iters must be >= 1");
    if ((method == Method::JFW) != jacobi.has_value()) {
      throw Error(ErrorKind::ConfigError, "Jacobi parameters are required for JFW and only for JFW");
    }
    if (jacobi) jacobi->validate();
  }
};

struct TraceRecord {
  int k = 0;
  double f_value = 0.0;
  double duality_gap = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> subopt;
  std::optional<double> normalized_error;
  double wall_ms = 0.0;
  double feasibility_slack = 0.0;  // set norm / radius - 1; <= 0 inside the set
  std::optional<double> descent_bound;
};

/// Optional extras for a run.
template <typename Point>
struct RunHooks {
  std::optional<double> reference;                 // f* estimate; fills TraceRecord::subopt
  std::function<double(const Point&)> monitor;     // fills TraceRecord::normalized_error
  std::optional<double> smoothness;                // L; with diameter, fills descent_bound
};

template <typename Point>
struct SolverResult {
  std::vector<TraceRecord> trace;
  Point x_final;
  bool stationary = false;
  bool frozen = false;
  std::vector<std::string> warnings;
};

/// Open-loop schedule 2 / (k + 2).
inline double step_size(int k) { return 2.0 / (static_cast<double>(k) + 2.0); }

template <typename Point>
double duality_gap(const Point& grad, const Point& x, const Point& s) {
  return inner(grad, Point(x - s));
}

inline double gap_bound_fw(double smoothness, double diam, int k) {
  return 2.0 * smoothness * diam * diam / (static_cast<double>(k) + 2.0);
}

inline double gap_bound_jfw(double smoothness, double diam, int k, double alpha, double beta) {
  if (beta == 0.0) throw Error(ErrorKind::BetaZero, "bound undefined for beta = 0");
  const double kd = static_cast<double>(k);
  return std::abs(alpha / beta) * 4.0 * smoothness * diam * diam / ((kd + 1.0) * (kd + 2.0));
}

inline double descent_bound(double smoothness, double diam, int k, const JacobiParams& params) {
  const double kd = static_cast<double>(k) + 2.0;
  return 6.0 * omega(params, k).value * smoothness * diam * diam / (kd * kd);
}

/// Weights the accelerated step puts on y_{k+1} and on x_k.
struct MixingWeights {
  double on_update = 1.0;
  double on_current = 0.0;
};

inline MixingWeights jfw_mixing_weights(const JacobiParams& params, int k) {
  const auto rc = recurrence_coeffs(params, k);
  return {rc.a * (1.0 - params.gamma) + rc.b, params.gamma * rc.a - rc.c};
}

namespace detail {

/// Tracks the set norm of the iterate. Vector sets and small matrices are
/// measured directly; large nuclear-norm iterates carry a triangle-inequality
/// bound through the affine updates instead of a full SVD per step.
template <typename Point>
class FeasibilityTracker {
 public:
  FeasibilityTracker(const ConstraintSet& set, const Point& x0) : set_(set) {
    structural_ = set.kind == SetKind::NuclearBall && (x0.rows() > 64 || x0.cols() > 64);
    bound_ = set_norm(set_, x0).value;
  }

  double slack(const Point& x) const {
    const double n = structural_ ? bound_ : set_norm(set_, x).value;
    return n / set_.radius - 1.0;
  }

  /// x_next = w_update * (x + step (s - x)) + w_current * x, with |s| <= radius.
  void advance(double step, double w_update, double w_current) {
    const double y_bound = std::abs(1.0 - step) * bound_ + std::abs(step) * set_.radius;
    bound_ = std::abs(w_update) * y_bound + std::abs(w_current) * bound_;
  }

 private:
  ConstraintSet set_;
  bool structural_ = false;
  double bound_ = 0.0;
};

template <Objective Obj>
SolverResult<typename Obj::Point> run_solver(const Obj& obj, const ConstraintSet& set,
                                             const typename Obj::Point& x0, const SolverConfig& config,
                                             const RunHooks<typename Obj::Point>& hooks) {
  using Point = typename Obj::Point;
  using Clock = std::chrono::steady_clock;
  config.validate();
  set.validate();
  if (!contains(set, x0, 1e-9)) {
    throw Error(ErrorKind::InfeasibleStart, "x0 lies outside the constraint set");
  }

  SolverResult<Point> result;
  const bool accelerated = config.method == Method::JFW;
  JacobiParams params;
  if (accelerated) {
    params = *config.jacobi;
    if (params.frozen()) {
      result.frozen = true;
      result.warnings.emplace_back(
          "DegenerateConfig: alpha == beta with gamma == 1 freezes the iterates; stopping");
    }
  }

  const auto start = Clock::now();
  const double diam = diameter(set);
  FeasibilityTracker<Point> tracker(set, x0);
  bool warned_omega = false;
  Point x = x0;

  for (int k = 0;; ++k) {
    const Point grad = obj.gradient(x);
    const auto oracle = lmo(set, grad, config.oracle_tol, config.seed + static_cast<std::uint64_t>(k));
    const double gap = duality_gap(grad, x, oracle.s);

    TraceRecord rec;
    rec.k = k;
    rec.f_value = obj.value(x);
    if (config.record_gap) rec.duality_gap = gap;
    if (hooks.reference) rec.subopt = rec.f_value - *hooks.reference;
    if (hooks.monitor) rec.normalized_error = hooks.monitor(x);
    rec.feasibility_slack = tracker.slack(x);
    if (accelerated && hooks.smoothness) rec.descent_bound = descent_bound(*hooks.smoothness, diam, k, params);
    rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    result.trace.push_back(rec);

    if (oracle.stationary) {
      result.stationary = true;
      break;
    }
    if (result.frozen || k >= config.max_iters || gap < config.gap_floor) break;

    const double step = step_size(k);
    if (!accelerated) {
      x += step * (oracle.s - x);
      tracker.advance(step, 1.0, 0.0);
      continue;
    }
    const auto w = jfw_mixing_weights(params, k);
    if (!warned_omega && !(w.on_update >= 0.0 && w.on_update <= 1.0)) {
      warned_omega = true;
      result.warnings.emplace_back("omega_k = " + std::to_string(w.on_update) + " at k = " +
                                   std::to_string(k) + " lies outside [0, 1]");
    }
    Point y = x + step * (oracle.s - x);
    x = w.on_update * y + w.on_current * x;
    tracker.advance(step, w.on_update, w.on_current);
  }
  result.x_final = std::move(x);
  return result;
}

}  // namespace detail

/// Frank-Wolfe with step 2 / (k + 2). Records iterates 0..max_iters.
template <Objective Obj>
SolverResult<typename Obj::Point> run_fw(const Obj& obj, const ConstraintSet& set,
                                         const typename Obj::Point& x0, SolverConfig config,
                                         const RunHooks<typename Obj::Point>& hooks = {}) {
  config.method = Method::FW;
  config.jacobi.reset();
  return detail::run_solver(obj, set, x0, config, hooks);
}

/// Jacobi-accelerated Frank-Wolfe; config.jacobi must be set.
template <Objective Obj>
SolverResult<typename Obj::Point> run_jfw(const Obj& obj, const ConstraintSet& set,
                                          const typename Obj::Point& x0, SolverConfig config,
                                          const RunHooks<typename Obj::Point>& hooks = {}) {
  config.method = Method::JFW;
  return detail::run_solver(obj, set, x0, config, hooks);
}

template <Objective Obj>
SolverResult<typename Obj::Point> run(const Obj& obj, const ConstraintSet& set,
                                      const typename Obj::Point& x0, const SolverConfig& config,
                                      const RunHooks<typename Obj::Point>& hooks = {}) {
  return detail::run_solver(obj, set, x0, config, hooks);
}

}  // namespace jfw
