#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "jfw/data.hpp"
#include "jfw/solvers.hpp"
#include "reference.hpp"

namespace jfw {
namespace {

const JacobiParams kDefault{1.2, 1.2, 2.0 / 3.0};

SolverConfig fw_config(int iters) {
  SolverConfig c;
  c.max_iters = iters;
  return c;
}

SolverConfig jfw_config(int iters, JacobiParams p = kDefault) {
  SolverConfig c;
  c.method = Method::JFW;
  c.max_iters = iters;
  c.jacobi = p;
  return c;
}

TEST(StepSize, Schedule) {
  EXPECT_DOUBLE_EQ(step_size(0), 1.0);
  EXPECT_DOUBLE_EQ(step_size(1), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(step_size(98), 0.02);
}

TEST(DualityGap, Example) {
  DenseVector g(2), x(2), s(2);
  g << 1.0, 2.0;
  x << 1.0, 1.0;
  s << 0.0, -0.5;
  EXPECT_DOUBLE_EQ(duality_gap(g, x, s), 4.0);
}

TEST(Fw, TwoStepTraceOnQuadratic) {
  // f(x) = 0.5 |x - 2|^2 on the unit L2 ball in one dimension.
  QuadraticObjective obj(DenseMatrix::Identity(1, 1), DenseVector::Constant(1, -2.0), 2.0);
  const auto res = run_fw(obj, {SetKind::L2Ball, 1.0}, DenseVector::Constant(1, -1.0), fw_config(2));
  // x0 = -1, s = 1, step 1 -> x1 = 1 where the gap closes.
  ASSERT_EQ(res.trace.size(), 2u);
  EXPECT_DOUBLE_EQ(res.trace[1].duality_gap, 0.0);
  EXPECT_DOUBLE_EQ(res.trace[0].f_value, 4.5);
  EXPECT_DOUBLE_EQ(res.trace[0].duality_gap, 6.0);
  EXPECT_DOUBLE_EQ(res.trace[1].f_value, 0.5);
  EXPECT_DOUBLE_EQ(res.x_final[0], 1.0);
}

TEST(Fw, TraceValuesFromHandComputation) {
  // f(x) = <c, x> + 0.5 |x|^2 with c = (1, 0) on the unit L1 ball from x0 = 0.
  QuadraticObjective obj(DenseMatrix::Identity(2, 2), (DenseVector(2) << 1.0, 0.0).finished(), 0.0);
  const auto res = run_fw(obj, {SetKind::L1Ball, 1.0}, DenseVector::Zero(2), fw_config(2));
  // x1 = s0 = (-1, 0) with f = -0.5, where the gradient c + x1 vanishes.
  ASSERT_EQ(res.trace.size(), 2u);
  EXPECT_DOUBLE_EQ(res.trace[0].duality_gap, 1.0);
  EXPECT_DOUBLE_EQ(res.trace[1].f_value, -0.5);
  EXPECT_TRUE(res.stationary);
}

TEST(Fw, LinearObjectiveReachesVertexInOneStep) {
  const DenseVector c = (DenseVector(3) << 0.0, -2.0, 1.0).finished();
  LinearObjective obj(c);
  const ConstraintSet set{SetKind::L2Ball, 2.0};
  const auto res = run_fw(obj, set, DenseVector::Zero(3), fw_config(10));
  EXPECT_NEAR(res.trace[1].f_value, -2.0 * c.norm(), 1e-12);
  for (std::size_t k = 1; k < res.trace.size(); ++k) {
    EXPECT_NEAR(res.trace[k].f_value, -2.0 * c.norm(), 1e-12);
  }
  EXPECT_LT(res.trace.back().duality_gap, 1e-12);
}

TEST(Fw, ConvergenceBoundOnRandomQuadratics) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto prob = synth_quadratic(8, 10.0, 1.0, seed % 2 == 0, seed);
    RunHooks<DenseVector> hooks;
    hooks.reference = prob.f_star;
    const auto res = run_fw(prob.objective, prob.set, prob.objective.zero_point(), fw_config(300), hooks);
    for (const auto& r : res.trace) {
      if (r.k == 0) continue;
      const double bound = 2.0 * prob.smoothness * prob.diam * prob.diam / (r.k + 2.0);
      EXPECT_LE(*r.subopt, bound + 1e-12) << r.k;
      EXPECT_GE(r.duality_gap, *r.subopt - 1e-10) << r.k;
      EXPECT_LE(r.feasibility_slack, 1e-12);
    }
  }
}

TEST(Jfw, StepZeroHasNoMemoryTerm) {
  for (const JacobiParams p : {kDefault, JacobiParams{3.0, 0.5, 0.4}}) {
    EXPECT_DOUBLE_EQ(recurrence_coeffs(p, 0).c, 0.0);
    for (int k = 0; k < 200; ++k) {
      const auto w = jfw_mixing_weights(p, k);
      EXPECT_NEAR(w.on_update + w.on_current, 1.0, 1e-12) << k;
    }
  }
}

TEST(Jfw, MatchesHandRolledRecurrence) {
  std::mt19937_64 rng(41);
  const DenseMatrix b = testing::gaussian_matrix(4, 4, rng);
  QuadraticObjective obj(b.transpose() * b, testing::gaussian_vector(4, rng), 0.0);
  const ConstraintSet set{SetKind::L1Ball, 1.5};
  const JacobiParams p{2.0, 0.5, 0.3};
  const auto res = run_jfw(obj, set, DenseVector::Zero(4), jfw_config(25, p));

  DenseVector x = DenseVector::Zero(4);
  for (int k = 0; k < 25; ++k) {
    ASSERT_NEAR(obj.value(x), res.trace[k].f_value, 1e-12) << k;
    const DenseVector s = lmo(set, obj.gradient(x), 1e-8, 0).s;
    const DenseVector y = x + step_size(k) * (s - x);
    const auto rc = recurrence_coeffs(p, k);
    const DenseVector z = (rc.a * (1.0 - p.gamma) + rc.b) * y - rc.c * x;
    x = z + p.gamma * rc.a * x;
  }
  EXPECT_LT((x - res.x_final).norm(), 1e-12);
}

TEST(Jfw, FrozenConfigurationStops) {
  LinearObjective obj(DenseVector::Ones(2));
  const auto res = run_jfw(obj, {SetKind::L2Ball, 1.0}, DenseVector::Zero(2), jfw_config(50, {1.2, 1.2, 1.0}));
  EXPECT_TRUE(res.frozen);
  EXPECT_EQ(res.trace.size(), 1u);
  ASSERT_FALSE(res.warnings.empty());
}

TEST(Jfw, WarnsWhenOmegaLeavesUnitInterval) {
  QuadraticObjective obj(DenseMatrix::Identity(2, 2), DenseVector::Constant(2, -0.1), 0.0);
  const auto res = run_jfw(obj, {SetKind::L2Ball, 1.0}, DenseVector::Zero(2), jfw_config(5, {1.2, 1.2, 0.0}));
  ASSERT_EQ(res.warnings.size(), 1u);
  EXPECT_NE(res.warnings[0].find("omega"), std::string::npos);
}

TEST(GapBounds, Values) {
  EXPECT_DOUBLE_EQ(gap_bound_fw(1.0, 2.0, 0), 4.0);
  EXPECT_DOUBLE_EQ(gap_bound_jfw(1.0, 2.0, 0, 1.0, 1.0), 8.0);
  for (int k = 0; k < 50; ++k) {
    EXPECT_NEAR(gap_bound_jfw(3.0, 1.5, k, 1.0, 1.0) / gap_bound_fw(3.0, 1.5, k), 2.0 / (k + 1.0), 1e-14);
  }
  try {
    gap_bound_jfw(1.0, 1.0, 3, 1.0, 0.0);
    FAIL() << "expected BetaZero";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BetaZero);
  }
}

TEST(DescentBound, Example) {
  // omega(Legendre, gamma = 2/3, k = 1) = 0.5; 6 * 0.5 * 1 * 1 / 9.
  EXPECT_NEAR(descent_bound(1.0, 1.0, 1, {0.0, 0.0, 2.0 / 3.0}), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(descent_bound(1.0, 1.0, 0, {1.2, 1.2, 2.0 / 3.0}), 6.0 * (1.0 / 3.0) / 4.0, 1e-15);
}

TEST(Solver, DeterministicReruns) {
  std::mt19937_64 rng(43);
  const DenseMatrix target = testing::gaussian_matrix(6, 5, rng);
  std::vector<Observation> obs;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 5; ++j) {
      if ((i + j) % 2 == 0) obs.push_back({i, j, target(i, j)});
    }
  }
  MatrixCompletionObjective obj(obs, 6, 5, 1.0);
  const ConstraintSet set{SetKind::NuclearBall, 3.0};
  const auto a = run_jfw(obj, set, obj.zero_point(), jfw_config(40));
  const auto b = run_jfw(obj, set, obj.zero_point(), jfw_config(40));
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    EXPECT_EQ(a.trace[k].f_value, b.trace[k].f_value);
    EXPECT_EQ(a.trace[k].duality_gap, b.trace[k].duality_gap);
  }
  EXPECT_TRUE(a.x_final == b.x_final);
}

TEST(Solver, RejectsInfeasibleStart) {
  LinearObjective obj(DenseVector::Ones(2));
  try {
    run_fw(obj, {SetKind::L2Ball, 1.0}, DenseVector::Constant(2, 1.0), fw_config(3));
    FAIL() << "expected InfeasibleStart";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InfeasibleStart);
  }
}

TEST(Solver, ConfigValidation) {
  SolverConfig c = fw_config(0);
  EXPECT_THROW(c.validate(), Error);
  c = jfw_config(5);
  c.jacobi.reset();
  EXPECT_THROW(c.validate(), Error);
}

TEST(Solver, StopsOnStationaryGradient) {
  QuadraticObjective obj(DenseMatrix::Identity(2, 2), DenseVector::Zero(2), 0.0);
  const auto res = run_fw(obj, {SetKind::L2Ball, 1.0}, DenseVector::Zero(2), fw_config(10));
  EXPECT_TRUE(res.stationary);
  EXPECT_EQ(res.trace.size(), 1u);
}

}  // namespace
}  // namespace jfw
