#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "jfw/objectives.hpp"
#include "reference.hpp"

namespace jfw {
namespace {

TEST(Huber, Values) {
  EXPECT_NEAR(huber(0.3, 0.5), 0.09, 1e-15);
  EXPECT_DOUBLE_EQ(huber(1.0, 0.5), 0.75);
  EXPECT_DOUBLE_EQ(huber(-1.0, 0.5), 0.75);
  EXPECT_DOUBLE_EQ(huber(0.0, 2.0), 0.0);
}

TEST(Huber, ContinuousWithContinuousDerivativeAtDelta) {
  for (double delta : {0.1, 1.0, 4.0}) {
    for (double sign : {-1.0, 1.0}) {
      const double c = sign * delta;
      EXPECT_NEAR(huber(c * (1 - 1e-12), delta), huber(c * (1 + 1e-12), delta), 1e-9);
      EXPECT_NEAR(huber_grad(c * (1 - 1e-12), delta), huber_grad(c * (1 + 1e-12), delta), 1e-9);
    }
  }
}

TEST(Huber, GradientMatchesFiniteDifference) {
  for (double c : {-3.0, -0.7, 0.2, 0.99, 2.5}) {
    const double fd = (huber(c + 1e-6, 1.0) - huber(c - 1e-6, 1.0)) / 2e-6;
    EXPECT_NEAR(huber_grad(c, 1.0), fd, 1e-6) << c;
  }
}

TEST(Logistic, ValueAtZeroIsLogTwo) {
  std::mt19937_64 rng(3);
  const DenseMatrix a = testing::gaussian_matrix(12, 5, rng);
  DenseVector b(12);
  for (int i = 0; i < 12; ++i) b[i] = i % 3 ? 1.0 : -1.0;
  LogisticObjective obj(a, b);
  EXPECT_NEAR(obj.value(obj.zero_point()), std::log(2.0), 1e-15);
}

TEST(Logistic, GradientMatchesFiniteDifference) {
  std::mt19937_64 rng(4);
  const DenseMatrix a = testing::gaussian_matrix(30, 6, rng);
  DenseVector b(30);
  for (int i = 0; i < 30; ++i) b[i] = i % 2 ? 1.0 : -1.0;
  LogisticObjective obj(a, b);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseVector x = 3.0 * testing::gaussian_vector(6, rng);
    const DenseVector fd = testing::finite_difference_gradient([&](const DenseVector& p) { return obj.value(p); }, x, 1e-6);
    EXPECT_LT((obj.gradient(x) - fd).norm(), 1e-7 * std::max(1.0, fd.norm()));
  }
}

TEST(Logistic, StableForLargeMargins) {
  DenseMatrix a(2, 1);
  a << 1.0, -1.0;
  LogisticObjective obj(a, (DenseVector(2) << 1.0, 1.0).finished());
  const DenseVector x = DenseVector::Constant(1, 1000.0);
  EXPECT_TRUE(std::isfinite(obj.value(x)));
  EXPECT_NEAR(obj.value(x), 500.0, 1e-9);
  EXPECT_TRUE(all_finite(obj.gradient(x)));
}

TEST(Logistic, RejectsBadLabels) {
  EXPECT_THROW(LogisticObjective(DenseMatrix::Ones(2, 2), (DenseVector(2) << 1.0, 0.0).finished()), Error);
  EXPECT_THROW(LogisticObjective(DenseMatrix::Ones(2, 2), DenseVector::Ones(3)), Error);
}

TEST(HuberRidge, GradientMatchesFiniteDifference) {
  std::mt19937_64 rng(6);
  const DenseMatrix a = testing::gaussian_matrix(25, 4, rng);
  const DenseVector y = 2.0 * testing::gaussian_vector(25, rng);
  HuberRidgeObjective obj(a, y, 0.8);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseVector x = testing::gaussian_vector(4, rng);
    const DenseVector fd = testing::finite_difference_gradient([&](const DenseVector& p) { return obj.value(p); }, x, 1e-6);
    EXPECT_LT((obj.gradient(x) - fd).norm(), 1e-6 * std::max(1.0, fd.norm()));
  }
}

TEST(HuberRidge, ConvexAlongRandomSegments) {
  std::mt19937_64 rng(8);
  HuberRidgeObjective obj(testing::gaussian_matrix(20, 3, rng), testing::gaussian_vector(20, rng), 0.5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const DenseVector x = testing::gaussian_vector(3, rng);
    const DenseVector y = testing::gaussian_vector(3, rng);
    const double t = unif(rng);
    EXPECT_LE(obj.value(t * x + (1 - t) * y), t * obj.value(x) + (1 - t) * obj.value(y) + 1e-12);
  }
}

TEST(MatrixCompletion, ValueAndGradient) {
  MatrixCompletionObjective obj({{0, 0, 2.0}, {1, 2, 5.0}, {2, 1, -1.0}}, 3, 3, 1.0);
  DenseMatrix x = DenseMatrix::Zero(3, 3);
  x(0, 0) = 1.5;
  x(1, 1) = 9.0;  // unobserved
  EXPECT_NEAR(obj.value(x), huber(0.5, 1.0) + huber(5.0, 1.0) + huber(-1.0, 1.0), 1e-15);
  const DenseMatrix g = obj.gradient(x);
  const DenseMatrix fd = testing::finite_difference_gradient([&](const DenseMatrix& p) { return obj.value(p); }, x, 1e-6);
  EXPECT_LT((g - fd).norm(), 1e-6);
  EXPECT_EQ(g(1, 1), 0.0);
  EXPECT_EQ(g(2, 2), 0.0);
}

TEST(MatrixCompletion, RejectsDuplicatesAndOutOfRange) {
  try {
    MatrixCompletionObjective({{0, 0, 1.0}, {0, 0, 2.0}}, 2, 2, 1.0);
    FAIL() << "expected DuplicateRating";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DuplicateRating);
  }
  EXPECT_THROW(MatrixCompletionObjective({{2, 0, 1.0}}, 2, 2, 1.0), Error);
}

TEST(NormalizedTestError, Examples) {
  MatrixCompletionObjective test({{0, 0, 4.0}, {1, 1, 2.0}}, 2, 2, 4.0);
  const DenseMatrix zero = DenseMatrix::Zero(2, 2);
  EXPECT_DOUBLE_EQ(normalized_test_error(test, zero), 1.0);
  DenseMatrix exact = zero;
  exact(0, 0) = 4.0;
  exact(1, 1) = 2.0;
  EXPECT_DOUBLE_EQ(normalized_test_error(test, exact), 0.0);
  DenseMatrix near = exact;
  near(0, 0) = 3.0;
  EXPECT_DOUBLE_EQ(normalized_test_error(test, near), 1.0 / 20.0);
  DenseMatrix half = exact;
  half(1, 1) = 1.5;
  half(0, 0) = 3.5;
  EXPECT_DOUBLE_EQ(normalized_test_error(test, half), 0.5 / 20.0);
}

TEST(NormalizedTestError, SingleEntry) {
  MatrixCompletionObjective test({{0, 0, 4.0}}, 1, 1, 4.0);
  EXPECT_DOUBLE_EQ(normalized_test_error(test, DenseMatrix::Constant(1, 1, 3.5)), 0.015625);
}

TEST(NormalizedTestError, DegenerateTestSet) {
  MatrixCompletionObjective test({{0, 0, 0.0}}, 1, 1, 1.0);
  try {
    normalized_test_error(test, DenseMatrix::Zero(1, 1));
    FAIL() << "expected DegenerateTestSet";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateTestSet);
  }
}

TEST(Quadratic, SmoothnessCertificate) {
  // f(y) <= f(x) + <g, y - x> + L/2 |y - x|^2 with L = lambda_max(Q).
  std::mt19937_64 rng(12);
  const DenseMatrix b = testing::gaussian_matrix(5, 5, rng);
  const DenseMatrix q = b.transpose() * b;
  QuadraticObjective obj(q, testing::gaussian_vector(5, rng), 0.3);
  const double l = Eigen::SelfAdjointEigenSolver<DenseMatrix>(q).eigenvalues().maxCoeff();
  for (int trial = 0; trial < 100; ++trial) {
    const DenseVector x = testing::gaussian_vector(5, rng);
    const DenseVector y = testing::gaussian_vector(5, rng);
    const double upper = obj.value(x) + obj.gradient(x).dot(y - x) + 0.5 * l * (y - x).squaredNorm();
    EXPECT_LE(obj.value(y), upper + 1e-10);
    EXPECT_GE(obj.value(y), obj.value(x) + obj.gradient(x).dot(y - x) - 1e-10);
  }
  DenseMatrix asym = DenseMatrix::Identity(2, 2);
  asym(0, 1) = 1.0;
  EXPECT_THROW(QuadraticObjective(asym, DenseVector::Zero(2), 0.0), Error);
}

TEST(Linear, ValueAndGradient) {
  LinearObjective obj((DenseVector(2) << 1.0, -2.0).finished());
  EXPECT_DOUBLE_EQ(obj.value((DenseVector(2) << 3.0, 1.0).finished()), 1.0);
  EXPECT_EQ(obj.gradient(obj.zero_point()), (DenseVector(2) << 1.0, -2.0).finished());
}

}  // namespace
}  // namespace jfw
