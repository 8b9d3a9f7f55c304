#include <gtest/gtest.h>

#include <psml/gaussian.hpp>
#include <psml/rng.hpp>

#include <cmath>
#include <numbers>

using namespace psml;

namespace {

Matrix random_psd(RandomStream& rng, int k, int rank) {
  Matrix a(k, rank);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < rank; ++j) a(i, j) = rng.normal();
  }
  return a * a.transpose();
}

}  // namespace

TEST(GaussianFactor, UnivariateDensityMatchesFormula) {
  Matrix v(1, 1);
  v(0, 0) = 2.5;
  GaussianFactor f(v);
  Vector x(1), m(1);
  x[0] = 1.3;
  m[0] = -0.4;
  const double expected =
      -0.5 * std::log(2 * std::numbers::pi * 2.5) - 0.5 * (1.7 * 1.7) / 2.5;
  EXPECT_NEAR(f.log_density(x, m), expected, 1e-14);
  EXPECT_FALSE(f.jittered());
}

TEST(GaussianFactor, BivariateDensityMatchesClosedForm) {
  const double s1 = 1.5, s2 = 0.7, r = -0.6;
  Matrix c(2, 2);
  c << s1 * s1, r * s1 * s2, r * s1 * s2, s2 * s2;
  Vector x(2), m(2);
  x << 0.3, -1.1;
  m << 0.1, 0.2;
  const double z1 = (x[0] - m[0]) / s1;
  const double z2 = (x[1] - m[1]) / s2;
  const double q = (z1 * z1 - 2 * r * z1 * z2 + z2 * z2) / (1 - r * r);
  const double expected =
      -std::log(2 * std::numbers::pi * s1 * s2 * std::sqrt(1 - r * r)) - 0.5 * q;
  EXPECT_NEAR(mvn_logpdf(x, {m, c}), expected, 1e-13);
}

TEST(GaussianFactor, SingularMatrixIsJitteredOnce) {
  Matrix c(2, 2);
  c << 1.0, 1.0, 1.0, 1.0;
  GaussianFactor f(c);
  EXPECT_TRUE(f.jittered());
}

TEST(GaussianFactor, RejectsZeroAndNonFinite) {
  EXPECT_THROW(GaussianFactor(Matrix::Zero(2, 2)), NumericalError);
  Matrix c = Matrix::Identity(2, 2);
  c(1, 1) = std::nan("");
  EXPECT_THROW(GaussianFactor{c}, NumericalError);
  Matrix neg = -Matrix::Identity(2, 2);
  EXPECT_THROW(GaussianFactor{neg}, NumericalError);
}

TEST(GaussianFactor, SampleUsesLowerFactor) {
  Matrix c(2, 2);
  c << 4.0, 2.0, 2.0, 5.0;
  GaussianFactor f(c);
  Vector z(2), m(2);
  z << 1.0, -1.0;
  m << 0.5, 0.5;
  const Vector x = f.sample(m, z);
  // L = [[2, 0], [1, 2]]
  EXPECT_NEAR(x[0], 2.5, 1e-14);
  EXPECT_NEAR(x[1], 0.5 + 1.0 - 2.0, 1e-14);
}

TEST(Conditional, BivariateMatchesRegressionFormula) {
  Matrix c(2, 2);
  c << 2.0, 0.8, 0.8, 1.0;
  Vector m(2);
  m << 1.0, -1.0;
  Vector given(1);
  given[0] = 0.5;
  const GaussianSpec cond = conditional({m, c}, {1}, given);
  ASSERT_EQ(cond.dimension(), 1);
  EXPECT_NEAR(cond.mean[0], 1.0 + 0.8 * (0.5 + 1.0), 1e-14);
  EXPECT_NEAR(cond.covariance(0, 0), 2.0 - 0.64, 1e-14);
}

TEST(Conditional, ChainRuleHolds) {
  RandomStream rng(3, StreamTag::kSimulate, {0});
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix c = random_psd(rng, 4, 6) + 0.1 * Matrix::Identity(4, 4);
    Vector m(4), x(4);
    for (int i = 0; i < 4; ++i) {
      m[i] = rng.normal();
      x[i] = rng.normal();
    }
    const IndexList given = {3, 1};
    const GaussianSpec spec{m, c};
    const GaussianSpec marg = marginal(spec, given);
    const GaussianSpec cond = conditional(spec, given, select(x, given));
    const double lhs = mvn_logpdf(x, spec);
    const double rhs = mvn_logpdf(select(x, given), marg) +
                       mvn_logpdf(select(x, {0, 2}), cond);
    EXPECT_NEAR(lhs, rhs, 1e-9);
  }
}

TEST(MatrixSqrt, SquaresBack) {
  RandomStream rng(11, StreamTag::kSimulate, {0});
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix s = random_psd(rng, 3, 2);  // rank deficient on purpose
    const Matrix b = matrix_sqrt(s);
    EXPECT_LT((b * b - s).norm(), 1e-10 * (1.0 + s.norm()));
    EXPECT_LT(asymmetry(b), 1e-12);
  }
}

TEST(MatrixSqrt, RejectsAsymmetricInput) {
  Matrix a(2, 2);
  a << 1.0, 0.5, 0.0, 1.0;
  EXPECT_THROW(matrix_sqrt(a), DomainError);
}

TEST(MatrixSqrt, DiagonalIsElementwise) {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 4.0, 9.0, 0.0;
  const Matrix b = matrix_sqrt(d);
  EXPECT_NEAR(b(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(b(1, 1), 3.0, 1e-14);
  EXPECT_NEAR(b(2, 2), 0.0, 1e-14);
}
