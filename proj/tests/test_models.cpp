#include <gtest/gtest.h>

#include <psml/models.hpp>
#include <psml/sde.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>

using namespace psml;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Dataset ou_dataset(std::uint64_t seed, int n) {
  OuModel model;
  std::vector<double> times;
  for (int i = 1; i <= n; ++i) times.push_back(i);
  RandomStream rng(seed, StreamTag::kSimulate, {0});
  return simulate_dataset(model, model.params({0.0187, 0.2610, 0.0224}), vec({1.0}),
                          TimeGrid(0.0, times, 16), rng);
}

}  // namespace

TEST(Ou, DriftAndDiffusion) {
  OuModel m;
  const ParamVector th = m.params({0.5, 2.0, 0.3});
  EXPECT_DOUBLE_EQ(m.drift(vec({1.5}), th, 0.0)[0], 0.5 - 3.0);
  EXPECT_DOUBLE_EQ(m.diffusion(vec({1.5}), th, 0.0)(0, 0), 0.3);
  EXPECT_EQ(m.observed(), (IndexList{0}));
  EXPECT_TRUE(m.unobserved().empty());
}

TEST(Ou, ExactTransitionMatchesGaussianFormula) {
  OuModel m;
  const ParamVector th = m.params({0.0187, 0.2610, 0.0224});
  const double level = 0.0187 / 0.2610;
  const double mean = level + (1.0 - level) * std::exp(-0.2610);
  const double var = 0.0224 * 0.0224 * (1 - std::exp(-2 * 0.2610)) / (2 * 0.2610);
  for (double y : {mean, mean + 0.01, mean - 0.03}) {
    const double expected =
        -0.5 * std::log(2 * std::numbers::pi * var) - 0.5 * (y - mean) * (y - mean) / var;
    EXPECT_NEAR(ou_exact_transition_logpdf(y, 1.0, th, 1.0), expected, 1e-12);
  }
  EXPECT_THROW(ou_exact_transition_logpdf(0.0, 1.0, m.params({0.0, -1.0, 1.0}), 1.0),
               DomainError);
}

TEST(Ou, ExactMleMatchesAutoregressionClosedForm) {
  // Equally spaced OU data are a Gaussian AR(1); its conditional MLE is OLS.
  const Dataset d = ou_dataset(5, 100);
  std::vector<double> x = {d.x0[0]};
  for (const auto& r : d.records) x.push_back(r.values[0]);
  const std::size_t n = x.size() - 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += x[i + 1];
    sxx += x[i] * x[i];
    sxy += x[i] * x[i + 1];
  }
  const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double c = (sy - b * sx) / n;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = x[i + 1] - c - b * x[i];
    rss += e * e;
  }
  const double s2 = rss / n;
  const double t2 = -std::log(b);
  const double t1 = t2 * c / (1 - b);
  const double t3 = std::sqrt(2 * t2 * s2 / (1 - b * b));

  OuModel m;
  const OuMleResult mle = ou_exact_mle(d, m.params({0.03, 0.4, 0.03}), {});
  EXPECT_NEAR(mle.theta[0], t1, 1e-4 * std::abs(t1) + 1e-7);
  EXPECT_NEAR(mle.theta[1], t2, 1e-4 * t2);
  EXPECT_NEAR(mle.theta[2], t3, 1e-4 * t3);
  EXPECT_NEAR(mle.log_likelihood, ou_exact_log_likelihood(d, mle.theta), 1e-9);
}

TEST(Lorenz, DriftAtKnownPoint) {
  Lorenz63Model m;
  const ParamVector th = m.params({10.0, 28.0, 8.0 / 3.0, 2.0});
  const Vector f = m.drift(vec({1.0, 2.0, 3.0}), th, 0.0);
  EXPECT_DOUBLE_EQ(f[0], 10.0);
  EXPECT_DOUBLE_EQ(f[1], 28.0 - 2.0 - 3.0);
  EXPECT_DOUBLE_EQ(f[2], 2.0 - 8.0);
  EXPECT_TRUE(m.diffusion(f, th, 0.0).isApprox(2.0 * Matrix::Identity(3, 3)));
  EXPECT_EQ(m.observed(), (IndexList{0, 1, 2}));
}

TEST(Cwd, SigmaMatchesFormula) {
  const double S = 40, I = 5, b = 0.03, mu = 0.2, a = 8, m = 0.15;
  const Matrix s = cwd_sigma(S, I, b, mu, a, m);
  EXPECT_DOUBLE_EQ(s(0, 0), a + S * (b * I + m));
  EXPECT_DOUBLE_EQ(s(0, 1), -b * S * I);
  EXPECT_DOUBLE_EQ(s(1, 1), b * S * I + I * (mu + m));
  EXPECT_DOUBLE_EQ(s(1, 2), -mu * I);
  EXPECT_DOUBLE_EQ(s(2, 2), mu * I);
  EXPECT_DOUBLE_EQ(s(0, 2), 0.0);
  EXPECT_THROW(cwd_sigma(-1, I, b, mu, a, m), DomainError);
}

TEST(Cwd, SigmaIsPsdOnStateGrid) {
  for (double S = 0; S <= 200; S += 10) {
    for (double I = 0; I <= 100; I += 5) {
      const Matrix s = cwd_sigma(S, I, 0.03, 0.2, 8.0, 0.15);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
      EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-9 * (1 + s.norm())) << S << "," << I;
    }
  }
}

TEST(Cwd, DiffusionSquaresToSigmaAndStateIsClamped) {
  CwdDirectModel m(PiecewiseConstant(8.0), 0.15);
  const ParamVector th = m.params({0.03, 0.2});
  const Vector x = vec({30, 4, 2});
  const Matrix g = m.diffusion(x, th, 0.0);
  EXPECT_LT((g * g - cwd_sigma(30, 4, 0.03, 0.2, 8, 0.15)).norm(), 1e-10);
  const Vector f = m.drift(x, th, 0.0);
  EXPECT_DOUBLE_EQ(f[0], 8 - 30 * (0.03 * 4 + 0.15));
  EXPECT_DOUBLE_EQ(f[2], 0.2 * 4);

  // A step from the boundary with a large negative shock stays nonnegative.
  const StateVector next =
      euler_step(m, vec({0.5, 0.1, 0.0}), th, 0.0, 1.0 / 12, vec({-50, -50, -50}));
  EXPECT_GE(next.minCoeff(), 0.0);
}

TEST(PiecewiseConstantSeries, LooksUpLastBreakpoint) {
  PiecewiseConstant p({1974, 1980, 1990}, {5, 7, 9});
  EXPECT_EQ(p(1970), 5);
  EXPECT_EQ(p(1974), 5);
  EXPECT_EQ(p(1985.5), 7);
  EXPECT_EQ(p(2000), 9);
  EXPECT_EQ(PiecewiseConstant(3.0)(1234), 3.0);
  EXPECT_THROW(PiecewiseConstant({2, 1}, {0, 0}), ConfigError);
}

TEST(R0, PointEstimates) {
  // 0.03 / (0.21 + 0.15) = 0.0833...
  EXPECT_NEAR(r0_estimate(0.03, 0.21, 0.15, 1.0), 0.0833, 5e-5);
  EXPECT_EQ(r0_estimate(0.0, 0.21, 0.15, 100.0), 0.0);
  EXPECT_NEAR(r0_estimate(0.03, 0.21, 0.15, 50.0), 50 * 0.03 / 0.36, 1e-12);
  EXPECT_EQ(r0_threshold_population(0.0833), 13);
}

TEST(R0, IntervalTracksBetaQuantilesWhenMuIsFixed) {
  std::vector<double> beta = {0.01, 0.02, 0.03, 0.04, 0.05};
  std::vector<double> mu(beta.size(), 0.2);
  const R0Interval iv = r0_interval(0.03, 0.2, 0.15, beta, mu, 0.5);
  EXPECT_NEAR(iv.lower, 0.02 / 0.35, 1e-12);
  EXPECT_NEAR(iv.upper, 0.04 / 0.35, 1e-12);
  EXPECT_NEAR(iv.coefficient, 0.03 / 0.35, 1e-12);
}

TEST(Factory, KnownAndUnknownNames) {
  EXPECT_EQ(make_model("ou")->name(), "ou");
  EXPECT_EQ(make_model("lorenz63")->dimension(), 3);
  EXPECT_EQ(make_model("cwd-direct")->observed(), (IndexList{2}));
  EXPECT_THROW(make_model("sir"), ConfigError);
}

TEST(Euler, StepIsDriftPlusScaledNoise) {
  OuModel m;
  const ParamVector th = m.params({0.5, 2.0, 0.3});
  const StateVector x = euler_step(m, vec({1.0}), th, 0.0, 0.25, vec({0.7}));
  EXPECT_DOUBLE_EQ(x[0], 1.0 + (0.5 - 2.0) * 0.25 + 0.3 * 0.5 * 0.7);
}

TEST(Euler, NonFiniteDriftNamesCoordinate) {
  FunctionModel bad(
      "bad", {"y"}, {{"k", Constraint::kFree}}, {0},
      [](const StateVector&, const ParamVector&, double) {
        Vector f(1);
        f[0] = std::numeric_limits<double>::infinity();
        return f;
      },
      [](const StateVector&, const ParamVector&, double) { return Matrix::Identity(1, 1); });
  try {
    euler_step(bad, vec({0.0}), bad.params({1.0}), 0.0, 0.1, vec({0.0}));
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("y"), std::string::npos);
  }
}

TEST(Simulate, PathLengthAndDeterminism) {
  Lorenz63Model m;
  const ParamVector th = m.params({10.0, 28.0, 8.0 / 3.0, 2.0});
  const TimeGrid grid(0.0, {0.05, 0.1, 0.15}, 10);
  RandomStream a(9, StreamTag::kSimulate, {0});
  RandomStream b(9, StreamTag::kSimulate, {0});
  const Trajectory p = simulate_path(m, th, vec({-10, -10, 30}), grid, a);
  EXPECT_EQ(p.states.size(), 31u);
  EXPECT_EQ(p.times.size(), 31u);
  const Dataset d = simulate_dataset(m, th, vec({-10, -10, 30}), grid, b);
  ASSERT_EQ(d.records.size(), 3u);
  // Same stream, same draws: the dataset is the path sampled every M steps.
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(d.records[static_cast<std::size_t>(i)].values, p.states[static_cast<std::size_t>(10 * (i + 1))]);
  }
}

TEST(Simulate, CwdDatasetObservesOnlyC) {
  CwdDirectModel m(PiecewiseConstant(8.0), 0.15);
  std::vector<double> times;
  for (int y = 1975; y <= 1985; ++y) times.push_back(y);
  RandomStream rng(1, StreamTag::kSimulate, {0});
  const Dataset d =
      simulate_dataset(m, m.params({0.03, 0.2}), vec({30, 3, 0}), TimeGrid(1974, times, 12), rng);
  EXPECT_EQ(d.observed, (IndexList{2}));
  ASSERT_EQ(d.records.size(), 11u);
  double prev = 0.0;
  for (const auto& r : d.records) {
    ASSERT_EQ(r.values.size(), 1);
    EXPECT_GE(r.values[0], 0.0);
    prev = r.values[0];
  }
  EXPECT_GT(prev, 0.0);
}
