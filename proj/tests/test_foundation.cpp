#include <gtest/gtest.h>

#include <psml/rng.hpp>
#include <psml/stats.hpp>
#include <psml/types.hpp>

#include <cmath>
#include <limits>
#include <set>

using namespace psml;

TEST(ParamVector, AdmissibleChecksEachConstraint) {
  ParamVector ok({-1.0, 2.0, 0.5},
                 {Constraint::kFree, Constraint::kPositive, Constraint::kUnitInterval});
  EXPECT_TRUE(ok.admissible());
  ParamVector bad_pos({1.0, -2.0}, {Constraint::kFree, Constraint::kPositive});
  EXPECT_FALSE(bad_pos.admissible());
  ParamVector bad_unit({1.5}, {Constraint::kUnitInterval});
  EXPECT_FALSE(bad_unit.admissible());
  ParamVector nan({std::nan("")}, {Constraint::kFree});
  EXPECT_FALSE(nan.admissible());
}

TEST(ParamVector, EmptyConstraintsMeanFree) {
  ParamVector v({-3.0, 4.0}, {});
  ASSERT_EQ(v.constraints().size(), 2u);
  EXPECT_EQ(v.constraints()[0], Constraint::kFree);
  EXPECT_TRUE(v.admissible());
}

TEST(TimeGrid, StepIsIntervalOverSubsteps) {
  TimeGrid g(0.0, {1.0, 3.0}, 4);
  EXPECT_EQ(g.intervals(), 2u);
  EXPECT_DOUBLE_EQ(g.start(1), 1.0);
  EXPECT_DOUBLE_EQ(g.end(1), 3.0);
  EXPECT_DOUBLE_EQ(g.step(0), 0.25);
  EXPECT_DOUBLE_EQ(g.step(1), 0.5);
}

TEST(TimeGrid, RejectsNonIncreasingTimes) {
  EXPECT_THROW(TimeGrid(0.0, {1.0, 1.0}, 2), DomainError);
  EXPECT_THROW(TimeGrid(1.0, {1.0}, 2), DomainError);
  EXPECT_THROW(TimeGrid(0.0, {1.0}, 0), DomainError);
}

TEST(Dataset, ValidateCatchesShapeErrors) {
  Dataset d;
  d.t0 = 0.0;
  d.x0 = Vector::Zero(2);
  d.observed = {1};
  Observation o;
  o.time = 1.0;
  o.values = Vector::Ones(1);
  d.records.push_back(o);
  EXPECT_NO_THROW(d.validate(2));
  EXPECT_THROW(d.validate(3), ConfigError);

  Dataset wrong = d;
  wrong.records[0].values = Vector::Ones(2);
  EXPECT_THROW(wrong.validate(2), ConfigError);

  Dataset dup = d;
  dup.observed = {1, 1};
  EXPECT_THROW(dup.validate(2), ConfigError);
}

TEST(Select, GathersAndComplements) {
  Vector v(4);
  v << 10, 11, 12, 13;
  const Vector s = select(v, {3, 1});
  ASSERT_EQ(s.size(), 2);
  EXPECT_EQ(s[0], 13);
  EXPECT_EQ(s[1], 11);
  EXPECT_EQ(complement({2, 0}, 4), (IndexList{1, 3}));
}

TEST(RandomStream, SameKeySameSequence) {
  RandomStream a(42, StreamTag::kPath, {1, 2, 3});
  RandomStream b(42, StreamTag::kPath, {1, 2, 3});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.normal(), b.normal());
}

TEST(RandomStream, DistinctKeysDiffer) {
  std::set<std::uint64_t> first;
  for (std::uint64_t p = 0; p < 64; ++p) {
    RandomStream s(42, StreamTag::kPath, {0, 0, p});
    first.insert(s());
  }
  EXPECT_EQ(first.size(), 64u);
  EXPECT_NE(stream_key({1, 2}), stream_key({2, 1}));
  EXPECT_NE(RandomStream(1, StreamTag::kPath, {0})(),
            RandomStream(1, StreamTag::kResample, {0})());
}

TEST(RandomStream, UniformAndNormalMoments) {
  RandomStream s(7, StreamTag::kSimulate, {0});
  const int n = 200000;
  double su = 0.0;
  double sz = 0.0;
  double szz = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = s.normal();
    sz += z;
    szz += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sz / n, 0.0, 0.01);
  EXPECT_NEAR(szz / n, 1.0, 0.02);
}

TEST(Stats, CvOfThreeWeights) {
  // mean 2, sd sqrt(((1)^2 + 0 + 1^2) / 2) = 1, cv = 0.5
  const std::vector<double> w = {1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(mean(w), 2.0);
  EXPECT_DOUBLE_EQ(sample_sd(w), 1.0);
  EXPECT_DOUBLE_EQ(sample_cv(w), 0.5);
}

TEST(Stats, CvIsScaleInvariantAndZeroForEqualWeights) {
  const std::vector<double> w = {0.3, 1.7, 2.2, 0.9};
  std::vector<double> scaled;
  for (double x : w) scaled.push_back(x * 1e-200);
  EXPECT_NEAR(sample_cv(w), sample_cv(scaled), 1e-12);
  EXPECT_EQ(sample_cv(std::vector<double>{4.0, 4.0, 4.0}), 0.0);
}

TEST(Stats, QuantileType7) {
  // R: quantile(c(1, 2, 3, 4), c(0.25, 0.5, 0.9)) -> 1.75 2.5 3.7
  const std::vector<double> x = {4.0, 1.0, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(quantile(x, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile(x, 0.5), 2.5);
  EXPECT_NEAR(quantile(x, 0.9), 3.7, 1e-12);
  EXPECT_DOUBLE_EQ(quantile(x, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(x, 1.0), 4.0);
  EXPECT_THROW(quantile({}, 0.5), DomainError);
  EXPECT_THROW(quantile(x, 1.5), DomainError);
}

TEST(Stats, LogSumExpIsStable) {
  const std::vector<double> big = {1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(big), 1000.0 + std::log(2.0), 1e-12);
  const std::vector<double> mixed = {-std::numeric_limits<double>::infinity(), 0.0};
  EXPECT_NEAR(log_sum_exp(mixed), 0.0, 1e-15);
}
