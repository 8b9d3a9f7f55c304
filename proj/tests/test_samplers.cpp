#include <gtest/gtest.h>

#include <psml/models.hpp>
#include <psml/samplers.hpp>
#include <psml/stats.hpp>

#include <cmath>
#include <numbers>
#include <optional>

using namespace psml;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Density of M chained OU Euler steps, which is Gaussian.
double ou_euler_chain_logpdf(double y, double x, double t1, double t2, double t3,
                             double delta, int M) {
  const double dt = delta / M;
  const double a = 1.0 - t2 * dt;
  double mean = x;
  double var = 0.0;
  for (int m = 0; m < M; ++m) {
    mean = a * mean + t1 * dt;
    var = a * a * var + t3 * t3 * dt;
  }
  return -0.5 * std::log(2 * std::numbers::pi * var) - 0.5 * (y - mean) * (y - mean) / var;
}

FunctionModel brownian(double sigma) {
  return FunctionModel(
      "bm", {"w"}, {{"s", Constraint::kPositive}}, {0},
      [](const StateVector& x, const ParamVector&, double) { return Vector::Zero(x.size()).eval(); },
      [sigma](const StateVector&, const ParamVector&, double) {
        return (sigma * Matrix::Identity(1, 1)).eval();
      });
}

}  // namespace

TEST(RegularizedWeight, IsOneAtLastSubstep) {
  for (double rho : {0.0, 0.1, 0.5, 1.0}) {
    for (int M : {2, 8, 12}) EXPECT_DOUBLE_EQ(regularized_bridge_weight(M - 1, M, rho), 1.0);
  }
  EXPECT_DOUBLE_EQ(regularized_bridge_weight(0, 8, 0.1), 8.0 / (8.0 + 0.1 * 49.0));
  EXPECT_DOUBLE_EQ(regularized_bridge_weight(3, 8, 0.0), 1.0);
}

TEST(SamplerSpecJson, RoundTrip) {
  const nlohmann::json j = nlohmann::json::parse(R"({"kind":"aux-mbb","rho":0.9})");
  const SamplerSpec s = j.get<SamplerSpec>();
  EXPECT_EQ(s.kind, SamplerKind::kAuxMbb);
  EXPECT_EQ(s.rho, 0.9);
  EXPECT_EQ(nlohmann::json(s), j);
  EXPECT_THROW(parse_sampler_kind("bridge"), ConfigError);
}

TEST(SamplerSpecValidate, RhoRange) {
  EXPECT_THROW((SamplerSpec{SamplerKind::kRegularized, 1.5}).validate(), DomainError);
  EXPECT_THROW((SamplerSpec{SamplerKind::kAuxMbb, 0.0}).validate(), DomainError);
  EXPECT_NO_THROW((SamplerSpec{SamplerKind::kRegularized, 0.0}).validate());
}

TEST(BridgeMoments, BrownianBridgeClosedForm) {
  const FunctionModel bm = brownian(0.5);
  const ParamVector th = bm.params({0.5});
  const int M = 8;
  const double dt = 0.125;
  for (int m = 0; m <= M - 2; ++m) {
    const BridgeMoments b = bridge_moments(bm, th, vec({0.2}), vec({1.0}), m * dt, dt, m, M);
    const double r = M - m;
    EXPECT_NEAR(b.eta[0], (1.0 - 0.2) / (dt * r), 1e-12);
    EXPECT_NEAR(b.sigma(0, 0), 0.25 * (r - 1) / r, 1e-12);
  }
  EXPECT_THROW(bridge_moments(bm, th, vec({0.2}), vec({1.0}), 0, dt, M - 1, M), DomainError);
}

TEST(Propose, EndpointHitsObservation) {
  OuModel ou;
  const ParamVector th = ou.params({0.0187, 0.2610, 0.0224});
  for (auto kind : {SamplerKind::kPedersen, SamplerKind::kMbb, SamplerKind::kRegularized,
                    SamplerKind::kAuxMbb}) {
    RandomStream rng(1, StreamTag::kPath, {0});
    SubPath p;
    propose({kind, 0.5}, ou, th, vec({1.0}), vec({0.8}), {0.0, 1.0, 8}, rng, p);
    ASSERT_EQ(p.states.size(), 9u);
    EXPECT_EQ(p.states.back()[0], 0.8);
    EXPECT_TRUE(std::isfinite(p.log_weight()));
  }
}

TEST(Propose, AuxMbbAtRhoOneIsBitwiseMbb) {
  CwdDirectModel cwd(PiecewiseConstant(8.0), 0.15);
  const ParamVector th = cwd.params({0.03, 0.2});
  int compared = 0;
  for (std::uint64_t j = 0; j < 50; ++j) {
    RandomStream a(7, StreamTag::kPath, {0, 1, j});
    RandomStream b(7, StreamTag::kPath, {0, 1, j});
    std::optional<SubPath> m, x;
    try {
      m = mbb_propose(cwd, th, vec({30, 3, 1}), vec({2.5}), {0, 1, 12}, a);
    } catch (const NumericalError&) {
    }
    try {
      x = aux_mbb_propose(cwd, th, vec({30, 3, 1}), vec({2.5}), {0, 1, 12}, 1.0, b);
    } catch (const NumericalError&) {
    }
    // Both fail on the same draws (a path reaching I = 0) or neither does.
    ASSERT_EQ(m.has_value(), x.has_value());
    if (!m) continue;
    ++compared;
    ASSERT_EQ(m->states.size(), x->states.size());
    for (std::size_t s = 0; s < m->states.size(); ++s) EXPECT_EQ(m->states[s], x->states[s]);
    EXPECT_EQ(m->log_target, x->log_target);
    EXPECT_EQ(m->log_proposal, x->log_proposal);
  }
  EXPECT_GT(compared, 25);
}

TEST(Propose, RegularizedAtRhoZeroIsMbb) {
  Lorenz63Model lz;
  const ParamVector th = lz.params({10, 28, 8.0 / 3.0, 2});
  RandomStream a(3, StreamTag::kPath, {0});
  RandomStream b(3, StreamTag::kPath, {0});
  const SubPath m = mbb_propose(lz, th, vec({-10, -10, 30}), vec({-9, -8, 29}), {0, 0.05, 10}, a);
  const SubPath r =
      regularized_propose(lz, th, vec({-10, -10, 30}), vec({-9, -8, 29}), {0, 0.05, 10}, 0.0, b);
  for (std::size_t s = 0; s < m.states.size(); ++s) {
    EXPECT_LT((m.states[s] - r.states[s]).norm(), 1e-12);
  }
  EXPECT_NEAR(m.log_weight(), r.log_weight(), 1e-9);
}

TEST(Propose, EveryKindConsumesTheSameNoise) {
  CwdDirectModel cwd(PiecewiseConstant(8.0), 0.15);
  const ParamVector th = cwd.params({0.03, 0.2});
  std::vector<std::uint64_t> next;
  for (auto kind : {SamplerKind::kPedersen, SamplerKind::kMbb, SamplerKind::kRegularized,
                    SamplerKind::kAuxMbb}) {
    RandomStream rng(5, StreamTag::kPath, {0});
    SubPath p;
    propose({kind, 0.4}, cwd, th, vec({30, 3, 1}), vec({2.5}), {0, 1, 12}, rng, p);
    next.push_back(rng());
  }
  for (std::size_t i = 1; i < next.size(); ++i) EXPECT_EQ(next[i], next[0]);
}

TEST(Propose, PedersenWeightIsFinalEulerDensity) {
  OuModel ou;
  const ParamVector th = ou.params({0.0187, 0.2610, 0.0224});
  RandomStream rng(2, StreamTag::kPath, {0});
  const SubPath p = pedersen_propose(ou, th, vec({1.0}), vec({0.8}), {0, 1, 8}, rng);
  const double x = p.states[7][0];
  const double dt = 0.125;
  const double mean = x + (0.0187 - 0.2610 * x) * dt;
  const double var = 0.0224 * 0.0224 * dt;
  const double expected =
      -0.5 * std::log(2 * std::numbers::pi * var) - 0.5 * (0.8 - mean) * (0.8 - mean) / var;
  EXPECT_NEAR(p.log_weight(), expected, 1e-10);
}

TEST(Propose, PartialObservationDrawsUnobservedEndpoint) {
  CwdDirectModel cwd(PiecewiseConstant(8.0), 0.15);
  const ParamVector th = cwd.params({0.03, 0.2});
  RandomStream rng(4, StreamTag::kPath, {0});
  SubPath p;
  propose({SamplerKind::kMbb, 1.0}, cwd, th, vec({30, 3, 1}), vec({1.6}), {0, 1, 12}, rng, p);
  EXPECT_EQ(p.states.back()[2], 1.6);
  EXPECT_NE(p.states.back()[0], p.states[11][0]);
}

// Importance sampling is unbiased for the Euler density of the interval; for
// OU that density is an explicit Gaussian.
TEST(Propose, MeanWeightMatchesEulerChainDensity) {
  OuModel ou;
  const double t1 = 0.0187, t2 = 0.2610, t3 = 0.0224;
  const ParamVector th = ou.params({t1, t2, t3});
  const double y = 0.80;
  const double oracle = std::exp(ou_euler_chain_logpdf(y, 1.0, t1, t2, t3, 1.0, 8));
  for (auto spec : {SamplerSpec{SamplerKind::kPedersen, 1.0}, SamplerSpec{SamplerKind::kMbb, 1.0},
                    SamplerSpec{SamplerKind::kRegularized, 0.1},
                    SamplerSpec{SamplerKind::kAuxMbb, 0.9}}) {
    std::vector<double> w;
    SubPath p;
    for (std::uint64_t j = 0; j < 20000; ++j) {
      RandomStream rng(17, StreamTag::kPath, {0, 0, j});
      propose(spec, ou, th, vec({1.0}), vec({y}), {0, 1, 8}, rng, p);
      w.push_back(std::exp(p.log_weight()));
    }
    // Four standard errors of the mean weight.
    const double tol = 4.0 * sample_cv(w) / std::sqrt(static_cast<double>(w.size()));
    EXPECT_NEAR(mean(w) / oracle, 1.0, tol) << to_string(spec.kind);
  }
}
