#pragma once

#include "psml/optimize.hpp"
#include "psml/sde.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace psml {

// Right-continuous step function of time: value_i on [start_i, start_{i+1}).
// Times before the first breakpoint take the first value.
class PiecewiseConstant {
 public:
  PiecewiseConstant() = default;
  explicit PiecewiseConstant(double constant) : starts_{0.0}, values_{constant} {}
  PiecewiseConstant(std::vector<double> starts, std::vector<double> values);

  double operator()(double t) const;
  bool empty() const { return values_.empty(); }
  const std::vector<double>& starts() const { return starts_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> starts_;
  std::vector<double> values_;
};

// dX = (theta1 - theta2 X) dt + theta3 dW.
class OuModel final : public SdeModel {
 public:
  OuModel();
  Vector drift(const StateVector& x, const ParamVector& theta,
               double t) const override;
  Matrix diffusion(const StateVector& x, const ParamVector& theta,
                   double t) const override;
  Matrix diffusion_covariance(const StateVector& x, const ParamVector& theta,
                              double t) const override;
};

// Stochastic Lorenz 63 with isotropic noise sigma; theta = (s, r, b, sigma).
class Lorenz63Model final : public SdeModel {
 public:
  Lorenz63Model();
  Vector drift(const StateVector& x, const ParamVector& theta,
               double t) const override;
  Matrix diffusion(const StateVector& x, const ParamVector& theta,
                   double t) const override;
  Matrix diffusion_covariance(const StateVector& x, const ParamVector& theta,
                              double t) const override;
};

// Direct-transmission CWD model on (S, I, C) with theta = (beta, mu). The
// annual additions a(t) and natural mortality m are known inputs; only the
// cumulative CWD deaths C are observed. Coefficients are evaluated at the
// state with S and I projected onto [0, inf).
class CwdDirectModel final : public SdeModel {
 public:
  CwdDirectModel(PiecewiseConstant additions, double mortality);

  const PiecewiseConstant& additions() const { return additions_; }
  double mortality() const { return mortality_; }

  Vector drift(const StateVector& x, const ParamVector& theta,
               double t) const override;
  Matrix diffusion(const StateVector& x, const ParamVector& theta,
                   double t) const override;
  Matrix diffusion_covariance(const StateVector& x, const ParamVector& theta,
                              double t) const override;

 private:
  PiecewiseConstant additions_;
  double mortality_;
};

// Covariance of the CWD increments per unit time:
//   [ a + S(beta I + m)   -beta S I              0    ]
//   [ -beta S I           beta S I + I(mu + m)   -mu I ]
//   [ 0                   -mu I                  mu I  ]
Matrix cwd_sigma(double susceptible, double infected, double beta, double mu,
                 double additions, double mortality);

// Log of the exact OU transition density of x_next given x after time delta.
double ou_exact_transition_logpdf(double x_next, double x,
                                  const ParamVector& theta, double delta);

// Sum of exact transition log-densities over a univariate dataset.
double ou_exact_log_likelihood(const Dataset& data, const ParamVector& theta);

struct OuMleResult {
  ParamVector theta;
  double log_likelihood = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Exact maximum likelihood for the OU model by Nelder-Mead on the exact
// likelihood, restarted from the incumbent until it stops improving.
OuMleResult ou_exact_mle(const Dataset& data, const ParamVector& init,
                         const OptimizerConfig& config = {});

struct R0Interval {
  double coefficient = 0.0;  // R0 / N0
  double lower = 0.0;        // quantile alpha / 2 of replicate coefficients
  double upper = 0.0;        // quantile 1 - alpha / 2
};

// beta N0 / (mu + m).
double r0_estimate(double beta, double mu, double mortality, double n0);

// Point coefficient and a bootstrap interval from replicate (beta, mu) pairs.
R0Interval r0_interval(double beta, double mu, double mortality,
                       const std::vector<double>& beta_replicates,
                       const std::vector<double>& mu_replicates, double alpha);

// Smallest closed population for which the interval lower bound exceeds 1.
int r0_threshold_population(double lower_coefficient);

struct ModelOptions {
  PiecewiseConstant additions;  // cwd-direct only
  double mortality = 0.15;      // cwd-direct only
};

// "ou" | "lorenz63" | "cwd-direct".
std::shared_ptr<const SdeModel> make_model(const std::string& name,
                                           const ModelOptions& options = {});

}  // namespace psml
