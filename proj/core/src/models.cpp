#include "psml/models.hpp"

#include "psml/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace psml {

PiecewiseConstant::PiecewiseConstant(std::vector<double> starts,
                                     std::vector<double> values)
    : starts_(std::move(starts)), values_(std::move(values)) {
  if (starts_.size() != values_.size() || starts_.empty()) {
    throw ConfigError("piecewise-constant series needs matching, nonempty columns");
  }
  for (std::size_t i = 1; i < starts_.size(); ++i) {
    if (!(starts_[i] > starts_[i - 1])) {
      throw ConfigError("piecewise-constant breakpoints must increase");
    }
  }
}

double PiecewiseConstant::operator()(double t) const {
  if (values_.empty()) return 0.0;
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  if (it == starts_.begin()) return values_.front();
  return values_[static_cast<std::size_t>(it - starts_.begin()) - 1];
}

// ---------------------------------------------------------------------------
// Ornstein-Uhlenbeck

OuModel::OuModel()
    : SdeModel("ou", {"x1"},
               {{"theta1", Constraint::kFree},
                {"theta2", Constraint::kPositive},
                {"theta3", Constraint::kPositive}},
               {0}) {}

Vector OuModel::drift(const StateVector& x, const ParamVector& theta,
                      double) const {
  Vector f(1);
  f[0] = theta[0] - theta[1] * x[0];
  return f;
}

Matrix OuModel::diffusion(const StateVector&, const ParamVector& theta,
                          double) const {
  Matrix g(1, 1);
  g(0, 0) = theta[2];
  return g;
}

Matrix OuModel::diffusion_covariance(const StateVector&,
                                     const ParamVector& theta, double) const {
  Matrix g(1, 1);
  g(0, 0) = theta[2] * theta[2];
  return g;
}

double ou_exact_transition_logpdf(double x_next, double x,
                                  const ParamVector& theta, double delta) {
  if (theta.size() != 3) throw DomainError("OU needs three parameters");
  const double t1 = theta[0];
  const double t2 = theta[1];
  const double t3 = theta[2];
  if (!(t2 > 0.0)) throw DomainError("OU reversion speed theta2 must be > 0");
  if (!(delta > 0.0)) throw DomainError("OU transition needs delta > 0");
  const double level = t1 / t2;
  const double decay = std::exp(-t2 * delta);
  const double mean = level + (x - level) * decay;
  const double var = t3 * t3 * -std::expm1(-2.0 * t2 * delta) / (2.0 * t2);
  const double r = x_next - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + r * r / var);
}

double ou_exact_log_likelihood(const Dataset& data, const ParamVector& theta) {
  if (data.x0.size() != 1) throw DomainError("OU likelihood needs univariate data");
  double ll = 0.0;
  double x = data.x0[0];
  double t = data.t0;
  for (const auto& rec : data.records) {
    ll += ou_exact_transition_logpdf(rec.values[0], x, theta, rec.time - t);
    x = rec.values[0];
    t = rec.time;
  }
  return ll;
}

OuMleResult ou_exact_mle(const Dataset& data, const ParamVector& init,
                         const OptimizerConfig& config) {
  if (data.x0.size() != 1 || data.observed.size() != 1) {
    throw DomainError("ou_exact_mle: dataset must be univariate");
  }
  const OuModel model;
  const auto constraints = model.constraints();
  auto objective = [&](std::span<const double> z) {
    const ParamVector theta = untransform(z, constraints);
    const double ll = ou_exact_log_likelihood(data, theta);
    return std::isfinite(ll) ? ll : -std::numeric_limits<double>::infinity();
  };

  OuMleResult out;
  std::vector<double> x = transform(model.params(
      std::vector<double>(init.values().begin(), init.values().end())));
  double previous = -std::numeric_limits<double>::infinity();
  constexpr int kMaxRestarts = 20;
  for (int restart = 0; restart < kMaxRestarts; ++restart) {
    const OptResult r = nelder_mead(objective, x, config);
    out.evaluations += r.evaluations;
    x = r.x;
    out.converged = r.converged;
    const bool stalled = r.value - previous <= config.tolerance;
    previous = r.value;
    if (stalled) break;
  }
  out.theta = untransform(x, constraints);
  out.log_likelihood = previous;
  return out;
}

// ---------------------------------------------------------------------------
// Lorenz 63

Lorenz63Model::Lorenz63Model()
    : SdeModel("lorenz63", {"x1", "x2", "x3"},
               {{"s", Constraint::kPositive},
                {"r", Constraint::kPositive},
                {"b", Constraint::kPositive},
                {"sigma", Constraint::kPositive}},
               {0, 1, 2}) {}

Vector Lorenz63Model::drift(const StateVector& x, const ParamVector& theta,
                            double) const {
  const double s = theta[0];
  const double r = theta[1];
  const double b = theta[2];
  Vector f(3);
  f[0] = s * (x[1] - x[0]);
  f[1] = r * x[0] - x[1] - x[0] * x[2];
  f[2] = x[0] * x[1] - b * x[2];
  return f;
}

Matrix Lorenz63Model::diffusion(const StateVector&, const ParamVector& theta,
                                double) const {
  return theta[3] * Matrix::Identity(3, 3);
}

Matrix Lorenz63Model::diffusion_covariance(const StateVector&,
                                           const ParamVector& theta,
                                           double) const {
  return theta[3] * theta[3] * Matrix::Identity(3, 3);
}

// ---------------------------------------------------------------------------
// CWD direct transmission

CwdDirectModel::CwdDirectModel(PiecewiseConstant additions, double mortality)
    : SdeModel("cwd-direct", {"S", "I", "C"},
               {{"beta", Constraint::kPositive}, {"mu", Constraint::kPositive}},
               {2}, {true, true, true}),
      additions_(std::move(additions)),
      mortality_(mortality) {
  if (!(mortality_ >= 0.0)) throw ConfigError("cwd: mortality m must be >= 0");
  if (additions_.empty()) additions_ = PiecewiseConstant(0.0);
}

Vector CwdDirectModel::drift(const StateVector& x, const ParamVector& theta,
                             double t) const {
  const double s = std::max(x[0], 0.0);
  const double i = std::max(x[1], 0.0);
  const double beta = theta[0];
  const double mu = theta[1];
  const double m = mortality_;
  Vector f(3);
  f[0] = additions_(t) - s * (beta * i + m);
  f[1] = beta * s * i - i * (mu + m);
  f[2] = mu * i;
  return f;
}

Matrix CwdDirectModel::diffusion_covariance(const StateVector& x,
                                            const ParamVector& theta,
                                            double t) const {
  return cwd_sigma(std::max(x[0], 0.0), std::max(x[1], 0.0), theta[0], theta[1],
                   additions_(t), mortality_);
}

Matrix CwdDirectModel::diffusion(const StateVector& x, const ParamVector& theta,
                                 double t) const {
  return matrix_sqrt(diffusion_covariance(x, theta, t));
}

Matrix cwd_sigma(double susceptible, double infected, double beta, double mu,
                 double additions, double mortality) {
  if (susceptible < 0.0 || infected < 0.0) {
    throw DomainError("cwd_sigma: S and I must be nonnegative");
  }
  const double s = susceptible;
  const double i = infected;
  const double infection = beta * s * i;
  Matrix sigma = Matrix::Zero(3, 3);
  sigma(0, 0) = additions + s * (beta * i + mortality);
  sigma(0, 1) = sigma(1, 0) = -infection;
  sigma(1, 1) = infection + i * (mu + mortality);
  sigma(1, 2) = sigma(2, 1) = -mu * i;
  sigma(2, 2) = mu * i;
  return sigma;
}

// ---------------------------------------------------------------------------
// Basic reproductive number

double r0_estimate(double beta, double mu, double mortality, double n0) {
  if (!(mu + mortality > 0.0)) throw DomainError("r0: mu + m must be > 0");
  return beta * n0 / (mu + mortality);
}

R0Interval r0_interval(double beta, double mu, double mortality,
                       const std::vector<double>& beta_replicates,
                       const std::vector<double>& mu_replicates, double alpha) {
  if (beta_replicates.size() != mu_replicates.size() || beta_replicates.empty()) {
    throw DomainError("r0_interval: need matching, nonempty replicate lists");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("r0_interval: alpha in (0, 1]");
  std::vector<double> coefficients;
  coefficients.reserve(beta_replicates.size());
  for (std::size_t r = 0; r < beta_replicates.size(); ++r) {
    coefficients.push_back(
        r0_estimate(beta_replicates[r], mu_replicates[r], mortality, 1.0));
  }
  R0Interval out;
  out.coefficient = r0_estimate(beta, mu, mortality, 1.0);
  out.lower = quantile(coefficients, alpha / 2.0);
  out.upper = quantile(coefficients, 1.0 - alpha / 2.0);
  return out;
}

int r0_threshold_population(double lower_coefficient) {
  if (!(lower_coefficient > 0.0)) {
    throw DomainError("r0 threshold needs a positive lower coefficient");
  }
  return static_cast<int>(std::ceil(1.0 / lower_coefficient));
}

std::shared_ptr<const SdeModel> make_model(const std::string& name,
                                           const ModelOptions& options) {
  if (name == "ou") return std::make_shared<OuModel>();
  if (name == "lorenz63") return std::make_shared<Lorenz63Model>();
  if (name == "cwd-direct") {
    return std::make_shared<CwdDirectModel>(options.additions, options.mortality);
  }
  throw ConfigError("unknown model '" + name + "' (expected ou | lorenz63 | cwd-direct)");
}

}  // namespace psml
