#pragma once

#include "psml/optimize.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace psml {

// Settings of the lambda ladder. eps0 and delta_eps are data dependent; see
// preset() for the values used with the bundled models.
struct TuneConfig {
  double lambda0 = 0.5;
  double eps0 = 0.04;
  double delta_lambda = 0.025;
  double delta_eps = 0.001;
  int simulations = 1000;  // L
  int max_fits = 60;

  void validate() const;
  // "ou", "lorenz63" or "cwd-direct".
  static TuneConfig preset(const std::string& model);
};

// Mean Euclidean distance between the observed coordinates of Euler-simulated
// replicates at theta and the data, averaged over all n records and L
// replicates. Replicates start from each dataset's x0.
double prediction_error(const SdeModel& model, const ParamVector& theta,
                        std::span<const Dataset> datasets, int substeps,
                        int simulations, std::uint64_t seed, int threads = 1);

struct LambdaProbe {
  double lambda = 0.0;
  double eps = 0.0;
  bool accepted = false;
};

struct TuneResult {
  double lambda = 0.0;
  PsmlFit fit;
  double eps = 0.0;
  std::vector<LambdaProbe> trace;  // every fitted lambda, in order
};

struct LambdaEvaluation {
  PsmlFit fit;
  double eps = 0.0;
};

using LambdaEvaluator = std::function<LambdaEvaluation(double lambda)>;

// The lambda ladder: fit at lambda0 and stop if eps < eps0; otherwise step
// lambda down by delta_lambda while each step improves eps by more than
// delta_eps; if lambda never moved down, step it up under the same rule.
// lambda is clamped at 0 and reaching 0 ends the search.
TuneResult tune_lambda(const LambdaEvaluator& evaluate, const TuneConfig& config);

// tune_lambda with PSML fits from theta_init and prediction errors at the
// fitted theta, sharing `seed` across every lambda.
TuneResult tune_lambda(const SdeModel& model, std::span<const Dataset> datasets,
                       const TuneConfig& config, const PenaltyConfig& base,
                       const ParamVector& theta_init,
                       const OptimizerConfig& optimizer, std::uint64_t seed);

struct ParameterInterval {
  std::string name;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct BootstrapResult {
  double alpha = 0.05;
  std::vector<std::vector<double>> replicates;  // theta per successful replicate
  std::vector<double> rho_replicates;
  std::vector<ParameterInterval> intervals;
  int failures = 0;
};

// Simulates `replicates` datasets at fit.theta with the templates' x0 and
// times, re-estimates each with maximize_psml under `estimation` (rho
// starting at fit.rho), and reports empirical (alpha/2, 1 - alpha/2)
// quantile intervals. Fails when more than 10% of replicates fail.
BootstrapResult parametric_bootstrap(const SdeModel& model, const PsmlFit& fit,
                                     std::span<const Dataset> templates,
                                     const PenaltyConfig& estimation,
                                     const OptimizerConfig& optimizer,
                                     int replicates, double alpha,
                                     std::uint64_t seed, int threads = 1);

// Percentile intervals from replicate parameter vectors.
std::vector<ParameterInterval> quantile_intervals(
    const std::vector<std::string>& names, const std::vector<double>& estimate,
    const std::vector<std::vector<double>>& replicates, double alpha);

}  // namespace psml
