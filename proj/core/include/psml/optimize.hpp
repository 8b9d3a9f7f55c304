#pragma once

#include "psml/likelihood.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace psml {

struct OptimizerConfig {
  // Stop once the simplex's best and worst objective values differ by less.
  double tolerance = 1e-6;
  int max_evaluations = 1500;
  // Axis offset of the initial simplex, in transformed coordinates.
  double initial_step = 0.1;

  void validate(std::size_t dimension) const;
};

struct OptResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;
// Called once per objective evaluation with (evaluation index, x, value).
using TraceSink = std::function<void(int, std::span<const double>, double)>;

// Maximizes `objective` with the Nelder-Mead simplex method (reflection 1,
// expansion 2, contraction 0.5, shrink 0.5). NaN is treated as -inf.
// Throws DomainError when the objective is not finite at x0.
OptResult nelder_mead(const Objective& objective, std::vector<double> x0,
                      const OptimizerConfig& config,
                      const TraceSink& trace = {});

// Boundary values (0 for positive; 0 or 1 for unit-interval) are nudged 1e-8
// into the interior and reported through `nudged`.
double to_unconstrained(double value, Constraint c, bool* nudged = nullptr);
double from_unconstrained(double z, Constraint c);

std::vector<double> transform(const ParamVector& theta, bool* nudged = nullptr);
ParamVector untransform(std::span<const double> z,
                        std::span<const Constraint> constraints);

// Output of one penalized simulated maximum likelihood fit.
struct PsmlFit {
  ParamVector theta;
  double rho = 1.0;
  bool rho_estimated = false;
  double lambda = 0.0;
  double objective = 0.0;       // penalized log-likelihood at the optimum
  double log_likelihood = 0.0;  // unpenalized part
  double cv_sum = 0.0;
  std::vector<TransitionDiagnostics> transitions;
  int evaluations = 0;
  bool converged = false;
  double seconds = 0.0;
};

// Joint Nelder-Mead over (transformed theta, logit rho) of the penalized
// log-likelihood with a fixed evaluation seed. rho is optimized only when
// config.estimate_rho is set and the sampler family has an auxiliary
// parameter. Throws DomainError when the initial point has -inf objective.
PsmlFit maximize_psml(const SdeModel& model, std::span<const Dataset> datasets,
                      const PenaltyConfig& config, const ParamVector& theta_init,
                      const OptimizerConfig& optimizer, std::uint64_t seed,
                      const TraceSink& trace = {});

}  // namespace psml
