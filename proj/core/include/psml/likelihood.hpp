#pragma once

#include "psml/samplers.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace psml {

// Weighted sample of the unobserved coordinates at one observation time.
// For fully observed models every particle is the empty vector.
struct ParticleCloud {
  std::vector<Vector> particles;
  std::vector<double> weights;  // normalized

  static ParticleCloud point(const Vector& unobserved);
  std::size_t size() const { return particles.size(); }
  void validate() const;
};

// Importance-sampling estimate of one transition density: log of the mean of
// the J weights, with the weights' sample CV ((J - 1) denominator) and the
// per-transition effective sample size J / (1 + cv^2).
struct TransitionEstimate {
  double log_phat = 0.0;
  double cv = 0.0;
  double ess = 0.0;
};

struct TransitionResult {
  TransitionEstimate estimate;
  ParticleCloud cloud;
};

// Every random draw of an objective evaluation is keyed by (seed, dataset,
// transition, path); the key never involves theta or rho, so repeated
// evaluations share common random numbers.
struct TransitionKey {
  std::uint64_t seed = 0;
  std::uint64_t dataset = 0;
  std::uint64_t transition = 0;
};

// Estimator settings: penalty weight, paths J, substeps M and sampler.
// `estimate_rho` makes sampler.rho a free parameter of the PSML fit; otherwise
// it is held at sampler.rho.
struct PenaltyConfig {
  double lambda = 0.0;
  int paths = 8;
  int substeps = 8;
  SamplerSpec sampler;
  bool estimate_rho = false;

  void validate() const;
};

// Raised when every importance weight of a transition vanishes (below
// exp(-700)) or is non-finite.
class TransitionFailure : public NumericalError {
 public:
  TransitionFailure(std::size_t dataset, std::size_t transition,
                    double max_log_weight);

  std::size_t dataset() const { return dataset_; }
  std::size_t transition() const { return transition_; }
  double max_log_weight() const { return max_log_weight_; }

 private:
  std::size_t dataset_;
  std::size_t transition_;
  double max_log_weight_;
};

// One transition: each path resamples a start for the unobserved coordinates
// from `start_cloud` (multinomial), proposes a sub-path to `observation`
// and is weighted by h_rho. The next cloud holds the endpoints' unobserved
// coordinates with self-normalized weights.
TransitionResult transition_estimate(const SdeModel& model,
                                     const ParamVector& theta,
                                     const ParticleCloud& start_cloud,
                                     const Vector& observed_start,
                                     const Vector& observation,
                                     const GridInterval& interval,
                                     const SamplerSpec& sampler, int paths,
                                     const TransitionKey& key);

struct TransitionDiagnostics {
  std::size_t dataset = 0;
  std::size_t index = 0;
  double log_phat = 0.0;
  double cv = 0.0;
  double ess = 0.0;
};

struct LikelihoodResult {
  double log_likelihood = 0.0;
  std::vector<TransitionDiagnostics> transitions;

  double cv_sum() const;
};

// Simulated log-likelihood of independent datasets sharing theta. Throws
// TransitionFailure naming the offending transition.
LikelihoodResult log_likelihood(const SdeModel& model, const ParamVector& theta,
                                std::span<const Dataset> datasets,
                                const PenaltyConfig& config,
                                std::uint64_t seed);

// log_likelihood - lambda * sum of transition CVs, with the sampler
// instantiated at `rho`.
double penalized_log_likelihood(const SdeModel& model,
                                const ParamVector& theta, double rho,
                                std::span<const Dataset> datasets,
                                const PenaltyConfig& config,
                                std::uint64_t seed);

// J / (1 + mean(cv^2)).
double effective_sample_size(std::span<const double> cvs, int paths);

// [{"i", "dataset", "log_phat", "cv", "ess"}, ...]
nlohmann::json diagnostics_json(const LikelihoodResult& result);

}  // namespace psml
