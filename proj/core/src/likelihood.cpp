#include "psml/likelihood.hpp"

#include "psml/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace psml {
namespace {

constexpr double kVanishingLogWeight = -700.0;

std::size_t draw_ancestor(const std::vector<double>& cumulative, double u) {
  const auto it =
      std::upper_bound(cumulative.begin(), cumulative.end(),
                       u * cumulative.back());
  return std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1);
}

}  // namespace

ParticleCloud ParticleCloud::point(const Vector& unobserved) {
  return {{unobserved}, {1.0}};
}

void ParticleCloud::validate() const {
  if (particles.empty()) throw DomainError("particle cloud is empty");
  if (weights.size() != particles.size()) {
    throw DomainError("particle cloud: one weight per particle required");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("particle cloud: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("particle cloud: weights do not sum to one");
  }
}

void PenaltyConfig::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (paths < 2) throw ConfigError("J must be >= 2");
  if (substeps < 1) throw ConfigError("M must be >= 1");
  try {
    sampler.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

TransitionFailure::TransitionFailure(std::size_t dataset,
                                     std::size_t transition,
                                     double max_log_weight)
    : NumericalError("transition " + std::to_string(transition) +
                     " of dataset " + std::to_string(dataset) +
                     ": all importance weights vanished (max log-weight " +
                     std::to_string(max_log_weight) + ")"),
      dataset_(dataset),
      transition_(transition),
      max_log_weight_(max_log_weight) {}

TransitionResult transition_estimate(const SdeModel& model,
                                     const ParamVector& theta,
                                     const ParticleCloud& start_cloud,
                                     const Vector& observed_start,
                                     const Vector& observation,
                                     const GridInterval& interval,
                                     const SamplerSpec& sampler, int paths,
                                     const TransitionKey& key) {
  if (paths < 1) throw DomainError("transition_estimate: J must be >= 1");
  if (!(interval.end > interval.start)) {
    throw DomainError("transition_estimate: interval must be positive");
  }
  if (start_cloud.particles.empty()) {
    throw DomainError("transition_estimate: empty particle cloud");
  }
  const IndexList& obs = model.observed();
  const IndexList& unobs = model.unobserved();
  const int k = model.dimension();

  std::vector<double> cumulative(start_cloud.weights.size());
  std::partial_sum(start_cloud.weights.begin(), start_cloud.weights.end(),
                   cumulative.begin());

  std::vector<double> log_weights(paths);
  std::vector<Vector> endpoints(paths);
  SubPath path;
  StateVector start(k);
  start(obs) = observed_start;
  for (int j = 0; j < paths; ++j) {
    const auto jj = static_cast<std::uint64_t>(j);
    std::size_t ancestor = 0;
    if (start_cloud.size() > 1) {
      RandomStream pick(key.seed, StreamTag::kResample,
                        {key.dataset, key.transition, jj});
      ancestor = draw_ancestor(cumulative, pick.uniform());
    }
    if (!unobs.empty()) start(unobs) = start_cloud.particles[ancestor];
    RandomStream rng(key.seed, StreamTag::kPath,
                     {key.dataset, key.transition, jj});
    // A path whose Gaussian factors degenerate (e.g. a vanishing diffusion
    // block) cannot reach the observation; it keeps zero weight.
    try {
      propose(sampler, model, theta, start, observation, interval, rng, path);
      const double lw = path.log_weight();
      log_weights[j] =
          std::isnan(lw) ? -std::numeric_limits<double>::infinity() : lw;
      endpoints[j] = select(path.states.back(), unobs);
    } catch (const NumericalError&) {
      log_weights[j] = -std::numeric_limits<double>::infinity();
      endpoints[j] = select(start, unobs);
    }
  }

  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (!(top > kVanishingLogWeight) || !std::isfinite(top)) {
    throw TransitionFailure(key.dataset, key.transition, top);
  }

  // Weights relative to the largest; CV is scale invariant.
  std::vector<double> scaled(paths);
  double total = 0.0;
  for (int j = 0; j < paths; ++j) {
    scaled[j] = std::exp(log_weights[j] - top);
    total += scaled[j];
  }

  TransitionResult out;
  out.estimate.log_phat = top + std::log(total / paths);
  out.estimate.cv = paths > 1 ? sample_cv(scaled) : 0.0;
  out.estimate.ess = paths / (1.0 + out.estimate.cv * out.estimate.cv);

  if (unobs.empty()) {
    out.cloud = ParticleCloud::point(Vector(0));
  } else {
    out.cloud.particles = std::move(endpoints);
    out.cloud.weights.resize(paths);
    for (int j = 0; j < paths; ++j) out.cloud.weights[j] = scaled[j] / total;
  }
  return out;
}

double LikelihoodResult::cv_sum() const {
  double s = 0.0;
  for (const auto& t : transitions) s += t.cv;
  return s;
}

LikelihoodResult log_likelihood(const SdeModel& model, const ParamVector& theta,
                                std::span<const Dataset> datasets,
                                const PenaltyConfig& config,
                                std::uint64_t seed) {
  config.validate();
  if (theta.size() != model.parameter_count()) {
    throw DomainError("log_likelihood: wrong parameter count");
  }
  LikelihoodResult out;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const Dataset& data = datasets[d];
    ParticleCloud cloud = ParticleCloud::point(select(data.x0, model.unobserved()));
    Vector observed_start = select(data.x0, model.observed());
    double start = data.t0;
    for (std::size_t i = 0; i < data.records.size(); ++i) {
      const Observation& rec = data.records[i];
      const GridInterval interval{start, rec.time, config.substeps};
      TransitionResult step = transition_estimate(
          model, theta, cloud, observed_start, rec.values, interval,
          config.sampler, config.paths, {seed, d, i});
      out.log_likelihood += step.estimate.log_phat;
      out.transitions.push_back({d, i, step.estimate.log_phat,
                                 step.estimate.cv, step.estimate.ess});
      cloud = std::move(step.cloud);
      observed_start = rec.values;
      start = rec.time;
    }
  }
  return out;
}

double penalized_log_likelihood(const SdeModel& model,
                                const ParamVector& theta, double rho,
                                std::span<const Dataset> datasets,
                                const PenaltyConfig& config,
                                std::uint64_t seed) {
  PenaltyConfig at_rho = config;
  at_rho.sampler.rho = rho;
  const LikelihoodResult r = log_likelihood(model, theta, datasets, at_rho, seed);
  if (config.lambda == 0.0) return r.log_likelihood;
  return r.log_likelihood - config.lambda * r.cv_sum();
}

double effective_sample_size(std::span<const double> cvs, int paths) {
  if (paths < 1) throw DomainError("effective_sample_size: J must be >= 1");
  if (cvs.empty()) return paths;
  double sq = 0.0;
  for (double cv : cvs) {
    if (!(cv >= 0.0)) throw DomainError("effective_sample_size: negative cv");
    sq += cv * cv;
  }
  return paths / (1.0 + sq / static_cast<double>(cvs.size()));
}

nlohmann::json diagnostics_json(const LikelihoodResult& result) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : result.transitions) {
    out.push_back({{"i", t.index},
                   {"dataset", t.dataset},
                   {"log_phat", t.log_phat},
                   {"cv", t.cv},
                   {"ess", t.ess}});
  }
  return out;
}

}  // namespace psml
