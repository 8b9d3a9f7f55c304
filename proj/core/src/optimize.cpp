#include "psml/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace psml {

void OptimizerConfig::validate(std::size_t dimension) const {
  if (!(tolerance > 0.0)) throw ConfigError("optimizer tolerance must be > 0");
  if (max_evaluations < static_cast<int>(dimension) + 2) {
    throw ConfigError("optimizer max-evaluations must be >= p + 2");
  }
  if (!(initial_step > 0.0)) throw ConfigError("initial simplex step must be > 0");
}

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;
constexpr double kBoundaryNudge = 1e-8;

using Point = std::vector<double>;

Point affine(const Point& base, const Point& toward, double scale) {
  Point out(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    out[i] = base[i] + scale * (toward[i] - base[i]);
  }
  return out;
}

}  // namespace

OptResult nelder_mead(const Objective& objective, std::vector<double> x0,
                      const OptimizerConfig& config, const TraceSink& trace) {
  const std::size_t d = x0.size();
  config.validate(d);
  if (d == 0) throw DomainError("nelder_mead: empty parameter vector");

  int evaluations = 0;
  // Internally minimize the negated objective; -inf and NaN become +inf.
  auto cost = [&](const Point& x) {
    const double v = objective(x);
    ++evaluations;
    if (trace) trace(evaluations, x, v);
    return std::isnan(v) || v == -std::numeric_limits<double>::infinity()
               ? std::numeric_limits<double>::infinity()
               : -v;
  };

  std::vector<Point> simplex;
  std::vector<double> costs;
  simplex.reserve(d + 1);
  simplex.push_back(x0);
  costs.push_back(cost(x0));
  if (!std::isfinite(costs[0])) {
    throw DomainError("nelder_mead: objective is not finite at x0");
  }
  for (std::size_t i = 0; i < d; ++i) {
    Point v = x0;
    v[i] += config.initial_step;
    simplex.push_back(v);
    costs.push_back(cost(v));
  }

  std::vector<std::size_t> order(d + 1);
  bool converged = false;
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
    {
      std::vector<Point> s2;
      std::vector<double> c2;
      for (std::size_t i : order) {
        s2.push_back(std::move(simplex[i]));
        c2.push_back(costs[i]);
      }
      simplex = std::move(s2);
      costs = std::move(c2);
    }
    if (std::abs(costs[d] - costs[0]) <= config.tolerance) {
      converged = true;
      break;
    }
    if (evaluations >= config.max_evaluations) break;

    Point centroid(d, 0.0);
    for (std::size_t v = 0; v < d; ++v) {
      for (std::size_t i = 0; i < d; ++i) centroid[i] += simplex[v][i];
    }
    for (double& c : centroid) c /= static_cast<double>(d);

    const Point& worst = simplex[d];
    const Point reflected = affine(centroid, worst, -kReflect);
    const double fr = cost(reflected);

    if (fr < costs[0]) {
      if (evaluations >= config.max_evaluations) {
        simplex[d] = reflected;
        costs[d] = fr;
        continue;
      }
      const Point expanded = affine(centroid, reflected, kExpand);
      const double fe = cost(expanded);
      if (fe < fr) {
        simplex[d] = expanded;
        costs[d] = fe;
      } else {
        simplex[d] = reflected;
        costs[d] = fr;
      }
      continue;
    }
    if (fr < costs[d - 1]) {
      simplex[d] = reflected;
      costs[d] = fr;
      continue;
    }
    if (evaluations >= config.max_evaluations) {
      if (fr < costs[d]) {
        simplex[d] = reflected;
        costs[d] = fr;
      }
      continue;
    }

    bool accepted = false;
    if (fr < costs[d]) {
      const Point outside = affine(centroid, reflected, kContract);
      const double fc = cost(outside);
      if (fc <= fr) {
        simplex[d] = outside;
        costs[d] = fc;
        accepted = true;
      }
    } else {
      const Point inside = affine(centroid, worst, kContract);
      const double fc = cost(inside);
      if (fc < costs[d]) {
        simplex[d] = inside;
        costs[d] = fc;
        accepted = true;
      }
    }
    if (accepted) continue;

    for (std::size_t v = 1; v <= d; ++v) {
      if (evaluations >= config.max_evaluations) break;
      simplex[v] = affine(simplex[0], simplex[v], kShrink);
      costs[v] = cost(simplex[v]);
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(costs.begin(), costs.end()) - costs.begin());
  OptResult out;
  out.x = simplex[best];
  out.value = -costs[best];
  out.evaluations = evaluations;
  out.converged = converged;
  return out;
}

double to_unconstrained(double value, Constraint c, bool* nudged) {
  auto flag = [&] {
    if (nudged) *nudged = true;
  };
  switch (c) {
    case Constraint::kFree:
      return value;
    case Constraint::kPositive:
      if (value < 0.0) throw DomainError("negative value for a positive parameter");
      if (value == 0.0) {
        flag();
        value = kBoundaryNudge;
      }
      return std::log(value);
    case Constraint::kUnitInterval:
      if (value < 0.0 || value > 1.0) {
        throw DomainError("value outside [0, 1] for a unit-interval parameter");
      }
      if (value == 0.0) {
        flag();
        value = kBoundaryNudge;
      } else if (value == 1.0) {
        flag();
        value = 1.0 - kBoundaryNudge;
      }
      return std::log(value) - std::log1p(-value);
  }
  return value;
}

double from_unconstrained(double z, Constraint c) {
  switch (c) {
    case Constraint::kFree:
      return z;
    case Constraint::kPositive:
      return std::exp(z);
    case Constraint::kUnitInterval:
      return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                      : std::exp(z) / (1.0 + std::exp(z));
  }
  return z;
}

std::vector<double> transform(const ParamVector& theta, bool* nudged) {
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    out[i] = to_unconstrained(theta[i], theta.constraints()[i], nudged);
  }
  return out;
}

ParamVector untransform(std::span<const double> z,
                        std::span<const Constraint> constraints) {
  if (z.size() != constraints.size()) {
    throw DomainError("untransform: one constraint per coordinate required");
  }
  std::vector<double> values(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    values[i] = from_unconstrained(z[i], constraints[i]);
  }
  return ParamVector(std::move(values),
                     std::vector<Constraint>(constraints.begin(), constraints.end()));
}

PsmlFit maximize_psml(const SdeModel& model, std::span<const Dataset> datasets,
                      const PenaltyConfig& config, const ParamVector& theta_init,
                      const OptimizerConfig& optimizer, std::uint64_t seed,
                      const TraceSink& trace) {
  config.validate();
  if (theta_init.size() != model.parameter_count() || !theta_init.admissible()) {
    throw DomainError("maximize_psml: initial parameters are not admissible");
  }
  const auto started = std::chrono::steady_clock::now();
  const std::size_t p = model.parameter_count();
  const std::vector<Constraint> constraints = model.constraints();
  const bool free_rho = config.estimate_rho && config.sampler.uses_rho();

  std::vector<double> x0 = transform(model.params(
      std::vector<double>(theta_init.values().begin(), theta_init.values().end())));
  if (free_rho) {
    x0.push_back(to_unconstrained(config.sampler.rho, Constraint::kUnitInterval));
  }

  auto unpack = [&](std::span<const double> z, double& rho) {
    rho = free_rho ? from_unconstrained(z[p], Constraint::kUnitInterval)
                   : config.sampler.rho;
    return untransform(z.first(p), constraints);
  };

  auto objective = [&](std::span<const double> z) {
    double rho = 0.0;
    const ParamVector theta = unpack(z, rho);
    if (config.sampler.kind == SamplerKind::kAuxMbb && !(rho > 0.0)) {
      return -std::numeric_limits<double>::infinity();
    }
    try {
      return penalized_log_likelihood(model, theta, rho, datasets, config, seed);
    } catch (const NumericalError&) {
      return -std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  if (!std::isfinite(objective(x0))) {
    throw DomainError("maximize_psml: objective is -inf at the initial values");
  }
  const OptResult opt = nelder_mead(objective, x0, optimizer, trace);

  PsmlFit fit;
  fit.theta = unpack(opt.x, fit.rho);
  fit.rho_estimated = free_rho;
  fit.lambda = config.lambda;
  fit.objective = opt.value;
  fit.evaluations = opt.evaluations;
  fit.converged = opt.converged;

  PenaltyConfig at_fit = config;
  at_fit.sampler.rho = fit.rho;
  const LikelihoodResult ll = log_likelihood(model, fit.theta, datasets, at_fit, seed);
  fit.log_likelihood = ll.log_likelihood;
  fit.cv_sum = ll.cv_sum();
  fit.transitions = ll.transitions;
  fit.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              started)
                    .count();
  return fit;
}

}  // namespace psml
