#include "psml/tune.hpp"

#include "psml/parallel.hpp"
#include "psml/sde.hpp"
#include "psml/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace psml {

void TuneConfig::validate() const {
  if (!(lambda0 > 0.0)) throw ConfigError("tune: lambda0 must be > 0");
  if (!(eps0 > 0.0)) throw ConfigError("tune: eps0 must be > 0");
  if (!(delta_lambda > 0.0)) throw ConfigError("tune: delta-lambda must be > 0");
  if (!(delta_eps > 0.0)) throw ConfigError("tune: delta-eps must be > 0");
  if (simulations < 1) throw ConfigError("tune: L must be >= 1");
  if (max_fits < 1) throw ConfigError("tune: fit budget must be >= 1");
}

TuneConfig TuneConfig::preset(const std::string& model) {
  TuneConfig c;
  if (model == "ou") {
    c.eps0 = 0.04;
    c.delta_eps = 0.001;
  } else if (model == "lorenz63") {
    c.eps0 = 3.5;
    c.delta_eps = 0.1;
  } else if (model == "cwd-direct") {
    c.eps0 = 5.0;
    c.delta_eps = 0.5;
  } else {
    throw ConfigError("no tuning preset for model '" + model + "'");
  }
  return c;
}

double prediction_error(const SdeModel& model, const ParamVector& theta,
                        std::span<const Dataset> datasets, int substeps,
                        int simulations, std::uint64_t seed, int threads) {
  if (simulations < 1) throw ConfigError("prediction error needs L >= 1");
  if (substeps < 1) throw ConfigError("prediction error needs M >= 1");
  std::size_t records = 0;
  for (const auto& d : datasets) records += d.records.size();
  if (records == 0) throw DomainError("prediction error needs observations");

  std::vector<double> totals(static_cast<std::size_t>(simulations), 0.0);
  parallel_for(totals.size(), threads, [&](std::size_t l) {
    double sum = 0.0;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      const Dataset& data = datasets[d];
      RandomStream rng(seed, StreamTag::kPrediction, {d, l});
      const auto sims =
          simulate_observations(model, theta, data.x0, data.grid(substeps), rng);
      for (std::size_t i = 0; i < sims.size(); ++i) {
        sum += (sims[i] - data.records[i].values).norm();
      }
    }
    totals[l] = sum;
  });
  double sum = 0.0;
  for (double t : totals) sum += t;
  return sum / (static_cast<double>(records) * simulations);
}

TuneResult tune_lambda(const LambdaEvaluator& evaluate, const TuneConfig& config) {
  config.validate();
  TuneResult out;
  int fits = 0;
  auto probe = [&](double lambda) {
    ++fits;
    LambdaEvaluation ev = evaluate(lambda);
    out.trace.push_back({lambda, ev.eps, false});
    return ev;
  };
  auto improves = [&](double current, double candidate) {
    return current - candidate > config.delta_eps;
  };

  double lambda = config.lambda0;
  LambdaEvaluation current = probe(lambda);
  out.trace.back().accepted = true;

  bool moved_down = false;
  if (!(current.eps < config.eps0)) {
    while (lambda > 0.0 && fits < config.max_fits) {
      const double candidate = std::max(lambda - config.delta_lambda, 0.0);
      LambdaEvaluation next = probe(candidate);
      if (!improves(current.eps, next.eps)) break;
      lambda = candidate;
      current = std::move(next);
      out.trace.back().accepted = true;
      moved_down = true;
      if (current.eps < config.eps0) break;
    }
    if (!moved_down) {
      while (!(current.eps < config.eps0) && fits < config.max_fits) {
        const double candidate = lambda + config.delta_lambda;
        LambdaEvaluation next = probe(candidate);
        if (!improves(current.eps, next.eps)) break;
        lambda = candidate;
        current = std::move(next);
        out.trace.back().accepted = true;
      }
    }
  }

  out.lambda = lambda;
  out.eps = current.eps;
  out.fit = std::move(current.fit);
  return out;
}

TuneResult tune_lambda(const SdeModel& model, std::span<const Dataset> datasets,
                       const TuneConfig& config, const PenaltyConfig& base,
                       const ParamVector& theta_init,
                       const OptimizerConfig& optimizer, std::uint64_t seed) {
  auto evaluate = [&](double lambda) {
    PenaltyConfig penalty = base;
    penalty.lambda = lambda;
    LambdaEvaluation ev;
    ev.fit = maximize_psml(model, datasets, penalty, theta_init, optimizer, seed);
    try {
      ev.eps = prediction_error(model, ev.fit.theta, datasets, base.substeps,
                                config.simulations, seed);
    } catch (const DomainError&) {
      ev.eps = std::numeric_limits<double>::infinity();
    } catch (const NumericalError&) {
      ev.eps = std::numeric_limits<double>::infinity();
    }
    return ev;
  };
  return tune_lambda(evaluate, config);
}

std::vector<ParameterInterval> quantile_intervals(
    const std::vector<std::string>& names, const std::vector<double>& estimate,
    const std::vector<std::vector<double>>& replicates, double alpha) {
  if (names.size() != estimate.size()) {
    throw DomainError("quantile_intervals: one name per estimate required");
  }
  if (replicates.empty()) throw DomainError("quantile_intervals: no replicates");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
  std::vector<ParameterInterval> out;
  for (std::size_t j = 0; j < names.size(); ++j) {
    std::vector<double> column;
    column.reserve(replicates.size());
    for (const auto& r : replicates) column.push_back(r.at(j));
    out.push_back({names[j], estimate[j], quantile(column, alpha / 2.0),
                   quantile(column, 1.0 - alpha / 2.0)});
  }
  return out;
}

BootstrapResult parametric_bootstrap(const SdeModel& model, const PsmlFit& fit,
                                     std::span<const Dataset> templates,
                                     const PenaltyConfig& estimation,
                                     const OptimizerConfig& optimizer,
                                     int replicates, double alpha,
                                     std::uint64_t seed, int threads) {
  if (replicates < 1) throw ConfigError("bootstrap: B must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("bootstrap: alpha must be in (0, 1)");
  if (templates.empty()) throw ConfigError("bootstrap: no template datasets");
  estimation.validate();

  PenaltyConfig config = estimation;
  config.sampler.rho = fit.rho;
  const bool with_rho = config.estimate_rho && config.sampler.uses_rho();

  const auto b_count = static_cast<std::size_t>(replicates);
  std::vector<std::vector<double>> estimates(b_count);
  std::vector<double> rhos(b_count, 0.0);
  std::vector<char> ok(b_count, 0);
  parallel_for(b_count, threads, [&](std::size_t b) {
    try {
      std::vector<Dataset> sims;
      sims.reserve(templates.size());
      for (std::size_t d = 0; d < templates.size(); ++d) {
        RandomStream rng(seed, StreamTag::kBootstrap, {b, d});
        sims.push_back(simulate_dataset(model, fit.theta, templates[d].x0,
                                        templates[d].grid(config.substeps), rng));
      }
      const std::uint64_t fit_seed =
          stream_key({seed, static_cast<std::uint64_t>(StreamTag::kBootstrap), b});
      const PsmlFit r = maximize_psml(model, sims, config, fit.theta, optimizer, fit_seed);
      estimates[b].assign(r.theta.values().begin(), r.theta.values().end());
      rhos[b] = r.rho;
      ok[b] = 1;
    } catch (const NumericalError&) {
    } catch (const DomainError&) {
    }
  });

  BootstrapResult out;
  out.alpha = alpha;
  for (std::size_t b = 0; b < b_count; ++b) {
    if (!ok[b]) {
      ++out.failures;
      continue;
    }
    out.replicates.push_back(estimates[b]);
    out.rho_replicates.push_back(rhos[b]);
  }
  if (out.failures * 10 > replicates) {
    throw NumericalError("bootstrap: " + std::to_string(out.failures) + " of " +
                         std::to_string(replicates) + " replicate fits failed");
  }

  std::vector<std::string> names;
  for (const auto& p : model.parameters()) names.push_back(p.name);
  std::vector<double> estimate(fit.theta.values().begin(), fit.theta.values().end());
  std::vector<std::vector<double>> rows = out.replicates;
  if (with_rho) {
    names.push_back("rho");
    estimate.push_back(fit.rho);
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r].push_back(out.rho_replicates[r]);
  }
  out.intervals = quantile_intervals(names, estimate, rows, alpha);
  return out;
}

}  // namespace psml
