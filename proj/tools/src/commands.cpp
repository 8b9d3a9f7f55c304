#include "psml_app/commands.hpp"

#include "psml_app/presets.hpp"
#include "psml_app/study.hpp"

#include <psml/io.hpp>
#include <psml/sde.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

namespace psml::app {

using nlohmann::json;

namespace {

struct ModelFlags {
  std::string model;
  std::string additions;
  double mortality = 0.15;

  void add(CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--model", model, "ou | lorenz63 | cwd-direct");
    if (required) opt->required();
    cmd->add_option("--additions", additions, "CSV 'year,a' of annual additions (cwd-direct)");
    cmd->add_option("--mortality", mortality, "natural mortality m (cwd-direct)");
  }
  std::shared_ptr<const SdeModel> build() const { return build_model(model, additions, mortality); }
};

struct SimulateArgs {
  ModelFlags model;
  std::vector<double> theta;
  std::vector<double> x0;
  int observations = 0;
  double spacing = 0.0;
  double t0 = 0.0;
  bool t0_set = false;
  int substeps = 0;
  int epidemics = 1;
  std::uint64_t seed = 1;
  std::string out;
};

struct EstimateArgs {
  ModelFlags model;
  std::vector<std::string> datasets;
  std::string sampler = "aux-mbb";
  std::string rho = "est";
  double rho_init = -1.0;
  std::string lambda = "tune";
  int paths = 0;
  int substeps = 0;
  std::vector<double> init;
  std::uint64_t seed = 1;
  int threads = 1;
  int simulations = 0;
  double eps0 = -1.0;
  double delta_eps = -1.0;
  std::string out;
  std::string trace;
};

struct StudyArgs {
  std::string config;
  int threads = 1;
  std::string out;
};

struct BootstrapArgs {
  ModelFlags model;
  std::string fit;
  std::vector<std::string> datasets;
  int replicates = 200;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;
};

struct R0Args {
  std::string bootstrap;
  double mortality = 0.15;
  std::vector<double> n0 = {10, 20, 30, 40, 50};
  double alpha = -1.0;
  std::string out;
};

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    save_text(path, text);
  }
}

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

std::vector<Dataset> load_all(const std::vector<std::string>& paths, const SdeModel& model) {
  if (paths.empty()) throw ConfigError("no dataset files given");
  std::vector<Dataset> out;
  for (const auto& p : paths) out.push_back(load_dataset(p, model));
  return out;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const auto model = a.model.build();
  ModelPreset preset = model_preset(a.model.model, a.epidemics);
  const ParamVector theta = model->params(a.theta.empty() ? preset.theta0 : a.theta);
  if (!theta.admissible()) throw ConfigError("simulate: theta is not admissible");
  if (!a.x0.empty()) {
    if (preset.datasets.size() != 1) throw ConfigError("simulate: --x0 needs a single-dataset design");
    preset.datasets.front().x0 = a.x0;
  }
  for (auto& d : preset.datasets) {
    if (a.observations > 0) d.observations = a.observations;
    if (a.spacing > 0.0) d.spacing = a.spacing;
    if (a.t0_set) d.t0 = a.t0;
  }
  const int substeps = a.substeps > 0 ? a.substeps : preset.data_substeps;

  const std::filesystem::path base(a.out);
  for (std::size_t d = 0; d < preset.datasets.size(); ++d) {
    const DatasetDesign& design = preset.datasets[d];
    RandomStream rng(a.seed, StreamTag::kSimulate, {d});
    const Dataset data = simulate_dataset(*model, theta, to_vector(design.x0),
                                          TimeGrid(design.t0, design.times(), substeps), rng);
    std::filesystem::path path = base;
    if (preset.datasets.size() > 1) {
      path.replace_filename(base.stem().string() + "_" + std::to_string(d + 1) +
                            base.extension().string());
    }
    save_dataset(path, *model, data);
    out << path.string() << '\n';
  }
  return kOk;
}

PenaltyConfig penalty_from(const EstimateArgs& a, const ModelPreset& preset) {
  PenaltyConfig c;
  c.paths = a.paths > 0 ? a.paths : preset.paths;
  c.substeps = a.substeps > 0 ? a.substeps : preset.substeps;
  c.sampler.kind = parse_sampler_kind(a.sampler);
  const double rho_default = c.sampler.kind == SamplerKind::kRegularized ? 0.5 : 0.9;
  if (a.rho == "est") {
    c.estimate_rho = c.sampler.uses_rho();
    c.sampler.rho = a.rho_init >= 0.0 ? a.rho_init : rho_default;
  } else {
    try {
      c.sampler.rho = std::stod(a.rho);
    } catch (const std::exception&) {
      throw ConfigError("--rho must be a number or 'est'");
    }
  }
  if (a.lambda != "tune") {
    try {
      c.lambda = std::stod(a.lambda);
    } catch (const std::exception&) {
      throw ConfigError("--lambda must be a number or 'tune'");
    }
  }
  c.validate();
  return c;
}

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  const auto model = a.model.build();
  const ModelPreset preset = model_preset(a.model.model);
  const std::vector<Dataset> data = load_all(a.datasets, *model);
  const PenaltyConfig penalty = penalty_from(a, preset);
  const ParamVector init = model->params(a.init.empty() ? preset.init : a.init);
  if (!init.admissible()) throw ConfigError("--init is not admissible");

  std::ofstream trace_file;
  TraceSink trace;
  if (!a.trace.empty()) {
    trace_file.open(a.trace);
    if (!trace_file) throw ConfigError("cannot write trace '" + a.trace + "'");
    trace = [&](int eval, std::span<const double> x, double value) {
      json line = {{"eval", eval},
                   {"x", std::vector<double>(x.begin(), x.end())},
                   {"value", std::isfinite(value) ? json(value) : json(nullptr)}};
      trace_file << line.dump() << '\n';
    };
  }

  json result;
  if (a.lambda == "tune") {
    TuneConfig tune = preset.tune;
    if (a.simulations > 0) tune.simulations = a.simulations;
    if (a.eps0 > 0.0) tune.eps0 = a.eps0;
    if (a.delta_eps > 0.0) tune.delta_eps = a.delta_eps;
    const TuneResult tuned = tune_lambda(
        [&](double lambda) {
          PenaltyConfig c = penalty;
          c.lambda = lambda;
          LambdaEvaluation ev;
          ev.fit = maximize_psml(*model, data, c, init, {}, a.seed, trace);
          ev.eps = prediction_error(*model, ev.fit.theta, data, c.substeps,
                                    tune.simulations, a.seed, a.threads);
          return ev;
        },
        tune);
    result = fit_json(*model, tuned.fit, penalty.sampler, penalty.paths, penalty.substeps);
    result["tune"] = tune_json(*model, tuned, tune);
  } else {
    const PsmlFit fit = maximize_psml(*model, data, penalty, init, {}, a.seed, trace);
    result = fit_json(*model, fit, penalty.sampler, penalty.paths, penalty.substeps);
  }
  result["seed"] = a.seed;
  result["datasets"] = a.datasets;
  if (model->name() == "cwd-direct") result["mortality"] = a.model.mortality;
  if (!a.model.additions.empty()) result["additions"] = a.model.additions;
  emit(a.out, result.dump(2) + "\n", out);
  return kOk;
}

int cmd_study(const StudyArgs& a, std::ostream& out) {
  const StudyConfig config = StudyConfig::from_json(load_json(a.config));
  const StudyReport report = run_study(config, a.threads);
  const std::string json_text = report_json(report).dump(2) + "\n";
  if (a.out.empty()) {
    out << json_text;
    return kOk;
  }
  std::filesystem::path stem(a.out);
  if (stem.extension() == ".json") stem.replace_extension();
  save_text(stem.string() + ".json", json_text);
  save_text(stem.string() + ".csv", report_csv(report));
  save_text(stem.string() + ".timing.csv", timing_csv(report));
  out << stem.string() << ".json\n";
  return kOk;
}

int cmd_bootstrap(BootstrapArgs a, std::ostream& out) {
  const json fit_doc = load_json(a.fit);
  if (a.model.model.empty()) a.model.model = fit_doc.at("model").get<std::string>();
  if (a.model.additions.empty()) a.model.additions = fit_doc.value("additions", std::string());
  if (fit_doc.contains("mortality")) a.model.mortality = fit_doc.at("mortality").get<double>();
  if (a.datasets.empty()) a.datasets = fit_doc.value("datasets", std::vector<std::string>());
  const auto model = a.model.build();
  const PsmlFit fit = fit_from_json(*model, fit_doc);

  PenaltyConfig estimation;
  try {
    estimation.sampler = fit_doc.at("sampler").get<SamplerSpec>();
    estimation.paths = fit_doc.at("paths").get<int>();
    estimation.substeps = fit_doc.at("substeps").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("fit JSON: ") + e.what());
  }
  estimation.lambda = fit.lambda;
  estimation.estimate_rho = fit.rho_estimated;

  const std::vector<Dataset> templates = load_all(a.datasets, *model);
  const BootstrapResult result = parametric_bootstrap(
      *model, fit, templates, estimation, {}, a.replicates, a.alpha, a.seed, a.threads);
  json doc = bootstrap_json(*model, result);
  doc["theta"] = fit.theta.to_vector();
  doc["rho"] = fit.rho;
  doc["lambda"] = fit.lambda;
  doc["seed"] = a.seed;
  doc["replicates_requested"] = a.replicates;
  emit(a.out, doc.dump(2) + "\n", out);
  return kOk;
}

int cmd_r0(const R0Args& a, std::ostream& out) {
  const json doc = load_json(a.bootstrap);
  std::vector<std::vector<double>> reps;
  std::vector<double> theta;
  double alpha = a.alpha;
  try {
    if (doc.at("model").get<std::string>() != "cwd-direct") {
      throw ConfigError("r0 needs a cwd-direct bootstrap result");
    }
    reps = doc.at("replicates").get<std::vector<std::vector<double>>>();
    theta = doc.at("theta").get<std::vector<double>>();
    if (alpha < 0.0) alpha = doc.value("alpha", 0.05);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bootstrap JSON: ") + e.what());
  }
  if (reps.empty()) throw ConfigError("bootstrap JSON has no replicates");
  std::vector<double> beta;
  std::vector<double> mu;
  for (const auto& r : reps) {
    beta.push_back(r.at(0));
    mu.push_back(r.at(1));
  }
  const R0Interval iv = r0_interval(theta.at(0), theta.at(1), a.mortality, beta, mu, alpha);
  std::ostringstream csv;
  csv << "n0,r0,lower,upper\n";
  for (double n0 : a.n0) {
    csv << format_double(n0) << ',' << format_double(iv.coefficient * n0) << ','
        << format_double(iv.lower * n0) << ',' << format_double(iv.upper * n0) << '\n';
  }
  emit(a.out, csv.str(), out);
  if (!a.out.empty()) {
    out << "coefficient " << format_double(iv.coefficient) << " ["
        << format_double(iv.lower) << ", " << format_double(iv.upper) << "]\n";
    if (iv.lower > 0.0) {
      out << "R0 > 1 for N0 >= " << r0_threshold_population(iv.lower) << '\n';
    }
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Penalized simulated maximum likelihood for SDEs", "psml"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "simulate a dataset (CSV + sidecar JSON)");
  sim.model.add(simulate, true);
  simulate->add_option("--theta", sim.theta, "generating parameters")->delimiter(',');
  simulate->add_option("--x0", sim.x0, "initial state")->delimiter(',');
  simulate->add_option("-n,--observations", sim.observations, "observations per dataset");
  simulate->add_option("--spacing", sim.spacing, "time between observations");
  auto* t0 = simulate->add_option("--t0", sim.t0, "start time");
  simulate->add_option("-M,--substeps", sim.substeps, "Euler substeps per interval");
  simulate->add_option("--epidemics", sim.epidemics, "cwd-direct design: 1 or 2 datasets");
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--out", sim.out, "output CSV path")->required();

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "fit a model to one or more datasets");
  est.model.add(estimate, true);
  estimate->add_option("datasets", est.datasets, "dataset CSV files")->required();
  estimate->add_option("--sampler", est.sampler, "pedersen | mbb | regularized | aux-mbb")
      ->check(CLI::IsMember({"pedersen", "mbb", "regularized", "aux-mbb"}));
  estimate->add_option("--rho", est.rho, "sampler rho, or 'est'");
  estimate->add_option("--rho-init", est.rho_init, "starting rho when estimated");
  estimate->add_option("--lambda", est.lambda, "penalty weight, or 'tune'");
  estimate->add_option("-J,--paths", est.paths, "importance paths per transition");
  estimate->add_option("-M,--substeps", est.substeps, "Euler substeps per interval");
  estimate->add_option("--init", est.init, "initial parameters")->delimiter(',');
  estimate->add_option("--seed", est.seed, "evaluation seed");
  estimate->add_option("--threads", est.threads, "worker threads");
  estimate->add_option("-L,--simulations", est.simulations, "prediction-error replicates");
  estimate->add_option("--eps0", est.eps0, "prediction-error target");
  estimate->add_option("--delta-eps", est.delta_eps, "minimum prediction-error improvement");
  estimate->add_option("--out", est.out, "fit JSON path (default stdout)");
  estimate->add_option("--trace", est.trace, "optimizer trace (JSON lines)");

  StudyArgs st;
  auto* study = app.add_subcommand("study", "run a simulation study");
  study->add_option("config", st.config, "study config JSON")->required();
  study->add_option("--threads", st.threads, "worker threads");
  study->add_option("--out", st.out, "output stem: writes .json, .csv, .timing.csv");

  BootstrapArgs bs;
  auto* bootstrap = app.add_subcommand("bootstrap", "parametric bootstrap intervals for a fit");
  bs.model.add(bootstrap, false);
  bootstrap->add_option("--fit", bs.fit, "fit JSON from 'estimate'")->required();
  bootstrap->add_option("datasets", bs.datasets, "template datasets (default: those of the fit)");
  bootstrap->add_option("-B,--replicates", bs.replicates, "bootstrap replicates");
  bootstrap->add_option("--alpha", bs.alpha, "1 - confidence level");
  bootstrap->add_option("--seed", bs.seed, "random seed");
  bootstrap->add_option("--threads", bs.threads, "worker threads");
  bootstrap->add_option("--out", bs.out, "result JSON path (default stdout)");

  R0Args r0;
  auto* r0cmd = app.add_subcommand("r0", "basic reproductive number from a bootstrap result");
  r0cmd->add_option("--bootstrap", r0.bootstrap, "bootstrap JSON (cwd-direct)")->required();
  r0cmd->add_option("--mortality", r0.mortality, "natural mortality m");
  r0cmd->add_option("--n0", r0.n0, "population sizes")->delimiter(',');
  r0cmd->add_option("--alpha", r0.alpha, "1 - confidence level");
  r0cmd->add_option("--out", r0.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  sim.t0_set = t0->count() > 0;

  try {
    if (*simulate) return cmd_simulate(sim, out);
    if (*estimate) return cmd_estimate(est, out);
    if (*study) return cmd_study(st, out);
    if (*bootstrap) return cmd_bootstrap(bs, out);
    if (*r0cmd) return cmd_r0(r0, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const TransitionFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kConfigError;
}

}  // namespace psml::app
