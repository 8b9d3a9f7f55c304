#include "psml_app/study.hpp"

#include <psml/io.hpp>
#include <psml/parallel.hpp>
#include <psml/sde.hpp>
#include <psml/stats.hpp>

#include <chrono>
#include <cmath>
#include <sstream>

namespace psml::app {

using nlohmann::json;

namespace {

MethodSpec method_from_json(const json& j, const ModelPreset& preset) {
  MethodSpec m;
  const std::string kind = j.at("sampler").get<std::string>();
  m.name = j.value("name", kind);
  if (kind == "exact-mle") {
    m.exact_mle = true;
    return m;
  }
  m.sampler.kind = parse_sampler_kind(kind);
  m.paths = j.value("J", preset.paths);
  m.substeps = j.value("M", preset.substeps);

  const json lambda = j.value("lambda", json(0.0));
  if (lambda.is_string()) {
    if (lambda.get<std::string>() != "tune") {
      throw ConfigError("method '" + m.name + "': lambda must be a number or \"tune\"");
    }
    m.tune_lambda = true;
  } else {
    m.lambda = lambda.get<double>();
  }

  const double rho_default =
      m.sampler.kind == SamplerKind::kRegularized ? 0.5 : (m.sampler.kind == SamplerKind::kAuxMbb ? 0.9 : 1.0);
  const json rho = j.value("rho", json(rho_default));
  if (rho.is_string()) {
    if (rho.get<std::string>() != "est") {
      throw ConfigError("method '" + m.name + "': rho must be a number or \"est\"");
    }
    m.estimate_rho = true;
    m.sampler.rho = j.value("rho_init", rho_default);
  } else {
    m.sampler.rho = rho.get<double>();
  }
  return m;
}

json method_to_json(const MethodSpec& m) {
  json j;
  j["name"] = m.name;
  if (m.exact_mle) {
    j["sampler"] = "exact-mle";
    return j;
  }
  j["sampler"] = to_string(m.sampler.kind);
  j["J"] = m.paths;
  j["M"] = m.substeps;
  j["lambda"] = m.tune_lambda ? json("tune") : json(m.lambda);
  if (m.estimate_rho) {
    j["rho"] = "est";
    j["rho_init"] = m.sampler.rho;
  } else {
    j["rho"] = m.sampler.rho;
  }
  return j;
}

}  // namespace

StudyConfig StudyConfig::from_json(const json& j) {
  try {
    StudyConfig c;
    c.model = j.at("model").get<std::string>();
    const ModelPreset preset = model_preset(c.model, j.value("epidemics", 2));
    c.theta0 = j.value("theta0", preset.theta0);
    c.init = j.value("init", preset.init);
    c.data_substeps = j.value("data_substeps", preset.data_substeps);
    c.replicates = j.value("replicates", 1);
    c.seed = j.value("seed", std::uint64_t{1});
    c.report_scale = j.value("report_scale", preset.report_scale);
    c.additions_csv = j.value("additions", std::string());
    c.mortality = j.value("mortality", 0.15);
    if (j.contains("datasets")) {
      for (const auto& d : j.at("datasets")) {
        DatasetDesign design;
        design.t0 = d.value("t0", 0.0);
        design.x0 = d.at("x0").get<std::vector<double>>();
        design.observations = d.at("observations").get<int>();
        design.spacing = d.value("spacing", 1.0);
        c.datasets.push_back(design);
      }
    } else {
      c.datasets = preset.datasets;
    }
    c.tune = preset.tune;
    if (j.contains("tune")) {
      const json& t = j.at("tune");
      c.tune.lambda0 = t.value("lambda0", c.tune.lambda0);
      c.tune.eps0 = t.value("eps0", c.tune.eps0);
      c.tune.delta_lambda = t.value("delta_lambda", c.tune.delta_lambda);
      c.tune.delta_eps = t.value("delta_eps", c.tune.delta_eps);
      c.tune.simulations = t.value("simulations", c.tune.simulations);
      c.tune.max_fits = t.value("max_fits", c.tune.max_fits);
    }
    for (const auto& m : j.at("methods")) c.methods.push_back(method_from_json(m, preset));
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("study config: ") + e.what());
  }
}

json StudyConfig::to_json() const {
  json j;
  j["model"] = model;
  j["theta0"] = theta0;
  j["init"] = init;
  j["data_substeps"] = data_substeps;
  j["replicates"] = replicates;
  j["seed"] = seed;
  j["report_scale"] = report_scale;
  j["mortality"] = mortality;
  if (!additions_csv.empty()) j["additions"] = additions_csv;
  json ds = json::array();
  for (const auto& d : datasets) {
    ds.push_back({{"t0", d.t0},
                  {"x0", d.x0},
                  {"observations", d.observations},
                  {"spacing", d.spacing}});
  }
  j["datasets"] = ds;
  j["tune"] = {{"lambda0", tune.lambda0},
               {"eps0", tune.eps0},
               {"delta_lambda", tune.delta_lambda},
               {"delta_eps", tune.delta_eps},
               {"simulations", tune.simulations},
               {"max_fits", tune.max_fits}};
  json ms = json::array();
  for (const auto& m : methods) ms.push_back(method_to_json(m));
  j["methods"] = ms;
  return j;
}

void StudyConfig::validate() const {
  if (replicates < 1) throw ConfigError("study: replicates must be >= 1");
  if (methods.empty()) throw ConfigError("study: no methods");
  if (datasets.empty()) throw ConfigError("study: no datasets");
  if (data_substeps < 1) throw ConfigError("study: data_substeps must be >= 1");
  for (const auto& m : methods) {
    if (m.exact_mle) {
      if (model != "ou") throw ConfigError("study: exact-mle is only available for ou");
      continue;
    }
    if (m.paths < 2) throw ConfigError("study: method '" + m.name + "' needs J >= 2");
    if (m.substeps < 1) throw ConfigError("study: method '" + m.name + "' needs M >= 1");
    try {
      m.sampler.validate();
    } catch (const DomainError& e) {
      throw ConfigError("study: method '" + m.name + "': " + e.what());
    }
  }
  if (model == "ou" && datasets.size() != 1) {
    throw ConfigError("study: ou uses exactly one dataset per replicate");
  }
  tune.validate();
}

std::uint64_t replicate_fit_seed(std::uint64_t master, std::size_t replicate) {
  return stream_key({master, static_cast<std::uint64_t>(StreamTag::kReplicate), replicate});
}

namespace {

ReplicateRecord run_method(const SdeModel& model, const StudyConfig& config,
                           const MethodSpec& method, const std::vector<Dataset>& data,
                           std::uint64_t fit_seed) {
  ReplicateRecord rec;
  rec.method = method.name;
  const auto started = std::chrono::steady_clock::now();
  const ParamVector init = model.params(config.init);
  if (method.exact_mle) {
    const OuMleResult mle = ou_exact_mle(data.front(), init, {});
    rec.theta = mle.theta.to_vector();
    rec.evaluations = mle.evaluations;
  } else {
    PenaltyConfig penalty;
    penalty.lambda = method.lambda;
    penalty.paths = method.paths;
    penalty.substeps = method.substeps;
    penalty.sampler = method.sampler;
    penalty.estimate_rho = method.estimate_rho;
    PsmlFit fit;
    if (method.tune_lambda) {
      fit = tune_lambda(model, data, config.tune, penalty, init, {}, fit_seed).fit;
    } else {
      fit = maximize_psml(model, data, penalty, init, {}, fit_seed);
    }
    rec.theta = fit.theta.to_vector();
    rec.rho = fit.rho;
    rec.lambda = fit.lambda;
    rec.evaluations = fit.evaluations;
  }
  rec.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

}  // namespace

std::vector<StudyCell> summarize(const std::vector<std::string>& parameters,
                                 const std::vector<MethodSpec>& methods,
                                 const std::vector<ReplicateRecord>& records) {
  std::vector<StudyCell> cells;
  for (const auto& m : methods) {
    for (std::size_t p = 0; p < parameters.size(); ++p) {
      StudyCell cell;
      cell.method = m.name;
      cell.parameter = parameters[p];
      double sum = 0.0;
      double sq = 0.0;
      for (const auto& r : records) {
        if (r.method != m.name || r.failed) continue;
        const double e = r.theta.at(p) - r.reference.at(p);
        sum += e;
        sq += e * e;
        ++cell.successes;
      }
      if (cell.successes > 0) {
        cell.bias = sum / cell.successes;
        cell.rmse = std::sqrt(sq / cell.successes);
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

StudyReport run_study(const StudyConfig& config, int threads) {
  config.validate();
  const auto model = build_model(config.model, config.additions_csv, config.mortality);
  const ParamVector theta0 = model->params(config.theta0);
  if (!theta0.admissible()) throw ConfigError("study: theta0 is not admissible");
  if (!model->params(config.init).admissible()) {
    throw ConfigError("study: init is not admissible");
  }

  StudyReport report;
  report.config = config;
  report.reference = config.model == "ou" ? "exact-mle" : "theta0";
  for (const auto& p : model->parameters()) report.parameters.push_back(p.name);

  const auto R = static_cast<std::size_t>(config.replicates);
  std::vector<std::vector<Dataset>> data(R);
  std::vector<std::vector<double>> reference(R);
  for (std::size_t r = 0; r < R; ++r) report.fit_seeds.push_back(replicate_fit_seed(config.seed, r));

  parallel_for(R, threads, [&](std::size_t r) {
    for (std::size_t d = 0; d < config.datasets.size(); ++d) {
      const DatasetDesign& design = config.datasets[d];
      Vector x0(static_cast<Eigen::Index>(design.x0.size()));
      for (std::size_t i = 0; i < design.x0.size(); ++i) x0[static_cast<Eigen::Index>(i)] = design.x0[i];
      RandomStream rng(config.seed, StreamTag::kReplicate, {r, d});
      data[r].push_back(simulate_dataset(
          *model, theta0, x0, TimeGrid(design.t0, design.times(), config.data_substeps), rng));
    }
    if (report.reference == "exact-mle") {
      reference[r] = ou_exact_mle(data[r].front(), model->params(config.init), {}).theta.to_vector();
    } else {
      reference[r] = config.theta0;
    }
  });

  const std::size_t K = config.methods.size();
  report.records.resize(R * K);
  parallel_for(R * K, threads, [&](std::size_t task) {
    const std::size_t r = task / K;
    const std::size_t k = task % K;
    ReplicateRecord rec;
    try {
      rec = run_method(*model, config, config.methods[k], data[r], report.fit_seeds[r]);
    } catch (const std::exception& e) {
      rec.method = config.methods[k].name;
      rec.failed = true;
      rec.error = e.what();
    }
    rec.replicate = r;
    rec.reference = reference[r];
    report.records[task] = std::move(rec);
  });

  report.cells = summarize(report.parameters, config.methods, report.records);
  for (const auto& m : config.methods) {
    MethodSummary s;
    s.name = m.name;
    double rho_sum = 0.0;
    double seconds = 0.0;
    int ok = 0;
    for (const auto& r : report.records) {
      if (r.method != m.name) continue;
      seconds += r.seconds;
      if (r.failed) {
        ++s.failures;
        continue;
      }
      rho_sum += r.rho;
      ++ok;
    }
    if (m.estimate_rho && ok > 0) s.mean_rho = rho_sum / ok;
    s.mean_seconds = seconds / static_cast<double>(R);
    report.methods.push_back(s);
  }
  return report;
}

json report_json(const StudyReport& report) {
  json j;
  j["config"] = report.config.to_json();
  j["reference"] = report.reference;
  j["parameters"] = report.parameters;
  j["seed_scheme"] = "fit seed of replicate r = stream_key(seed, 6, r); dataset d of "
                     "replicate r is simulated from stream (seed, 6, [r, d])";
  j["fit_seeds"] = report.fit_seeds;
  json cells = json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"method", c.method},
                     {"parameter", c.parameter},
                     {"bias", c.bias ? json(*c.bias) : json(nullptr)},
                     {"rmse", c.rmse ? json(*c.rmse) : json(nullptr)},
                     {"successes", c.successes}});
  }
  j["cells"] = cells;
  json methods = json::array();
  for (const auto& m : report.methods) {
    methods.push_back({{"name", m.name},
                       {"failures", m.failures},
                       {"mean_rho", m.mean_rho ? json(*m.mean_rho) : json(nullptr)}});
  }
  j["methods"] = methods;
  json records = json::array();
  for (const auto& r : report.records) {
    json rec = {{"replicate", r.replicate},
                {"method", r.method},
                {"failed", r.failed},
                {"theta", r.theta},
                {"reference", r.reference},
                {"rho", r.rho},
                {"lambda", r.lambda},
                {"evaluations", r.evaluations}};
    if (r.failed) rec["error"] = r.error;
    records.push_back(rec);
  }
  j["records"] = records;
  return j;
}

std::string report_csv(const StudyReport& report) {
  std::ostringstream out;
  const double scale = report.config.report_scale;
  out << "stat";
  if (scale != 1.0) out << "(scaled x" << format_double(scale) << ")";
  out << ",method";
  for (const auto& p : report.parameters) out << ',' << p;
  out << '\n';
  for (const char* stat : {"bias", "rmse"}) {
    for (const auto& m : report.config.methods) {
      out << stat << ',' << m.name;
      for (const auto& c : report.cells) {
        if (c.method != m.name) continue;
        const auto& v = std::string(stat) == "bias" ? c.bias : c.rmse;
        out << ',' << (v ? format_double(*v * scale) : std::string("failed"));
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string timing_csv(const StudyReport& report) {
  std::ostringstream out;
  out << "replicate,method,seconds\n";
  for (const auto& r : report.records) {
    out << r.replicate << ',' << r.method << ',' << format_double(r.seconds) << '\n';
  }
  return out.str();
}

}  // namespace psml::app
