#include "psml/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace psml {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

ParseError::ParseError(const std::string& source, int line, const std::string& message)
    : ConfigError(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

std::string format_double(double value) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& text, const std::string& source, int line) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) {
    throw ParseError(source, line, "not a number: '" + t + "'");
  }
  return value;
}

void write_dataset_csv(std::ostream& out, const SdeModel& model, const Dataset& data) {
  out << "time";
  for (int j : data.observed) out << ',' << model.coordinates().at(static_cast<std::size_t>(j));
  out << '\n';
  for (const auto& rec : data.records) {
    out << format_double(rec.time);
    for (Eigen::Index j = 0; j < rec.values.size(); ++j) {
      out << ',' << format_double(rec.values[j]);
    }
    out << '\n';
  }
}

nlohmann::json dataset_sidecar(const Dataset& data) {
  nlohmann::json j;
  j["t0"] = data.t0;
  j["x0"] = std::vector<double>(data.x0.data(), data.x0.data() + data.x0.size());
  j["observed"] = data.observed;
  return j;
}

Dataset read_dataset(std::istream& csv, const nlohmann::json& sidecar,
                     const SdeModel& model, const std::string& source) {
  Dataset data;
  try {
    data.t0 = sidecar.at("t0").get<double>();
    const auto x0 = sidecar.at("x0").get<std::vector<double>>();
    if (static_cast<int>(x0.size()) != model.dimension()) {
      throw ConfigError(source + ": sidecar x0 has " + std::to_string(x0.size()) +
                        " entries, model '" + model.name() + "' has " +
                        std::to_string(model.dimension()));
    }
    data.x0 = Vector(static_cast<Eigen::Index>(x0.size()));
    for (std::size_t i = 0; i < x0.size(); ++i) data.x0[static_cast<Eigen::Index>(i)] = x0[i];
    data.observed = sidecar.at("observed").get<IndexList>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(source + ": bad sidecar: " + e.what());
  }

  std::string line;
  int line_no = 1;
  if (!std::getline(csv, line)) throw ParseError(source, 1, "missing header");
  const auto header = split(trim(line), ',');
  if (header.empty() || trim(header[0]) != "time") {
    throw ParseError(source, 1, "header must start with 'time'");
  }
  if (header.size() != data.observed.size() + 1) {
    throw ParseError(source, 1, "header has " + std::to_string(header.size() - 1) +
                                    " value columns, sidecar lists " +
                                    std::to_string(data.observed.size()));
  }
  for (std::size_t c = 0; c < data.observed.size(); ++c) {
    const int j = data.observed[c];
    if (j < 0 || j >= static_cast<int>(model.dimension()) ||
        model.coordinates()[static_cast<std::size_t>(j)] != trim(header[c + 1])) {
      throw ParseError(source, 1, "column '" + trim(header[c + 1]) +
                                      "' does not match observed coordinate " +
                                      std::to_string(j));
    }
  }

  while (std::getline(csv, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), ',');
    if (fields.size() != header.size()) {
      throw ParseError(source, line_no, "expected " + std::to_string(header.size()) +
                                            " fields, got " + std::to_string(fields.size()));
    }
    Observation rec;
    rec.time = parse_double(fields[0], source, line_no);
    rec.values = Vector(static_cast<Eigen::Index>(fields.size() - 1));
    for (std::size_t c = 1; c < fields.size(); ++c) {
      rec.values[static_cast<Eigen::Index>(c - 1)] = parse_double(fields[c], source, line_no);
    }
    data.records.push_back(std::move(rec));
  }
  data.validate(static_cast<int>(model.dimension()));
  return data;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".json");
  return p;
}

void save_dataset(const std::filesystem::path& csv, const SdeModel& model,
                  const Dataset& data) {
  {
    auto out = open_out(csv);
    write_dataset_csv(out, model, data);
  }
  save_json(sidecar_path(csv), dataset_sidecar(data));
}

Dataset load_dataset(const std::filesystem::path& csv, const SdeModel& model) {
  auto in = open_in(csv);
  return read_dataset(in, load_json(sidecar_path(csv)), model, csv.string());
}

PiecewiseConstant read_additions_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
  const auto header = split(trim(line), ',');
  if (header.size() != 2 || trim(header[0]) != "year" || trim(header[1]) != "a") {
    throw ParseError(source, 1, "header must be 'year,a'");
  }
  std::vector<double> years;
  std::vector<double> values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), ',');
    if (fields.size() != 2) throw ParseError(source, line_no, "expected 2 fields");
    const double year = parse_double(fields[0], source, line_no);
    const double a = parse_double(fields[1], source, line_no);
    if (!years.empty() && !(year > years.back())) {
      throw ParseError(source, line_no, "years must increase");
    }
    if (a < 0.0) throw ParseError(source, line_no, "additions must be >= 0");
    years.push_back(year);
    values.push_back(a);
  }
  if (years.empty()) throw ParseError(source, line_no, "no rows");
  return PiecewiseConstant(std::move(years), std::move(values));
}

PiecewiseConstant load_additions(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_additions_csv(in, path.string());
}

nlohmann::json load_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void save_json(const std::filesystem::path& path, const nlohmann::json& j) {
  save_text(path, j.dump(2) + "\n");
}

void save_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

nlohmann::json fit_json(const SdeModel& model, const PsmlFit& fit,
                        const SamplerSpec& sampler, int paths, int substeps) {
  nlohmann::json j;
  j["model"] = model.name();
  std::vector<std::string> names;
  for (const auto& p : model.parameters()) names.push_back(p.name);
  j["parameters"] = names;
  j["theta"] = fit.theta.to_vector();
  SamplerSpec s = sampler;
  s.rho = fit.rho;
  j["sampler"] = s;
  j["rho"] = fit.rho;
  j["rho_estimated"] = fit.rho_estimated;
  j["lambda"] = fit.lambda;
  j["paths"] = paths;
  j["substeps"] = substeps;
  j["objective"] = fit.objective;
  j["log_likelihood"] = fit.log_likelihood;
  j["cv_sum"] = fit.cv_sum;
  j["evaluations"] = fit.evaluations;
  j["converged"] = fit.converged;
  j["seconds"] = fit.seconds;
  LikelihoodResult diag;
  diag.log_likelihood = fit.log_likelihood;
  diag.transitions = fit.transitions;
  j["diagnostics"] = diagnostics_json(diag);
  return j;
}

PsmlFit fit_from_json(const SdeModel& model, const nlohmann::json& j) {
  try {
    PsmlFit fit;
    fit.theta = model.params(j.at("theta").get<std::vector<double>>());
    fit.rho = j.value("rho", 1.0);
    fit.rho_estimated = j.value("rho_estimated", false);
    fit.lambda = j.value("lambda", 0.0);
    fit.objective = j.value("objective", 0.0);
    fit.log_likelihood = j.value("log_likelihood", 0.0);
    fit.cv_sum = j.value("cv_sum", 0.0);
    fit.evaluations = j.value("evaluations", 0);
    fit.converged = j.value("converged", false);
    if (!fit.theta.admissible()) throw ConfigError("fit theta is not admissible");
    return fit;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad fit JSON: ") + e.what());
  }
}

nlohmann::json tune_json(const SdeModel& model, const TuneResult& result,
                         const TuneConfig& config) {
  nlohmann::json j;
  j["lambda"] = result.lambda;
  j["eps"] = result.eps;
  j["config"] = {{"lambda0", config.lambda0},
                 {"eps0", config.eps0},
                 {"delta_lambda", config.delta_lambda},
                 {"delta_eps", config.delta_eps},
                 {"simulations", config.simulations}};
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& p : result.trace) {
    trace.push_back({{"lambda", p.lambda}, {"eps", p.eps}, {"accepted", p.accepted}});
  }
  j["trace"] = trace;
  std::vector<std::string> names;
  for (const auto& p : model.parameters()) names.push_back(p.name);
  j["parameters"] = names;
  j["theta"] = result.fit.theta.to_vector();
  j["rho"] = result.fit.rho;
  return j;
}

nlohmann::json bootstrap_json(const SdeModel& model, const BootstrapResult& result) {
  nlohmann::json j;
  j["model"] = model.name();
  std::vector<std::string> names;
  for (const auto& p : model.parameters()) names.push_back(p.name);
  j["parameters"] = names;
  j["alpha"] = result.alpha;
  j["failures"] = result.failures;
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& iv : result.intervals) {
    intervals.push_back({{"name", iv.name},
                         {"estimate", iv.estimate},
                         {"lower", iv.lower},
                         {"upper", iv.upper}});
  }
  j["intervals"] = intervals;
  j["replicates"] = result.replicates;
  j["rho_replicates"] = result.rho_replicates;
  return j;
}

}  // namespace psml
