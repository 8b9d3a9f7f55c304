#pragma once

#include "psml/models.hpp"
#include "psml/tune.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace psml {

// Malformed input; what() carries "<source>:<line>: <message>".
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

// Shortest decimal that parses back to exactly `value`.
std::string format_double(double value);
double parse_double(const std::string& text, const std::string& source, int line);

// Dataset CSV: header "time,<observed coordinate names>", one record per row.
void write_dataset_csv(std::ostream& out, const SdeModel& model, const Dataset& data);
// Sidecar: {"t0": .., "x0": [..], "observed": [indices]}.
nlohmann::json dataset_sidecar(const Dataset& data);

Dataset read_dataset(std::istream& csv, const nlohmann::json& sidecar,
                     const SdeModel& model, const std::string& source = "<csv>");

// <stem>.csv and <stem>.json next to each other.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);
void save_dataset(const std::filesystem::path& csv, const SdeModel& model,
                  const Dataset& data);
Dataset load_dataset(const std::filesystem::path& csv, const SdeModel& model);

// Exogenous additions: CSV with header "year,a".
PiecewiseConstant read_additions_csv(std::istream& in,
                                     const std::string& source = "<csv>");
PiecewiseConstant load_additions(const std::filesystem::path& path);

nlohmann::json load_json(const std::filesystem::path& path);
// Pretty-printed with a trailing newline.
void save_json(const std::filesystem::path& path, const nlohmann::json& j);
void save_text(const std::filesystem::path& path, const std::string& text);

nlohmann::json fit_json(const SdeModel& model, const PsmlFit& fit,
                        const SamplerSpec& sampler, int paths, int substeps);
// Reads theta, rho, lambda back from fit_json output.
PsmlFit fit_from_json(const SdeModel& model, const nlohmann::json& j);

nlohmann::json tune_json(const SdeModel& model, const TuneResult& result,
                         const TuneConfig& config);
nlohmann::json bootstrap_json(const SdeModel& model, const BootstrapResult& result);

}  // namespace psml
