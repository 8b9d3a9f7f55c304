#pragma once

#include "psml_app/presets.hpp"

#include <psml/samplers.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace psml::app {

// One estimator in a study. kind "exact-mle" is the closed-form OU estimator;
// anything else is a sampler name.
struct MethodSpec {
  std::string name;
  bool exact_mle = false;
  SamplerSpec sampler;
  int paths = 8;
  int substeps = 8;
  bool tune_lambda = false;
  double lambda = 0.0;
  bool estimate_rho = false;
};

struct StudyConfig {
  std::string model;
  std::vector<double> theta0;
  std::vector<double> init;
  std::vector<DatasetDesign> datasets;
  int data_substeps = 8;
  int replicates = 1;
  std::uint64_t seed = 1;
  std::vector<MethodSpec> methods;
  TuneConfig tune;
  double report_scale = 1.0;
  std::string additions_csv;
  double mortality = 0.15;

  // Missing fields fall back to model_preset(model).
  static StudyConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

// Seeds of replicate r: data simulation streams and the shared fit seed.
std::uint64_t replicate_fit_seed(std::uint64_t master, std::size_t replicate);

struct ReplicateRecord {
  std::size_t replicate = 0;
  std::string method;
  bool failed = false;
  std::string error;
  std::vector<double> theta;
  std::vector<double> reference;
  double rho = 0.0;
  double lambda = 0.0;
  int evaluations = 0;
  double seconds = 0.0;
};

struct StudyCell {
  std::string method;
  std::string parameter;
  std::optional<double> bias;  // empty when every replicate failed
  std::optional<double> rmse;
  int successes = 0;
};

struct MethodSummary {
  std::string name;
  int failures = 0;
  std::optional<double> mean_rho;  // when rho is estimated
  double mean_seconds = 0.0;
};

struct StudyReport {
  StudyConfig config;
  std::string reference;  // "exact-mle" or "theta0"
  std::vector<std::string> parameters;
  std::vector<std::uint64_t> fit_seeds;
  std::vector<ReplicateRecord> records;  // replicate-major, method-minor
  std::vector<StudyCell> cells;
  std::vector<MethodSummary> methods;
};

StudyReport run_study(const StudyConfig& config, int threads);

// Bias/RMSE cells from raw records against their references.
std::vector<StudyCell> summarize(const std::vector<std::string>& parameters,
                                 const std::vector<MethodSpec>& methods,
                                 const std::vector<ReplicateRecord>& records);

// Deterministic content only: timings go to timing_csv.
nlohmann::json report_json(const StudyReport& report);
// Rows "Bias"/"RMSE" x method, one column per parameter, scaled by
// config.report_scale (noted in the header).
std::string report_csv(const StudyReport& report);
std::string timing_csv(const StudyReport& report);

}  // namespace psml::app
