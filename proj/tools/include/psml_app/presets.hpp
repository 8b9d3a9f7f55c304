#pragma once

#include <psml/models.hpp>
#include <psml/tune.hpp>

#include <memory>
#include <string>
#include <vector>

namespace psml::app {

// One simulated dataset: known start, n equally spaced observations.
struct DatasetDesign {
  double t0 = 0.0;
  std::vector<double> x0;
  int observations = 0;
  double spacing = 1.0;

  std::vector<double> times() const;
};

struct ModelPreset {
  std::string model;
  std::vector<double> theta0;
  std::vector<double> init;  // fixed starting values for fits
  std::vector<DatasetDesign> datasets;
  int substeps = 8;       // M used for estimation
  int data_substeps = 8;  // Euler substeps used to generate data
  int paths = 8;
  double report_scale = 1.0;  // bias/RMSE multiplier in tables
  TuneConfig tune;
};

// Defaults for "ou", "lorenz63" and "cwd-direct". `epidemics` selects the CWD
// design: 1 gives one 21-year series, 2 gives two series of 11 and 10 years.
ModelPreset model_preset(const std::string& model, int epidemics = 2);

// Default additions series for the simulated CWD herds (constant).
PiecewiseConstant default_additions();

std::shared_ptr<const SdeModel> build_model(const std::string& name,
                                            const std::string& additions_csv,
                                            double mortality);

}  // namespace psml::app
