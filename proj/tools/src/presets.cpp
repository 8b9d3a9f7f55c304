#include "psml_app/presets.hpp"

#include <psml/io.hpp>

namespace psml::app {

std::vector<double> DatasetDesign::times() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(observations));
  for (int i = 1; i <= observations; ++i) out.push_back(t0 + i * spacing);
  return out;
}

PiecewiseConstant default_additions() { return PiecewiseConstant(8.0); }

ModelPreset model_preset(const std::string& model, int epidemics) {
  ModelPreset p;
  p.model = model;
  p.tune = TuneConfig::preset(model);
  if (model == "ou") {
    p.theta0 = {0.0187, 0.2610, 0.0224};
    p.init = {0.03, 0.4, 0.03};
    p.datasets = {{0.0, {1.0}, 100, 1.0}};
    p.substeps = 8;
    p.data_substeps = 64;
    p.paths = 8;
    p.report_scale = 1e4;
  } else if (model == "lorenz63") {
    p.theta0 = {10.0, 28.0, 8.0 / 3.0, 2.0};
    p.init = {8.0, 25.0, 2.0, 1.5};
    p.datasets = {{0.0, {-10.0, -10.0, 30.0}, 20, 0.05}};
    p.substeps = 10;
    p.data_substeps = 100;
    p.paths = 32;
  } else if (model == "cwd-direct") {
    p.theta0 = {0.03, 0.20};
    p.init = {0.05, 0.3};
    if (epidemics == 1) {
      p.datasets = {{1980.0, {30.0, 3.0, 0.0}, 21, 1.0}};
    } else if (epidemics == 2) {
      p.datasets = {{1974.0, {30.0, 3.0, 0.0}, 11, 1.0},
                    {1991.0, {25.0, 2.0, 0.0}, 10, 1.0}};
    } else {
      throw ConfigError("cwd preset: epidemics must be 1 or 2");
    }
    p.substeps = 12;
    p.data_substeps = 12;
    p.paths = 48;
  } else {
    throw ConfigError("unknown model '" + model + "' (expected ou | lorenz63 | cwd-direct)");
  }
  return p;
}

std::shared_ptr<const SdeModel> build_model(const std::string& name,
                                            const std::string& additions_csv,
                                            double mortality) {
  ModelOptions options;
  options.mortality = mortality;
  options.additions = additions_csv.empty() ? default_additions()
                                            : load_additions(additions_csv);
  return make_model(name, options);
}

}  // namespace psml::app
