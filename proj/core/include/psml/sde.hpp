#pragma once

#include "psml/gaussian.hpp"
#include "psml/rng.hpp"
#include "psml/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace psml {

// dX = f(X, theta, t) dt + g(X, theta, t) dW with a known observed-coordinate
// set. Implementations are immutable and safe to share across threads.
class SdeModel {
 public:
  SdeModel(std::string name, std::vector<std::string> coordinates,
           std::vector<ParamSpec> parameters, IndexList observed,
           std::vector<bool> nonnegative = {});
  virtual ~SdeModel() = default;

  const std::string& name() const { return name_; }
  int dimension() const { return static_cast<int>(coordinates_.size()); }
  const std::vector<std::string>& coordinates() const { return coordinates_; }

  std::size_t parameter_count() const { return parameters_.size(); }
  const std::vector<ParamSpec>& parameters() const { return parameters_; }
  std::vector<Constraint> constraints() const;
  // Wraps natural-unit values with this model's constraint descriptors.
  ParamVector params(std::vector<double> values) const;

  const IndexList& observed() const { return observed_; }
  const IndexList& unobserved() const { return unobserved_; }
  std::vector<std::string> observed_names() const;

  virtual Vector drift(const StateVector& x, const ParamVector& theta,
                       double t) const = 0;
  virtual Matrix diffusion(const StateVector& x, const ParamVector& theta,
                           double t) const = 0;
  // g g^T. Override when the covariance is cheaper than the square root.
  virtual Matrix diffusion_covariance(const StateVector& x,
                                      const ParamVector& theta,
                                      double t) const;

  // Projects coordinates declared nonnegative back onto [0, inf).
  void clamp(StateVector& x) const;
  bool has_nonnegative_coordinates() const { return any_nonnegative_; }

 private:
  std::string name_;
  std::vector<std::string> coordinates_;
  std::vector<ParamSpec> parameters_;
  IndexList observed_;
  IndexList unobserved_;
  std::vector<bool> nonnegative_;
  bool any_nonnegative_ = false;
};

// An SdeModel assembled from callables, for ad-hoc models and tests.
class FunctionModel final : public SdeModel {
 public:
  using DriftFn =
      std::function<Vector(const StateVector&, const ParamVector&, double)>;
  using DiffusionFn =
      std::function<Matrix(const StateVector&, const ParamVector&, double)>;

  FunctionModel(std::string name, std::vector<std::string> coordinates,
                std::vector<ParamSpec> parameters, IndexList observed,
                DriftFn drift, DiffusionFn diffusion,
                std::vector<bool> nonnegative = {});

  Vector drift(const StateVector& x, const ParamVector& theta,
               double t) const override {
    return drift_(x, theta, t);
  }
  Matrix diffusion(const StateVector& x, const ParamVector& theta,
                   double t) const override {
    return diffusion_(x, theta, t);
  }

 private:
  DriftFn drift_;
  DiffusionFn diffusion_;
};

// One Euler-Maruyama substep x + f dt + g sqrt(dt) z, followed by the model's
// nonnegativity clamp.
StateVector euler_step(const SdeModel& model, const StateVector& x,
                       const ParamVector& theta, double t, double dt,
                       const Vector& z);

// Gaussian law of one Euler substep: N(x + f dt, g g^T dt).
GaussianSpec euler_transition(const SdeModel& model, const StateVector& x,
                              const ParamVector& theta, double t, double dt);

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
};

// Fine-grid Euler path: n * M + 1 states.
Trajectory simulate_path(const SdeModel& model, const ParamVector& theta,
                         const StateVector& x0, const TimeGrid& grid,
                         RandomStream& rng);

// simulate_path sampled at the observation times and projected onto the
// observed coordinates.
Dataset simulate_dataset(const SdeModel& model, const ParamVector& theta,
                         const StateVector& x0, const TimeGrid& grid,
                         RandomStream& rng);

// Observed values only, without materializing the fine grid.
std::vector<Vector> simulate_observations(const SdeModel& model,
                                          const ParamVector& theta,
                                          const StateVector& x0,
                                          const TimeGrid& grid,
                                          RandomStream& rng);

}  // namespace psml
