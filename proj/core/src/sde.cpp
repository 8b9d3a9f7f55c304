#include "psml/sde.hpp"

#include <algorithm>
#include <cmath>

namespace psml {

SdeModel::SdeModel(std::string name, std::vector<std::string> coordinates,
                   std::vector<ParamSpec> parameters, IndexList observed,
                   std::vector<bool> nonnegative)
    : name_(std::move(name)),
      coordinates_(std::move(coordinates)),
      parameters_(std::move(parameters)),
      observed_(std::move(observed)),
      nonnegative_(std::move(nonnegative)) {
  const int k = dimension();
  if (k < 1 || k > kMaxStateDim) {
    throw DomainError("SdeModel: dimension must be in [1, " +
                      std::to_string(kMaxStateDim) + "]");
  }
  if (parameters_.empty()) throw DomainError("SdeModel: no parameters");
  if (observed_.empty()) throw DomainError("SdeModel: observed set is empty");
  IndexList sorted = observed_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
      sorted.front() < 0 || sorted.back() >= k) {
    throw DomainError("SdeModel: observed set must be distinct indices < k");
  }
  unobserved_ = complement(observed_, k);
  if (nonnegative_.empty()) nonnegative_.assign(k, false);
  if (static_cast<int>(nonnegative_.size()) != k) {
    throw DomainError("SdeModel: nonnegativity flags must have k entries");
  }
  any_nonnegative_ =
      std::find(nonnegative_.begin(), nonnegative_.end(), true) !=
      nonnegative_.end();
}

std::vector<Constraint> SdeModel::constraints() const {
  std::vector<Constraint> out;
  out.reserve(parameters_.size());
  for (const auto& p : parameters_) out.push_back(p.constraint);
  return out;
}

ParamVector SdeModel::params(std::vector<double> values) const {
  if (values.size() != parameters_.size()) {
    throw DomainError(name_ + ": expected " +
                      std::to_string(parameters_.size()) + " parameters");
  }
  return ParamVector(std::move(values), constraints());
}

std::vector<std::string> SdeModel::observed_names() const {
  std::vector<std::string> out;
  for (int i : observed_) out.push_back(coordinates_[i]);
  return out;
}

Matrix SdeModel::diffusion_covariance(const StateVector& x,
                                      const ParamVector& theta,
                                      double t) const {
  const Matrix g = diffusion(x, theta, t);
  return g * g.transpose();
}

void SdeModel::clamp(StateVector& x) const {
  if (!any_nonnegative_) return;
  for (int i = 0; i < x.size(); ++i) {
    if (nonnegative_[i] && x[i] < 0.0) x[i] = 0.0;
  }
}

FunctionModel::FunctionModel(std::string name,
                             std::vector<std::string> coordinates,
                             std::vector<ParamSpec> parameters,
                             IndexList observed, DriftFn drift,
                             DiffusionFn diffusion,
                             std::vector<bool> nonnegative)
    : SdeModel(std::move(name), std::move(coordinates), std::move(parameters),
               std::move(observed), std::move(nonnegative)),
      drift_(std::move(drift)),
      diffusion_(std::move(diffusion)) {}

namespace {

void require_finite(const SdeModel& model, const Vector& f, const Matrix& g) {
  for (int i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) {
      throw DomainError(model.name() + ": drift is not finite at coordinate " +
                        model.coordinates()[i]);
    }
  }
  for (int i = 0; i < g.rows(); ++i) {
    if (!g.row(i).allFinite()) {
      throw DomainError(model.name() +
                        ": diffusion is not finite at coordinate " +
                        model.coordinates()[i]);
    }
  }
}

}  // namespace

StateVector euler_step(const SdeModel& model, const StateVector& x,
                       const ParamVector& theta, double t, double dt,
                       const Vector& z) {
  if (!(dt > 0.0)) throw DomainError("euler_step: step must be positive");
  if (!z.allFinite()) throw DomainError("euler_step: noise draw not finite");
  const Vector f = model.drift(x, theta, t);
  const Matrix g = model.diffusion(x, theta, t);
  require_finite(model, f, g);
  StateVector next = x + f * dt + g * (std::sqrt(dt) * z);
  model.clamp(next);
  return next;
}

GaussianSpec euler_transition(const SdeModel& model, const StateVector& x,
                              const ParamVector& theta, double t, double dt) {
  if (!(dt > 0.0)) throw DomainError("euler_transition: step must be positive");
  const Vector f = model.drift(x, theta, t);
  const Matrix cov = model.diffusion_covariance(x, theta, t) * dt;
  require_finite(model, f, cov);
  // Throws NumericalError when not PSD within the jitter tolerance.
  (void)GaussianFactor(cov);
  return {x + f * dt, cov};
}

namespace {

template <typename Visit>
void walk_path(const SdeModel& model, const ParamVector& theta,
               const StateVector& x0, const TimeGrid& grid, RandomStream& rng,
               Visit&& visit) {
  const int k = model.dimension();
  if (x0.size() != k) throw DomainError("simulate: x0 has wrong dimension");
  StateVector x = x0;
  Vector z(k);
  for (std::size_t i = 0; i < grid.intervals(); ++i) {
    const double dt = grid.step(i);
    const double start = grid.start(i);
    for (int m = 0; m < grid.substeps(); ++m) {
      for (int c = 0; c < k; ++c) z[c] = rng.normal();
      x = euler_step(model, x, theta, start + m * dt, dt, z);
      visit(i, m, start + (m + 1) * dt, x);
    }
  }
}

}  // namespace

Trajectory simulate_path(const SdeModel& model, const ParamVector& theta,
                         const StateVector& x0, const TimeGrid& grid,
                         RandomStream& rng) {
  Trajectory out;
  const std::size_t size = grid.intervals() * grid.substeps() + 1;
  out.times.reserve(size);
  out.states.reserve(size);
  out.times.push_back(grid.t0());
  out.states.push_back(x0);
  walk_path(model, theta, x0, grid, rng,
            [&](std::size_t i, int m, double t, const StateVector& x) {
              // Land exactly on the observation time at the last substep.
              out.times.push_back(m + 1 == grid.substeps() ? grid.end(i) : t);
              out.states.push_back(x);
            });
  return out;
}

std::vector<Vector> simulate_observations(const SdeModel& model,
                                          const ParamVector& theta,
                                          const StateVector& x0,
                                          const TimeGrid& grid,
                                          RandomStream& rng) {
  std::vector<Vector> out;
  out.reserve(grid.intervals());
  const IndexList& obs = model.observed();
  walk_path(model, theta, x0, grid, rng,
            [&](std::size_t, int m, double, const StateVector& x) {
              if (m + 1 == grid.substeps()) out.push_back(select(x, obs));
            });
  return out;
}

Dataset simulate_dataset(const SdeModel& model, const ParamVector& theta,
                         const StateVector& x0, const TimeGrid& grid,
                         RandomStream& rng) {
  Dataset ds;
  ds.t0 = grid.t0();
  ds.x0 = x0;
  ds.observed = model.observed();
  const auto values = simulate_observations(model, theta, x0, grid, rng);
  ds.records.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    ds.records.push_back({grid.end(i), values[i]});
  }
  return ds;
}

}  // namespace psml
