#pragma once

#include "psml/rng.hpp"
#include "psml/sde.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace psml {

enum class SamplerKind { kPedersen, kMbb, kRegularized, kAuxMbb };

std::string to_string(SamplerKind kind);
// Accepts "pedersen", "mbb", "regularized", "aux-mbb".
SamplerKind parse_sampler_kind(const std::string& name);

// Proposal family for the sub-path between two observations. `rho` is the
// auxiliary parameter: the Pedersen/bridge blend for the regularized family
// and the covariance shrinkage for aux-mbb. Ignored by pedersen and mbb.
struct SamplerSpec {
  SamplerKind kind = SamplerKind::kMbb;
  double rho = 1.0;

  bool uses_rho() const {
    return kind == SamplerKind::kRegularized || kind == SamplerKind::kAuxMbb;
  }
  void validate() const;
};

void to_json(nlohmann::json& j, const SamplerSpec& spec);
void from_json(const nlohmann::json& j, SamplerSpec& spec);

// One observation interval split into M Euler substeps.
struct GridInterval {
  double start = 0.0;
  double end = 1.0;
  int substeps = 1;

  double step() const { return (end - start) / substeps; }
};

// X^0..X^M over one interval plus the log-density accumulators of the
// Euler target (numerator) and of the proposal (denominator).
struct SubPath {
  std::vector<StateVector> states;
  double log_target = 0.0;
  double log_proposal = 0.0;

  double log_weight() const { return log_target - log_proposal; }
};

struct ImportanceWeight {
  double weight = 0.0;
  double log_weight = 0.0;
};

ImportanceWeight importance_weight(const SubPath& path);

// Blend weight of the bridge component at substep m of M:
// (M - m) / ((M - m) + rho (M - m - 1)^2).
double regularized_bridge_weight(int m, int substeps, double rho);

// Draws one sub-path from x_start to the observation `obs_end` (observed
// coordinates, in model.observed() order). Unobserved endpoint coordinates
// are drawn from the Euler conditional given the observation, so the
// endpoint's observed part always equals `obs_end`. Each substep before the
// last consumes exactly k normals from `rng` and the last consumes one per
// unobserved coordinate, for every sampler kind.
void propose(const SamplerSpec& spec, const SdeModel& model,
             const ParamVector& theta, const StateVector& x_start,
             const Vector& obs_end, const GridInterval& interval,
             RandomStream& rng, SubPath& out);

SubPath pedersen_propose(const SdeModel& model, const ParamVector& theta,
                         const StateVector& x_start, const Vector& obs_end,
                         const GridInterval& interval, RandomStream& rng);

SubPath mbb_propose(const SdeModel& model, const ParamVector& theta,
                    const StateVector& x_start, const Vector& obs_end,
                    const GridInterval& interval, RandomStream& rng);

SubPath regularized_propose(const SdeModel& model, const ParamVector& theta,
                            const StateVector& x_start, const Vector& obs_end,
                            const GridInterval& interval, double rho,
                            RandomStream& rng);

SubPath aux_mbb_propose(const SdeModel& model, const ParamVector& theta,
                        const StateVector& x_start, const Vector& obs_end,
                        const GridInterval& interval, double rho,
                        RandomStream& rng);

// Bridge proposal moments at substep m < M - 1, per unit of the substep
// length: mean X + eta * dt and covariance Sigma_m * dt.
struct BridgeMoments {
  Vector eta;
  Matrix sigma;
};

BridgeMoments bridge_moments(const SdeModel& model, const ParamVector& theta,
                             const StateVector& x, const Vector& obs_end,
                             double t, double dt, int m, int substeps);

}  // namespace psml
