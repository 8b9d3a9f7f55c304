#include "psml/samplers.hpp"

#include <cmath>

namespace psml {

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kPedersen:
      return "pedersen";
    case SamplerKind::kMbb:
      return "mbb";
    case SamplerKind::kRegularized:
      return "regularized";
    case SamplerKind::kAuxMbb:
      return "aux-mbb";
  }
  return "unknown";
}

SamplerKind parse_sampler_kind(const std::string& name) {
  if (name == "pedersen") return SamplerKind::kPedersen;
  if (name == "mbb") return SamplerKind::kMbb;
  if (name == "regularized") return SamplerKind::kRegularized;
  if (name == "aux-mbb") return SamplerKind::kAuxMbb;
  throw ConfigError("unknown sampler kind '" + name + "'");
}

void SamplerSpec::validate() const {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw DomainError("sampler rho must lie in [0, 1]");
  }
  if (kind == SamplerKind::kAuxMbb && rho == 0.0) {
    throw DomainError("aux-mbb with rho = 0 is a degenerate proposal");
  }
}

void to_json(nlohmann::json& j, const SamplerSpec& spec) {
  j = nlohmann::json{{"kind", to_string(spec.kind)}, {"rho", spec.rho}};
}

void from_json(const nlohmann::json& j, SamplerSpec& spec) {
  spec.kind = parse_sampler_kind(j.at("kind").get<std::string>());
  spec.rho = j.value("rho", 1.0);
  spec.validate();
}

ImportanceWeight importance_weight(const SubPath& path) {
  const double lw = path.log_weight();
  return {std::exp(lw), lw};
}

double regularized_bridge_weight(int m, int substeps, double rho) {
  const double remaining = substeps - m;
  const double after = remaining - 1.0;
  return remaining / (remaining + rho * after * after);
}

namespace {

constexpr double kObservedVarianceFloor = 1e-14;

// G_oo with a floor on its diagonal, so the bridge gain stays defined when
// the observed coordinates momentarily carry no diffusion.
GaussianFactor observed_block_factor(const Matrix& g_oo) {
  Matrix reg = g_oo;
  if (reg.diagonal().minCoeff() < kObservedVarianceFloor) {
    reg.diagonal().array() += kObservedVarianceFloor;
  }
  return GaussianFactor(reg);
}

BridgeMoments bridge_from(const Vector& x, const Vector& f, const Matrix& g,
                          const IndexList& obs, const IndexList& unobs,
                          const Vector& obs_end, double dt, int m,
                          int substeps) {
  const double remaining = substeps - m;
  const double shrink = (remaining - 1.0) / remaining;
  const int k = static_cast<int>(x.size());

  BridgeMoments out;
  out.eta.resize(k);
  out.sigma.resize(k, k);

  const Vector x_obs = x(obs);
  out.eta(obs) = (obs_end - x_obs) / (dt * remaining);
  out.sigma(obs, obs) = shrink * g(obs, obs);
  if (unobs.empty()) return out;

  const Matrix g_uo = g(unobs, obs);
  const GaussianFactor g_oo = observed_block_factor(g(obs, obs));
  const Matrix gain = g_oo.solve(g_uo.transpose()).transpose();
  const Vector gap = obs_end - (x_obs + f(obs) * ((remaining - 1.0) * dt));

  out.eta(unobs) = f(unobs) + gain * gap / (dt * remaining);
  out.sigma(unobs, unobs) = g(unobs, unobs) - gain * g_uo.transpose() / remaining;
  out.sigma(unobs, obs) = shrink * g_uo;
  out.sigma(obs, unobs) = shrink * g_uo.transpose();
  return out;
}

void draw_normals(RandomStream& rng, Vector& z, int n) {
  z.resize(n);
  for (int i = 0; i < n; ++i) z[i] = rng.normal();
}

}  // namespace

BridgeMoments bridge_moments(const SdeModel& model, const ParamVector& theta,
                             const StateVector& x, const Vector& obs_end,
                             double t, double dt, int m, int substeps) {
  if (m < 0 || m > substeps - 2) {
    throw DomainError("bridge_moments: substep index must be in [0, M-2]");
  }
  return bridge_from(x, model.drift(x, theta, t),
                     model.diffusion_covariance(x, theta, t), model.observed(),
                     model.unobserved(), obs_end, dt, m, substeps);
}

void propose(const SamplerSpec& spec, const SdeModel& model,
             const ParamVector& theta, const StateVector& x_start,
             const Vector& obs_end, const GridInterval& interval,
             RandomStream& rng, SubPath& out) {
  spec.validate();
  const int k = model.dimension();
  const int M = interval.substeps;
  const double dt = interval.step();
  if (M < 1 || !(dt > 0.0)) throw DomainError("propose: invalid interval");
  if (x_start.size() != k) throw DomainError("propose: wrong start dimension");
  const IndexList& obs = model.observed();
  const IndexList& unobs = model.unobserved();
  if (obs_end.size() != static_cast<int>(obs.size())) {
    throw DomainError("propose: wrong observation dimension");
  }

  out.states.clear();
  out.states.push_back(x_start);
  out.log_target = 0.0;
  out.log_proposal = 0.0;

  Vector z;
  StateVector x = x_start;
  for (int m = 0; m + 1 < M; ++m) {
    const double t = interval.start + m * dt;
    const Vector f = model.drift(x, theta, t);
    const Matrix g = model.diffusion_covariance(x, theta, t);
    const Vector target_mean = x + f * dt;
    const GaussianFactor target(g * dt);
    draw_normals(rng, z, k);

    StateVector next;
    if (spec.kind == SamplerKind::kPedersen) {
      next = target.sample(target_mean, z);
      const double lp = target.log_density(next, target_mean);
      out.log_target += lp;
      out.log_proposal += lp;
    } else {
      const BridgeMoments b =
          bridge_from(x, f, g, obs, unobs, obs_end, dt, m, M);
      Vector mean = x + b.eta * dt;
      Matrix cov = b.sigma * dt;
      if (spec.kind == SamplerKind::kAuxMbb) {
        cov *= spec.rho;
      } else if (spec.kind == SamplerKind::kRegularized) {
        const double v = regularized_bridge_weight(m, M, spec.rho);
        mean = (1.0 - v) * target_mean + v * mean;
        cov = (1.0 - v) * (g * dt) + v * cov;
      }
      const GaussianFactor proposal(cov);
      next = proposal.sample(mean, z);
      out.log_proposal += proposal.log_density(next, mean);
      out.log_target += target.log_density(next, target_mean);
    }
    if (!next.allFinite()) throw NumericalError("propose: non-finite state");
    out.states.push_back(next);
    x = next;
  }

  // Last substep: pin the observed coordinates, draw the rest from the Euler
  // conditional. The target factor splits as marginal(obs) x conditional.
  const double t = interval.start + (M - 1) * dt;
  const GaussianSpec last{x + model.drift(x, theta, t) * dt,
                          model.diffusion_covariance(x, theta, t) * dt};
  StateVector end(k);
  end(obs) = obs_end;
  const double log_marginal = mvn_logpdf(obs_end, marginal(last, obs));
  out.log_target += log_marginal;
  if (!unobs.empty()) {
    const GaussianSpec cond = conditional(last, obs, obs_end);
    const GaussianFactor cond_factor(cond.covariance);
    draw_normals(rng, z, static_cast<int>(unobs.size()));
    const Vector drawn = cond_factor.sample(cond.mean, z);
    end(unobs) = drawn;
    const double lc = cond_factor.log_density(drawn, cond.mean);
    out.log_target += lc;
    out.log_proposal += lc;
  }
  out.states.push_back(end);
}

SubPath pedersen_propose(const SdeModel& model, const ParamVector& theta,
                         const StateVector& x_start, const Vector& obs_end,
                         const GridInterval& interval, RandomStream& rng) {
  SubPath out;
  propose({SamplerKind::kPedersen, 1.0}, model, theta, x_start, obs_end,
          interval, rng, out);
  return out;
}

SubPath mbb_propose(const SdeModel& model, const ParamVector& theta,
                    const StateVector& x_start, const Vector& obs_end,
                    const GridInterval& interval, RandomStream& rng) {
  SubPath out;
  propose({SamplerKind::kMbb, 1.0}, model, theta, x_start, obs_end, interval,
          rng, out);
  return out;
}

SubPath regularized_propose(const SdeModel& model, const ParamVector& theta,
                            const StateVector& x_start, const Vector& obs_end,
                            const GridInterval& interval, double rho,
                            RandomStream& rng) {
  SubPath out;
  propose({SamplerKind::kRegularized, rho}, model, theta, x_start, obs_end,
          interval, rng, out);
  return out;
}

SubPath aux_mbb_propose(const SdeModel& model, const ParamVector& theta,
                        const StateVector& x_start, const Vector& obs_end,
                        const GridInterval& interval, double rho,
                        RandomStream& rng) {
  SubPath out;
  propose({SamplerKind::kAuxMbb, rho}, model, theta, x_start, obs_end,
          interval, rng, out);
  return out;
}

}  // namespace psml
