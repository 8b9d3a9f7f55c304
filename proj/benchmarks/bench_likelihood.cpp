#include <benchmark/benchmark.h>

#include <psml/gaussian.hpp>
#include <psml/likelihood.hpp>
#include <psml/models.hpp>
#include <psml/sde.hpp>

using namespace psml;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

SamplerKind kind_of(int64_t k) { return static_cast<SamplerKind>(k); }

void BM_OuTransition(benchmark::State& state) {
  OuModel ou;
  const ParamVector th = ou.params({0.0187, 0.2610, 0.0224});
  const SamplerSpec spec{kind_of(state.range(0)), 0.5};
  const int paths = static_cast<int>(state.range(1));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto r = transition_estimate(ou, th, ParticleCloud::point(Vector(0)), vec({1.0}), vec({0.8}),
                                 {0.0, 1.0, 8}, spec, paths, {++seed, 0, 0});
    benchmark::DoNotOptimize(r.estimate.log_phat);
  }
  state.SetItemsProcessed(state.iterations() * paths);
  state.SetLabel(to_string(spec.kind));
}
BENCHMARK(BM_OuTransition)->ArgsProduct({{0, 1, 2, 3}, {8, 64}});

void BM_CwdTransition(benchmark::State& state) {
  CwdDirectModel cwd(PiecewiseConstant(8.0), 0.15);
  const ParamVector th = cwd.params({0.03, 0.2});
  const int paths = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto r = transition_estimate(cwd, th, ParticleCloud::point(vec({30, 3})), vec({0.0}), vec({0.8}),
                                 {0.0, 1.0, 12}, {SamplerKind::kAuxMbb, 0.9}, paths, {++seed, 0, 0});
    benchmark::DoNotOptimize(r.estimate.log_phat);
  }
  state.SetItemsProcessed(state.iterations() * paths);
}
BENCHMARK(BM_CwdTransition)->Arg(48);

void BM_OuLogLikelihood(benchmark::State& state) {
  OuModel ou;
  const ParamVector th = ou.params({0.0187, 0.2610, 0.0224});
  std::vector<double> t;
  for (int i = 1; i <= 100; ++i) t.push_back(i);
  RandomStream rng(1, StreamTag::kSimulate, {0});
  const std::vector<Dataset> data = {simulate_dataset(ou, th, vec({1.0}), TimeGrid(0, t, 64), rng)};
  PenaltyConfig c;
  c.paths = static_cast<int>(state.range(0));
  c.sampler = {SamplerKind::kAuxMbb, 0.9};
  for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(ou, th, data, c, 3).log_likelihood);
}
BENCHMARK(BM_OuLogLikelihood)->Arg(8)->Arg(32);

void BM_MatrixSqrt3(benchmark::State& state) {
  const Matrix s = cwd_sigma(40, 5, 0.03, 0.2, 8, 0.15);
  for (auto _ : state) benchmark::DoNotOptimize(matrix_sqrt(s)(0, 0));
}
BENCHMARK(BM_MatrixSqrt3);

}  // namespace

BENCHMARK_MAIN();
