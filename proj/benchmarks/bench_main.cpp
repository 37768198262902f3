#include "blochsim/adiabatic_frame.hpp"
#include "blochsim/propagator.hpp"
#include "blochsim/quantum_core.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace blochsim;

static void BM_EigHermitianDense(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  const HermitianOperator h(CMatrix(0.5 * (a + a.adjoint())));
  for (auto _ : state) benchmark::DoNotOptimize(eig_hermitian(h));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EigHermitianDense)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_EigTridiagonalOscillator(benchmark::State& state) {
  const DrivenHOSpec s{1.0, 0.5, 1.2, static_cast<int>(state.range(0)), std::nullopt};
  const HermitianOperator h = build_driven_ho(s, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(eig_hermitian(h));
}
BENCHMARK(BM_EigTridiagonalOscillator)->Arg(400)->Arg(600)->Unit(benchmark::kMillisecond);

template <class M>
static void run_steps(benchmark::State& state, const M& model, const StateVector& psi0, double dt) {
  CVector psi = psi0.amplitudes();
  double t = 0.0;
  for (auto _ : state) {
    psi = midpoint_step(model, t, dt, psi);
    t += dt;
  }
  benchmark::DoNotOptimize(psi);
}

static void BM_MidpointStepLattice(benchmark::State& state) {
  SingleBandLattice model({10.0, 1.0, 401, std::nullopt});
  run_steps(state, model, initial_state(SiteDelta{0}, model), model.shortest_period() / 2000);
}
BENCHMARK(BM_MidpointStepLattice);

static void BM_MidpointStepOscillator(benchmark::State& state) {
  DrivenOscillator model({1.0, 0.5, 1.2, 400, std::nullopt});
  run_steps(state, model, initial_state(FockState{200}, model), model.shortest_period() / 2000);
}
BENCHMARK(BM_MidpointStepOscillator);

static void BM_MidpointStepLZGrid(benchmark::State& state) {
  LandauZenerGrid model({5.0, 1.0, 0.5, 121, 2});
  run_steps(state, model, initial_state(AdiabaticIndex{std::nullopt, 1.25}, model), default_dt(model));
}
BENCHMARK(BM_MidpointStepLZGrid);

static void BM_EigenBackendStepOscillator(benchmark::State& state) {
  DrivenOscillator model({1.0, 0.5, 1.2, 400, std::nullopt});
  CVector psi = initial_state(FockState{200}, model).amplitudes();
  const double dt = model.shortest_period() / 2000;
  for (auto _ : state) psi = midpoint_step(model, 0.3, dt, psi, Backend::Eigen);
  benchmark::DoNotOptimize(psi);
}
BENCHMARK(BM_EigenBackendStepOscillator)->Unit(benchmark::kMillisecond);

static void BM_NumericTheta(benchmark::State& state) {
  DrivenOscillator model({1.0, 0.5, 1.2, static_cast<int>(state.range(0)), std::nullopt});
  const auto f = instantaneous_frame(model.hamiltonian(0.4), 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(numeric_theta(model, 0.4, f));
}
BENCHMARK(BM_NumericTheta)->Arg(120)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
