#include "blochsim/coherent_oracle.hpp"
#include "blochsim/error.hpp"
#include "blochsim/presets.hpp"
#include "blochsim/propagator.hpp"
#include "blochsim/runner.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace blochsim;

namespace {

constexpr double pi = std::numbers::pi;

double deficit(const StateVector& a, const StateVector& b) {
  return oracle::overlap_deficit(a.amplitudes(), b.amplitudes());
}

}  // namespace

TEST_CASE("undriven oscillator only accumulates phases") {
  DrivenOscillator model({1.0, 0.0, 1.2, 40, std::nullopt});
  CVector a = CVector::Zero(40);
  for (Index n = 0; n < 21; ++n) a[n] = cplx(1.0 / std::sqrt(21.0), 0.0);
  const StateVector psi0(a, BasisKind::Fock);
  const auto traj = propagate(model, psi0, PropagationPlan::uniform(0.0, 2.5, 0.01, 0.5));
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    for (Index n = 0; n < 40; ++n) {
      CHECK(std::abs(traj.states[k][n] - a[n] * std::polar(1.0, -static_cast<double>(n) * traj.times[k])) < 1e-12);
    }
  }
}

TEST_CASE("plan validation and output snapping") {
  PropagationPlan p = PropagationPlan::uniform(0.0, 1.0, 0.3, 0.5);
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = PropagationPlan::uniform(0.0, 1.0, 0.01, 0.25);
  CHECK_NOTHROW(p.validate());
  CHECK(p.output_steps() == std::vector<long>{0, 25, 50, 75, 100});
  p.output_times.push_back(1.5);
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("coherent amplitude closed form against direct integration") {
  for (double Omega : {1.2, 1.0, 0.3}) {
    DrivenHOSpec s{1.0, 0.5, Omega, 400, std::nullopt};
    const cplx a0(std::sqrt(200.0), 0.3);
    for (double t : {0.7, 5.0, 31.4}) {
      const cplx ref = oracle::coherent_rk4(a0, 1.0, 0.5, Omega, t, 20000);
      CHECK(std::abs(coherent_amplitude(a0, s, t) - ref) < 1e-9);
    }
  }
  DrivenHOSpec free{1.0, 0.0, 1.2, 400, std::nullopt};
  CHECK(std::abs(coherent_amplitude({2.0, 0.0}, free, 1.7) - std::polar(2.0, -1.7)) < 1e-14);
  DrivenHOSpec s{1.0, 0.5, 1.2, 400, std::nullopt};
  for (int k = 1; k <= 3; ++k) {
    CHECK(std::abs(coherent_amplitude({std::sqrt(200.0), 0.0}, s, k * 10 * pi)) ==
          doctest::Approx(std::sqrt(200.0)).epsilon(1e-12));
  }
  const RVector p0 = driven_ho_coherent_oracle({std::sqrt(200.0), 0.0}, s, 0.0).probabilities();
  const RVector p1 = driven_ho_coherent_oracle({std::sqrt(200.0), 0.0}, s, 10 * pi).probabilities();
  CHECK(0.5 * (p0 - p1).cwiseAbs().sum() < 1e-6);
}

TEST_CASE("driven oscillator from a coherent state follows the closed form") {
  DrivenHOSpec s{1.0, 0.5, 1.2, 400, std::nullopt};
  DrivenOscillator model(s);
  const cplx a0(std::sqrt(200.0), 0.0);
  const StateVector psi0 = initial_state(CoherentState{a0}, model);
  const double t1 = pi;
  const long n = 3142;
  auto run = [&](long steps) {
    return propagate(model, psi0, PropagationPlan::uniform(0.0, t1, t1 / static_cast<double>(steps), t1 / 4));
  };
  const auto coarse = run(n);
  const auto fine = run(2 * n);
  for (std::size_t k = 0; k < coarse.times.size(); ++k) {
    CHECK(deficit(coarse.states[k], driven_ho_coherent_oracle(a0, s, coarse.times[k])) < 1e-6);
  }
  const double d1 = deficit(coarse.states.back(), driven_ho_coherent_oracle(a0, s, t1));
  const double d2 = deficit(fine.states.back(), driven_ho_coherent_oracle(a0, s, t1));
  // second order in the amplitude error, so fourth order in the deficit
  CHECK(d1 / d2 >= 12.0);
}

TEST_CASE("Taylor and eigendecomposition backends agree") {
  DrivenOscillator model({1.0, 0.5, 1.2, 60, std::nullopt});
  const StateVector psi0 = initial_state(FockState{5}, model);
  PropagationPlan plan = PropagationPlan::uniform(0.0, 2.0, 0.01, 2.0);
  const auto a = propagate(model, psi0, plan);
  plan.backend = Backend::Eigen;
  const auto b = propagate(model, psi0, plan);
  CHECK(deficit(a.states.back(), b.states.back()) < 1e-12);

  SingleBandLattice lattice({1.0, 0.5, 41, std::nullopt});
  const StateVector s0 = initial_state(SiteDelta{0}, lattice);
  const auto c = propagate(lattice, s0, plan);
  plan.backend = Backend::Taylor;
  const auto d = propagate(lattice, s0, plan);
  CHECK(deficit(c.states.back(), d.states.back()) < 1e-12);
}

TEST_CASE("forward then backward propagation returns the initial state") {
  DrivenOscillator model({1.0, 0.5, 1.2, 400, std::nullopt});
  const StateVector psi0 = initial_state(CoherentState{{std::sqrt(200.0), 0.0}}, model);
  const double t1 = 2.0;
  const auto fwd = propagate(model, psi0, PropagationPlan::uniform(0.0, t1, 1e-3, t1));
  const auto bwd = propagate(model, fwd.states.back(), PropagationPlan::uniform(t1, 0.0, 1e-3, t1));
  CHECK(std::abs(bwd.states.back().inner(psi0)) >= 1.0 - 1e-8);
}

TEST_CASE("runaway norm is reported instead of renormalized") {
  DrivenOscillator model({1.0, 0.5, 1.2, 200, std::nullopt});
  const StateVector psi0 = initial_state(FockState{100}, model);
  PropagationPlan plan = PropagationPlan::uniform(0.0, 1.0, 0.05, 1.0);
  plan.method = Method::RK4;
  CHECK_THROWS_AS(propagate(model, psi0, plan), NormDriftError);
}

TEST_CASE("co-moving window reproduces a large fixed grid") {
  const LZGridSpec window{0.5, 1.0, 0.2, 41, 0};
  const LZGridSpec big{0.5, 1.0, 0.2, 161, 0};
  LandauZenerGrid small_model(window);
  LandauZenerGrid big_model(big);
  const double t0 = 0.125;
  const double t1 = t0 + 4 * window.period();
  const double dt = window.period() / 400;

  const StateVector psi0 = initial_state(AdiabaticIndex{std::nullopt, t0}, small_model);
  // embed the window state in the big grid at the same ladder labels
  const Index per_s = 41;
  const Index per_b = 161;
  auto embed = [&](const CVector& v) {
    CVector out = CVector::Zero(2 * per_b);
    for (Index i = 0; i < per_s; ++i) {
      out[60 + i] = v[i];
      out[per_b + 60 + i] = v[per_s + i];
    }
    return out;
  };
  const StateVector big0(embed(psi0.amplitudes()), BasisKind::DiabaticLZ);

  PropagationPlan moving = PropagationPlan::uniform(t0, t1, dt, window.period());
  moving.max_window_loss = 1.0;
  const auto a = propagate(small_model, psi0, moving);
  PropagationPlan fixed = moving;
  fixed.follow_window = false;
  const auto b = propagate(big_model, big0, fixed);
  CHECK(a.shifts.back() >= 3);
  for (std::size_t k = 1; k < a.shifts.size(); ++k) CHECK(a.shifts[k] >= a.shifts[k - 1]);

  for (std::size_t k = 0; k < a.times.size(); ++k) {
    const CVector back = embed(small_model.unshift(a.states[k].amplitudes(), a.shifts[k]));
    const double f = std::abs(back.dot(b.states[k].amplitudes()));
    CHECK(f >= 0.99);
  }

  PropagationPlan reverse = PropagationPlan::uniform(t1, t0, dt, window.period());
  CHECK_THROWS_AS(propagate(small_model, psi0, reverse), ConfigError);
  const double d = default_dt(small_model);
  CHECK(std::abs(window.period() / d - std::round(window.period() / d)) < 1e-9);
}

TEST_CASE("midpoint and RK4 agree at the shipped step sizes") {
  for (const auto& info : list_presets()) {
    ScenarioConfig c = resolve(preset(info.name));
    const auto model = make_model(c.model);
    const StateVector psi0 = initial_state(c.initial_state, *model);
    // two hundred steps of each preset
    const double span = 200 * *c.plan.dt;
    PropagationPlan plan = PropagationPlan::uniform(c.plan.t0, c.plan.t0 + span, *c.plan.dt, span);
    plan.max_window_loss = 1.0;
    const auto mid = propagate(*model, psi0, plan);
    plan.method = Method::RK4;
    plan.norm_drift_rate = 1e6;  // RK4 is not unitary; only the direction is compared
    const auto rk = propagate(*model, psi0, plan);
    INFO(info.name);
    CHECK(deficit(mid.states.back(), rk.states.back()) <= 1e-6);
  }
}
