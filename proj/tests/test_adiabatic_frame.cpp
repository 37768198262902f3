#include "blochsim/adiabatic_frame.hpp"
#include "blochsim/error.hpp"
#include "blochsim/propagator.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cstring>
#include <numbers>
#include <random>

using namespace blochsim;

namespace {

constexpr double pi = std::numbers::pi;

DrivenHOSpec small_ho(int n_fock = 120) { return DrivenHOSpec{1.0, 0.5, 1.2, n_fock, std::nullopt}; }

}  // namespace

TEST_CASE("oscillator frame at t = 0 is the Fock basis") {
  const auto f = instantaneous_frame(build_driven_ho(small_ho(), 0.0), 0.0);
  for (Index n = 0; n < f.dim(); ++n) {
    CHECK(f.energies[n] == static_cast<double>(n));
    CHECK(std::abs(f.states(n, n) - 1.0) < 1e-15);
  }
  CHECK(!f.reference_t.has_value());
}

TEST_CASE("continuity gauge between close frames") {
  const DrivenHOSpec s = small_ho();
  const auto a = instantaneous_frame(build_driven_ho(s, 0.8), 0.8);
  const auto b = instantaneous_frame(build_driven_ho(s, 0.8 + 1e-4), 0.8 + 1e-4, &a);
  const CMatrix o = a.states.adjoint() * b.states;
  CHECK((o - CMatrix::Identity(o.rows(), o.cols())).cwiseAbs().maxCoeff() < 1e-3);
  for (Index k = 0; k < o.rows(); ++k) {
    CHECK(o(k, k).real() > 0.9);
    CHECK(std::abs(o(k, k).imag()) < 1e-12);
  }
  REQUIRE(b.reference_t.has_value());
  CHECK(*b.reference_t == 0.8);
}

TEST_CASE("a frame step that is too large is refused") {
  DrivenHOSpec s{1.0, 5.0, 1.2, 120, std::nullopt};
  const auto a = instantaneous_frame(build_driven_ho(s, 0.0), 0.0);
  CHECK_THROWS_AS(instantaneous_frame(build_driven_ho(s, pi / 2.4), pi / 2.4, &a), FrameStepError);
}

TEST_CASE("frame series does not depend on the worker count") {
  DrivenOscillator model(small_ho(80));
  std::vector<double> times;
  for (int k = 0; k < 24; ++k) times.push_back(0.05 * k);
  const auto one = frame_series(model, times, 1);
  const auto many = frame_series(model, times, 3);
  REQUIRE(one.size() == many.size());
  for (std::size_t k = 0; k < one.size(); ++k) {
    CHECK(std::memcmp(one[k].states.data(), many[k].states.data(), sizeof(cplx) * one[k].states.size()) == 0);
  }
}

TEST_CASE("flat LZ band: interior gaps equal omega/2") {
  const double omega = 0.5;
  LZGridSpec s{omega, 1.0, omega / pi, 121, 8};
  LandauZenerGrid model(s);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, s.period());
  for (int i = 0; i < 10; ++i) {
    const double t = u(rng);
    const RVector e = instantaneous_frame(model.hamiltonian(t), t).energies;
    const Index n = e.size();
    const auto cut = static_cast<Index>(0.15 * static_cast<double>(n));
    for (Index k = cut; k + 1 < n - cut; ++k) CHECK(std::abs(e[k + 1] - e[k] - omega / 2) < 1e-6);
  }
}

TEST_CASE("adiabatic populations") {
  const DrivenHOSpec s = small_ho(400);
  DrivenOscillator model(s);
  const auto f = instantaneous_frame(model.hamiltonian(0.6), 0.6);
  const RVector p = adiabatic_populations(StateVector(f.states.col(17), BasisKind::Fock), f);
  CHECK(p[17] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.sum() - p[17] < 1e-14);

  const auto f0 = instantaneous_frame(model.hamiltonian(0.0), 0.0);
  const StateVector c = initial_state(CoherentState{{std::sqrt(200.0), 0.0}}, model);
  const RVector pc = adiabatic_populations(c, f0);
  const auto ref = oracle::poisson(200.0, 400);
  for (Index n = 0; n < 400; ++n) CHECK(std::abs(pc[n] - ref[static_cast<std::size_t>(n)]) < 1e-12);
  CHECK(std::abs(pc.sum() - 1.0) < 1e-9);

  // global phase of psi and arbitrary column phases of the frame drop out
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ph(-pi, pi);
  AdiabaticFrame g = f;
  for (Index k = 0; k < g.dim(); ++k) g.states.col(k) *= std::polar(1.0, ph(rng));
  const RVector a = adiabatic_populations(c, f);
  CHECK((adiabatic_populations(c, g) - a).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((adiabatic_populations(c.with_global_phase(2.0), f) - a).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(adiabatic_populations(StateVector::basis_state(3, 0, BasisKind::Fock), f), DimensionMismatch);
}

TEST_CASE("numeric coupling matrix of the driven oscillator") {
  const DrivenHOSpec s = small_ho();
  DrivenOscillator model(s);
  double worst = 0.0;
  for (int k = 0; k < 12; ++k) {
    const double t = k * s.drive_period() / 12 + 0.01;
    AdiabaticFrame f = instantaneous_frame(model.hamiltonian(t), t);
    // align each column with the displaced Fock state so signs are comparable
    for (int n = 0; n < 70; ++n) {
      const cplx o = ho_adiabatic_state(n, t, s).amplitudes().dot(f.states.col(n));
      f.states.col(n) *= std::conj(o) / std::abs(o);
    }
    const auto th = numeric_theta(model, t, f);
    CHECK((th.theta - th.theta.adjoint()).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1e-300, th.theta.cwiseAbs().maxCoeff()));
    for (int m = 0; m < 60; ++m) {
      CHECK(th.theta(m, m) == cplx(0.0, 0.0));
      for (int n = 0; n < 60; ++n) {
        if (m == n) continue;
        const cplx ref(0.0, -ho_theta(m, n, t, s));
        worst = std::max(worst, std::abs(th.theta(m, n) - ref));
        CHECK(std::abs(ho_theta(m, n, t, s) - oracle::ho_coupling(m, n, t, 1.0, 0.5, 1.2)) < 1e-14);
      }
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("static lattice has no couplings and a constant generator") {
  SingleBandLattice model({1.0, 1.0, 31, std::nullopt});
  const auto f = instantaneous_frame(model.hamiltonian(0.0), 0.0);
  const auto th = numeric_theta(model, 0.0, f);
  CHECK(th.theta.cwiseAbs().maxCoeff() == 0.0);
  const CMatrix g = adiabatic_generator(f, th, CouplingMode::Full);
  CHECK((g - CMatrix(f.energies.cast<cplx>().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);

  // in its own eigenbasis the evolution is pure phases
  const StateVector psi0(f.states.col(12), BasisKind::Site);
  const auto res = propagate_adiabatic_frame(model, psi0, 0.0, 3.0, 30, CouplingMode::Full);
  CHECK(std::abs(res.final_adiabatic.amplitudes()[12]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(res.final_adiabatic.amplitudes()[12] - std::polar(1.0, -3.0 * f.energies[12])) < 1e-10);
}

TEST_CASE("LZ couplings fall off with the index distance") {
  LandauZenerGrid model({0.5, 1.0, 0.2, 61, 4});
  for (double t : {0.01, 0.137, 0.3}) {
    const auto f = instantaneous_frame(model.hamiltonian(t), t);
    const auto th = numeric_theta(model, t, f);
    const Index q = f.dim() / 2;
    const double first = std::abs(th.theta(q, q + 1));
    CHECK(first > 0.0);
    // neighbours alternate branches; only cross-branch pairs couple
    double prev = first;
    for (Index l = 3; l <= 9; l += 2) {
      const double cur = std::abs(th.theta(q, q + l));
      CHECK(cur < prev);
      prev = cur;
    }
    for (Index l = 2; l <= 10; l += 2) CHECK(std::abs(th.theta(q, q + l)) < 1e-6 * first);
  }
}

TEST_CASE("near-degenerate gaps are refused") {
  LandauZenerGrid model({0.5, 1.0, 0.0, 11, 0});
  const double t = 0.25;  // diabatic crossing with no coupling
  const auto h = model.hamiltonian(t);
  AdiabaticFrame f;
  try {
    f = instantaneous_frame(h, t);
  } catch (const DegenerateCrossingError&) {
    return;
  }
  CHECK_THROWS_AS(numeric_theta(model, t, f), DegenerateCrossingError);
}

TEST_CASE("period-averaged energies") {
  const DrivenHOSpec s = small_ho(80);
  DrivenOscillator model(s);
  const RVector eps = time_averaged_energies(model, 64);
  for (int n = 0; n < 50; ++n) {
    CHECK(std::abs(eps[n] - (n - s.J * s.J / (4 * s.omega))) < 1e-8);
    if (n > 0) CHECK(std::abs(eps[n] - eps[n - 1] - s.omega) < 1e-8);
  }
  CHECK_THROWS_AS(time_averaged_energies(model, 7), ConfigError);

  // the closed-form LZ ladder averages to a spacing of omega/2
  LZGridSpec lz{0.5, 1.0, 0.2, 41, 0};
  const auto ladder = [&lz](double t) { return lz_adiabatic_ladder(t, lz, 10); };
  const RVector avg = time_averaged_energies(ladder, lz.period(), 256);
  for (Index k = 4; k + 5 < avg.size(); ++k) CHECK(std::abs(avg[k + 1] - avg[k] - 0.25) < 1e-4);
}

TEST_CASE("oscillator generator: nearest-neighbour mode equals full mode") {
  DrivenOscillator model(small_ho(60));
  const double t = 0.4;
  const auto f = instantaneous_frame(model.hamiltonian(t), t);
  const auto th = numeric_theta(model, t, f);
  const CMatrix full = adiabatic_generator(f, th, CouplingMode::Full);
  const CMatrix nn = adiabatic_generator(f, th, CouplingMode::NearestNeighbor);
  // the Fock cutoff distorts the top levels, so compare below it
  CHECK((full - nn).topLeftCorner(40, 40).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("generator series rejects sign flips") {
  DrivenOscillator model(small_ho(40));
  std::vector<double> times{0.1, 0.11, 0.12};
  auto frames = frame_series(model, times);
  std::vector<CouplingMatrix> thetas;
  for (const auto& f : frames) thetas.push_back(numeric_theta(model, f.t, f));
  CHECK_NOTHROW(AdiabaticGenerator::from_series(frames, thetas, CouplingMode::Full));
  frames[2].states.col(5) *= -1.0;
  CHECK_THROWS_AS(AdiabaticGenerator::from_series(frames, thetas, CouplingMode::Full), GaugeError);
}

TEST_CASE("adiabatic-frame propagation agrees with direct propagation") {
  const DrivenHOSpec s = small_ho(80);
  DrivenOscillator model(s);
  const StateVector psi0 = initial_state(FockState{20}, model);
  const double t1 = s.drive_period();
  const auto frame = propagate_adiabatic_frame(model, psi0, 0.0, t1, 600, CouplingMode::Full);
  PropagationPlan plan = PropagationPlan::uniform(0.0, t1, t1 / 6000, t1);
  const auto direct = propagate(model, psi0, plan);
  CHECK(std::abs(direct.states.back().inner(frame.final_state)) >= 1.0 - 1e-6);
}
