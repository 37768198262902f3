#include "blochsim/analysis.hpp"
#include "blochsim/error.hpp"
#include "blochsim/propagator.hpp"

#include <doctest.h>

#include <limits>
#include <numbers>

using namespace blochsim;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> t;
  for (int k = 0; k < n; ++k) t.push_back(a + (b - a) * k / (n - 1));
  return t;
}

}  // namespace

TEST_CASE("width, centre and participation") {
  RVector delta = RVector::Zero(9);
  delta[4] = 1.0;
  CHECK(index_width(delta) == 0.0);
  CHECK(participation_ratio(delta) == 1.0);
  CHECK(center_of_mass(delta, -4.0) == 0.0);

  RVector two = RVector::Zero(9);
  two[0] = two[6] = 0.5;
  CHECK(index_width(two) == doctest::Approx(3.0));

  const RVector uniform = RVector::Constant(50, 1.0 / 50);
  CHECK(participation_ratio(uniform) == doctest::Approx(50.0));
}

TEST_CASE("distribution overlaps") {
  RVector p(3);
  p << 0.2, 0.3, 0.5;
  CHECK(population_fidelity(p, p) == doctest::Approx(1.0));
  CHECK(population_fidelity(p, p) <= 1.0);
  CHECK(total_variation(p, p) == 0.0);
  RVector q(3);
  q << 0.5, 0.3, 0.2;
  CHECK(total_variation(p, q) == doctest::Approx(0.3));
  CHECK_THROWS_AS(total_variation(p, RVector::Zero(2)), DimensionMismatch);
}

TEST_CASE("period of a synthetic squared sine") {
  const double T0 = 7.3;
  const auto t = grid(0.0, 40.0, 2001);
  std::vector<double> v;
  for (double x : t) v.push_back(std::pow(std::sin(pi * x / T0), 2));
  const auto est = estimate_period(t, v);
  CHECK(std::abs(est.period - T0) <= est.uncertainty);
  CHECK(est.uncertainty == doctest::Approx(t[1] - t[0]));

  // a |sin| cusp series, the shape of a breathing width
  std::vector<double> cusp;
  for (double x : t) cusp.push_back(std::abs(std::sin(pi * x / T0)));
  CHECK(std::abs(estimate_period(t, cusp).period - T0) <= 2 * (t[1] - t[0]));

  CHECK_THROWS_AS(estimate_period(t, std::vector<double>(t.size(), 1.0)), NumericalError);
  std::vector<double> noisy;
  for (std::size_t k = 0; k < t.size(); ++k) noisy.push_back(std::sin(1e3 * k * k));
  CHECK_THROWS_AS(estimate_period(t, noisy, {0.0, 0.0, 0.9}), NumericalError);
}

TEST_CASE("smoothing removes a fast ripple before the period is read") {
  const auto t = grid(0.0, 120.0, 4801);
  std::vector<double> v;
  for (double x : t) v.push_back(std::sin(2 * pi * x / 30.0) + 0.8 * std::sin(2 * pi * x / 0.9));
  const auto est = estimate_period(t, v, {1.8, 0.0, 0.1});
  CHECK(est.period == doctest::Approx(30.0).epsilon(0.01));
}

TEST_CASE("power-law fits") {
  const auto t = grid(1.0, 50.0, 100);
  std::vector<double> lin;
  std::vector<double> root;
  for (double x : t) {
    lin.push_back(3 * x);
    root.push_back(2 * std::sqrt(x));
  }
  const auto a = fit_power_law(t, lin, 2.0, 40.0);
  CHECK(a.gamma == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(a.prefactor == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(a.residual < 1e-12);
  CHECK(fit_power_law(t, root, 2.0, 40.0).gamma == doctest::Approx(0.5).epsilon(1e-3));
  CHECK_THROWS_AS(fit_power_law(t, lin, 2.0, 3.0), ConfigError);
}

TEST_CASE("detuning table") {
  const auto a = detuning_table(1.2, 1.0, 3);
  CHECK(a.entries[0].delta == doctest::Approx(0.2));
  CHECK(a.entries[0].super_period == doctest::Approx(10 * pi));
  CHECK(a.resonant_n == 1);
  CHECK(!a.exact_resonance);
  const auto b = detuning_table(1.0, 1.0, 2);
  CHECK(b.exact_resonance);
  CHECK(b.entries[0].super_period == std::numeric_limits<double>::infinity());
  const auto c = detuning_table(5.2, 5.0, 3);
  CHECK(c.resonant_n == 1);
  CHECK(c.entries[0].delta == doctest::Approx(0.2));
  CHECK_THROWS_AS(detuning_table(1.0, 1.0, 0), ConfigError);
}

TEST_CASE("revival fidelity needs an output time") {
  SingleBandLattice model({1.0, 1.0, 41, std::nullopt});
  const auto traj = propagate(model, initial_state(SiteDelta{0}, model),
                              PropagationPlan::uniform(0.0, 2 * pi, 2 * pi / 1000, pi));
  CHECK(revival_fidelity(traj, 0.0) == doctest::Approx(1.0));
  CHECK(revival_fidelity(traj, 2 * pi) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(revival_fidelity(traj, pi) < 0.5);
  CHECK_THROWS_AS(revival_fidelity(traj, 1.0), ConfigError);
}

TEST_CASE("moving average and window minimum") {
  const std::vector<double> v{4, 1, 3, 0, 5, 2};
  CHECK(moving_average(v, 1) == v);
  const auto m = moving_average(v, 3);
  CHECK(m[0] == doctest::Approx(2.5));
  CHECK(m[2] == doctest::Approx(4.0 / 3.0));
  const std::vector<double> t{0, 1, 2, 3, 4, 5};
  const auto e = minimum_in_window(t, v, 0.5, 2.5);
  CHECK(e.value == 1.0);
  CHECK(e.t == 1.0);
  CHECK_THROWS_AS(minimum_in_window(t, v, 7.0, 8.0), ConfigError);
}
