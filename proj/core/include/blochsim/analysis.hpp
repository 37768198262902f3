#pragma once

// Observables derived from population and width time series.

#include "blochsim/propagator.hpp"
#include "blochsim/quantum_core.hpp"

#include <optional>
#include <vector>

namespace blochsim {

/// sqrt(sum n^2 P_n - (sum n P_n)^2) in index units.
double index_width(const RVector& populations);

/// sum n P_n with n the array index plus `offset`.
double center_of_mass(const RVector& populations, double offset = 0.0);

/// 1 / sum P_n^2
double participation_ratio(const RVector& populations);

/// (sum_n sqrt(P_n Q_n))^2, a phase-free overlap of two distributions.
double population_fidelity(const RVector& p, const RVector& q);

/// sum_n |P_n - Q_n| / 2
double total_variation(const RVector& p, const RVector& q);

/// |<psi(t0)|psi(t_probe)>|^2 from a stored trajectory; t_probe must be an
/// output time (matched to within 1e-9 of the step).
double revival_fidelity(const Trajectory& traj, double t_probe);

struct PeriodEstimate {
  double period = 0.0;
  double uncertainty = 0.0;
  double peak_correlation = 0.0;
};

struct PeriodOptions {
  /// Centered moving-average window in time units applied first (0 = none).
  double smoothing = 0.0;
  /// Lags shorter than this are ignored.
  double min_lag = 0.0;
  /// Peaks below this normalized autocorrelation are not significant.
  double significance = 0.1;
};

/// Period from the first dominant non-zero-lag maximum of the autocorrelation
/// of a uniformly sampled series, refined by parabolic interpolation.
PeriodEstimate estimate_period(const std::vector<double>& t, const std::vector<double>& values,
                               const PeriodOptions& options = {});

struct PowerLawFit {
  double gamma = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;  // RMS of the log-space residuals
  int points = 0;
  double t_a = 0.0;
  double t_b = 0.0;
};

/// Least-squares slope of log sigma against log t on [t_a, t_b].
PowerLawFit fit_power_law(const std::vector<double>& t, const std::vector<double>& sigma, double t_a,
                          double t_b);

struct Detuning {
  int n = 0;
  double delta = 0.0;
  /// 2 pi / |delta|; infinite at exact resonance.
  double super_period = 0.0;
};

struct DetuningTable {
  std::vector<Detuning> entries;
  int resonant_n = 0;   // entry with the smallest |delta|
  bool exact_resonance = false;
};

/// delta Omega_n = Omega - n omega for n = 1..n_max.
DetuningTable detuning_table(double Omega, double omega, int n_max);

/// Centered moving average over `window` samples (odd, clipped at the ends).
std::vector<double> moving_average(const std::vector<double>& values, int window);

struct Extremum {
  double t = 0.0;
  double value = 0.0;
  std::size_t index = 0;
};

/// Smallest value of the series inside [t_a, t_b].
Extremum minimum_in_window(const std::vector<double>& t, const std::vector<double>& values, double t_a,
                           double t_b);

}  // namespace blochsim
