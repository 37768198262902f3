#pragma once

// Time stepping of i d/dt psi = H(t) psi on a fixed step grid.

#include "blochsim/models.hpp"
#include "blochsim/quantum_core.hpp"

#include <functional>
#include <string_view>
#include <vector>

namespace blochsim {

enum class Method { MidpointExponential, RK4 };

/// How the midpoint exponential is evaluated. Taylor acts with the model's
/// structured matrix-vector product; Eigen diagonalizes H(t_mid) each step
/// and is the reference path.
enum class Backend { Taylor, Eigen };

std::string_view to_string(Method m);
std::string_view to_string(Backend b);
Method method_from_string(std::string_view s);
Backend backend_from_string(std::string_view s);

struct PropagationPlan {
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 1e-3;  // positive; direction follows sign(t1 - t0)
  std::vector<double> output_times;
  Method method = Method::MidpointExponential;
  Backend backend = Backend::Taylor;
  /// Allowed |norm - 1| per unit of elapsed time, plus a small floor.
  double norm_drift_rate = 1e-9;
  double norm_drift_floor = 1e-11;
  /// Largest total probability the co-moving window may shed.
  double max_window_loss = 1e-8;
  /// Use the model's co-moving window when it has one.
  bool follow_window = true;

  /// Outputs every `interval` from t0 to t1 inclusive.
  static PropagationPlan uniform(double t0, double t1, double dt, double interval);

  void validate() const;
  /// Number of integration steps between t0 and t1.
  long steps() const;
  /// Step index of every output time.
  std::vector<long> output_steps() const;
};

/// Default step: shortest model period / 2000.
double default_dt(const Model& model);

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  /// Number of window re-centerings applied before each stored state.
  std::vector<long> shifts;
  double window_period = 0.0;  // zero when the model has no moving window
  double max_norm_deviation = 0.0;
  double window_loss = 0.0;
  long steps = 0;
  double dt = 0.0;

  /// Time at which to evaluate the model for stored state k (differs from
  /// times[k] by whole window periods on a co-moving grid).
  double model_time(std::size_t k) const { return times[k] - shifts[k] * window_period; }
};

/// Called at every output time with (output index, t, state, shift count).
using Observer = std::function<void(std::size_t, double, const StateVector&, long)>;

/// Integrates from plan.t0 to plan.t1. States are stored at the output times
/// unless `keep_states` is false, in which case only the observer sees them.
Trajectory propagate(const Model& model, const StateVector& psi0, const PropagationPlan& plan,
                     const Observer& observer = {}, bool keep_states = true);

/// Single step psi -> exp(-i H(t + dt/2) dt) psi.
CVector midpoint_step(const Model& model, double t, double dt, const CVector& psi,
                      Backend backend = Backend::Taylor);

/// Classical fourth-order Runge-Kutta step on H - <H>, with the phase restored exactly.
CVector rk4_step(const Model& model, double t, double dt, const CVector& psi);

}  // namespace blochsim
