#include "blochsim/propagator.hpp"

#include "blochsim/error.hpp"
#include "blochsim/expm.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace blochsim {

std::string_view to_string(Method m) {
  return m == Method::RK4 ? "rk4" : "midpoint_exponential";
}

std::string_view to_string(Backend b) { return b == Backend::Eigen ? "eigen" : "taylor"; }

Method method_from_string(std::string_view s) {
  if (s == "midpoint_exponential") return Method::MidpointExponential;
  if (s == "rk4") return Method::RK4;
  throw ConfigError("plan.method must be midpoint_exponential or rk4, got '" + std::string(s) + "'");
}

Backend backend_from_string(std::string_view s) {
  if (s == "taylor") return Backend::Taylor;
  if (s == "eigen") return Backend::Eigen;
  throw ConfigError("plan.backend must be taylor or eigen, got '" + std::string(s) + "'");
}

PropagationPlan PropagationPlan::uniform(double t0, double t1, double dt, double interval) {
  PropagationPlan p;
  p.t0 = t0;
  p.t1 = t1;
  p.dt = dt;
  if (!(interval > 0.0)) throw ConfigError("plan.output_interval must be > 0");
  const double span = std::abs(t1 - t0);
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  const long count = static_cast<long>(std::floor(span / interval + 1e-9));
  for (long k = 0; k <= count; ++k) p.output_times.push_back(t0 + dir * interval * static_cast<double>(k));
  if (std::abs(p.output_times.back() - t1) > 1e-9 * std::max(1.0, span)) p.output_times.push_back(t1);
  return p;
}

void PropagationPlan::validate() const {
  if (!std::isfinite(t0) || !std::isfinite(t1)) throw ConfigError("plan.t0 and plan.t1 must be finite");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("plan.dt must be > 0");
  if (t0 == t1) throw ConfigError("plan.t1 must differ from plan.t0");
  const double span = std::abs(t1 - t0);
  const double n = span / dt;
  if (std::abs(n - std::round(n)) > 1e-6 * std::max(1.0, n) || std::round(n) < 1) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "plan.dt = " << dt << " does not divide the interval length " << span;
    throw ConfigError(msg.str());
  }
  const double lo = std::min(t0, t1);
  const double hi = std::max(t0, t1);
  for (double t : output_times) {
    if (t < lo - 1e-9 * span || t > hi + 1e-9 * span) {
      std::ostringstream msg;
      msg << "output time " << t << " lies outside [" << lo << ", " << hi << "]";
      throw ConfigError(msg.str());
    }
  }
  if (!(norm_drift_rate > 0.0)) throw ConfigError("plan.norm_drift_rate must be > 0");
}

long PropagationPlan::steps() const { return std::lround(std::abs(t1 - t0) / dt); }

std::vector<long> PropagationPlan::output_steps() const {
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  std::vector<long> out;
  out.reserve(output_times.size());
  for (double t : output_times) out.push_back(std::lround(dir * (t - t0) / dt));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double default_dt(const Model& model) {
  const double dt = model.shortest_period() / 2000.0;
  if (auto period = model.recentering_period()) {
    // the co-moving window needs a whole number of steps per period
    return *period / std::ceil(*period / dt - 1e-9);
  }
  return dt;
}

CVector midpoint_step(const Model& model, double t, double dt, const CVector& psi, Backend backend) {
  const double tm = t + 0.5 * dt;
  if (backend == Backend::Eigen) {
    return apply_exponential(eig_hermitian(model.hamiltonian(tm)), dt, psi);
  }
  const LinearMap map = [&model, tm](const CVector& in, CVector& out) { model.apply(tm, in, out); };
  return expm_action(map, model.spectral_bounds(tm), dt, psi);
}

CVector rk4_step(const Model& model, double t, double dt, const CVector& psi) {
  const cplx mi{0.0, -1.0};
  CVector buf(psi.size());
  model.apply(t, psi, buf);
  // Shifting by <H> removes the packet's fast common phase, which the
  // truncated series would otherwise resolve poorly.
  const double c = psi.dot(buf).real() / psi.squaredNorm();
  auto f = [&](double s, const CVector& v) {
    model.apply(s, v, buf);
    return CVector(mi * (buf - c * v));
  };
  const CVector k1 = mi * (buf - c * psi);
  const CVector k2 = f(t + 0.5 * dt, psi + 0.5 * dt * k1);
  const CVector k3 = f(t + 0.5 * dt, psi + 0.5 * dt * k2);
  const CVector k4 = f(t + dt, psi + dt * k3);
  return (psi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)) * std::polar(1.0, -c * dt);
}

Trajectory propagate(const Model& model, const StateVector& psi0, const PropagationPlan& plan,
                     const Observer& observer, bool keep_states) {
  plan.validate();
  if (psi0.dim() != model.dim()) {
    throw DimensionMismatch("initial state dimension does not match the model");
  }
  if (!psi0.is_normalized(1e-9)) throw ConfigError("initial state is not normalized");

  const double dir = plan.t1 >= plan.t0 ? 1.0 : -1.0;
  const double h = dir * plan.dt;
  const long n_steps = plan.steps();
  const std::vector<long> outs = plan.output_steps();

  // co-moving window: local time wraps every `period` steps
  long period_steps = 0;
  double window_period = 0.0;
  if (plan.follow_window && model.recentering_period()) {
    window_period = *model.recentering_period();
    if (dir < 0.0) throw ConfigError("backward propagation is not supported on a co-moving grid");
    const double m = window_period / plan.dt;
    period_steps = std::lround(m);
    if (period_steps < 1 || std::abs(m - static_cast<double>(period_steps)) > 1e-9 * m) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "plan.dt = " << plan.dt << " must divide the window period " << window_period;
      throw ConfigError(msg.str());
    }
  }

  Trajectory traj;
  traj.window_period = window_period;
  traj.steps = n_steps;
  traj.dt = plan.dt;

  std::optional<EigenDecomposition> frozen;
  if (model.time_independent() && plan.method == Method::MidpointExponential &&
      plan.backend == Backend::Eigen) {
    frozen = eig_hermitian(model.hamiltonian(plan.t0));
  }

  CVector psi = psi0.amplitudes();
  long shift = 0;
  std::size_t next_out = 0;
  auto emit = [&](long j) {
    const double t = plan.t0 + h * static_cast<double>(j);
    const double dev = std::abs(std::sqrt(psi.squaredNorm() + traj.window_loss) - 1.0);
    traj.max_norm_deviation = std::max(traj.max_norm_deviation, dev);
    StateVector s(psi, model.basis());
    if (observer) observer(next_out, t, s, shift);
    if (keep_states) {
      traj.times.push_back(t);
      traj.states.push_back(std::move(s));
      traj.shifts.push_back(shift);
    }
    ++next_out;
  };

  if (next_out < outs.size() && outs[next_out] == 0) emit(0);
  for (long j = 0; j < n_steps; ++j) {
    if (period_steps > 0 && j > 0 && j % period_steps == 0) {
      traj.window_loss += model.recenter(psi);
      ++shift;
      if (traj.window_loss > plan.max_window_loss) {
        std::ostringstream msg;
        msg << "probability " << traj.window_loss << " has left the co-moving window by t = "
            << plan.t0 + h * static_cast<double>(j) << "; enlarge n_levels";
        throw TruncationError(msg.str());
      }
    }
    const double t_local =
        plan.t0 + h * static_cast<double>(period_steps > 0 ? j % period_steps : j);
    if (plan.method == Method::RK4) {
      psi = rk4_step(model, t_local, h, psi);
    } else if (frozen) {
      psi = apply_exponential(*frozen, h, psi);
    } else {
      psi = midpoint_step(model, t_local, h, psi, plan.backend);
    }

    const double elapsed = std::abs(h) * static_cast<double>(j + 1);
    const double norm2 = psi.squaredNorm();
    if (!std::isfinite(norm2)) {
      throw NumericalError("state became non-finite at step " + std::to_string(j + 1));
    }
    const double dev = std::abs(std::sqrt(norm2 + traj.window_loss) - 1.0);
    if (dev > plan.norm_drift_rate * elapsed + plan.norm_drift_floor) {
      std::ostringstream msg;
      msg << "norm drift " << dev << " after t - t0 = " << elapsed << " exceeds the allowed "
          << plan.norm_drift_rate << " per unit time; reduce plan.dt";
      throw NormDriftError(msg.str());
    }
    if (next_out < outs.size() && outs[next_out] == j + 1) emit(j + 1);
  }
  return traj;
}

}  // namespace blochsim
