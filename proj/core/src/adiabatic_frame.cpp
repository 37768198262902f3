#include "blochsim/adiabatic_frame.hpp"

#include "blochsim/error.hpp"
#include "blochsim/expm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace blochsim {

namespace {

AdiabaticFrame canonical_frame(const HermitianOperator& h, double t) {
  auto eig = eig_hermitian(h);
  AdiabaticFrame f;
  f.t = t;
  f.energies = std::move(eig.values);
  f.states = std::move(eig.vectors);
  f.degenerate = std::move(eig.degenerate);
  f.applied_phases = RVector::Zero(f.energies.size());
  return f;
}

bool all_real(const CMatrix& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

void match_gauge(AdiabaticFrame& frame, const AdiabaticFrame& prev, double min_overlap) {
  if (prev.dim() != frame.dim()) {
    throw DimensionMismatch("continuity frame has a different dimension");
  }
  if (!(frame.t > prev.t)) {
    throw ContractViolation("continuity frame must lie after its reference frame");
  }
  const Index n = frame.dim();
  for (Index k = 0; k < n; ++k) {
    const cplx o = prev.states.col(k).dot(frame.states.col(k));
    const double mag = std::abs(o);
    if (!(mag > min_overlap)) {
      std::ostringstream msg;
      msg << "adiabatic state " << k << " overlaps its predecessor by only " << mag << " between t = "
          << prev.t << " and t = " << frame.t;
      if (frame.degenerate[static_cast<std::size_t>(k)]) {
        msg << " inside a degenerate cluster; evaluate frames away from exact crossings";
        throw DegenerateCrossingError(msg.str());
      }
      msg << "; reduce the frame step";
      throw FrameStepError(msg.str());
    }
    // conj(o)/|o| keeps a real frame exactly real
    const cplx rot = std::conj(o) / mag;
    frame.states.col(k) *= rot;
    frame.applied_phases[k] = std::arg(rot);
  }
  frame.reference_t = prev.t;
}

AdiabaticFrame instantaneous_frame(const HermitianOperator& h, double t, const AdiabaticFrame* prev,
                                   double min_overlap) {
  AdiabaticFrame f = canonical_frame(h, t);
  if (prev) match_gauge(f, *prev, min_overlap);
  return f;
}

std::vector<AdiabaticFrame> frame_series(const Model& model, const std::vector<double>& times,
                                         int threads, double min_overlap) {
  std::vector<AdiabaticFrame> frames(times.size());
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(times.size(), 1));
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < times.size(); i += workers) {
      frames[i] = canonical_frame(model.hamiltonian(times[i]), times[i]);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (std::size_t i = 1; i < frames.size(); ++i) match_gauge(frames[i], frames[i - 1], min_overlap);
  return frames;
}

RVector adiabatic_populations(const StateVector& psi, const AdiabaticFrame& frame) {
  if (psi.dim() != frame.dim()) {
    throw DimensionMismatch("state and frame dimensions differ");
  }
  return (frame.states.adjoint() * psi.amplitudes()).cwiseAbs2();
}

CouplingMatrix numeric_theta(const Model& model, double t, const AdiabaticFrame& frame,
                             double min_gap) {
  const Index n = frame.dim();
  if (model.dim() != n) throw DimensionMismatch("model and frame dimensions differ");
  for (Index k = 0; k + 1 < n; ++k) {
    if (frame.energies[k + 1] - frame.energies[k] < min_gap) {
      std::ostringstream msg;
      msg << "adiabatic gap " << frame.energies[k + 1] - frame.energies[k] << " between levels " << k
          << " and " << k + 1 << " at t = " << t << " is below " << min_gap;
      throw DegenerateCrossingError(msg.str());
    }
  }
  const HermitianOperator dh = model.hamiltonian_derivative(t);
  CMatrix proj;
  if (dh.is_real() && all_real(frame.states)) {
    const RMatrix v = frame.states.real();
    const RMatrix d = dh.matrix().real();
    RMatrix w;
    if (dh.is_diagonal()) {
      w = d.diagonal().asDiagonal() * v;
    } else {
      w = d * v;
    }
    proj = (v.transpose() * w).cast<cplx>();
  } else {
    proj = frame.states.adjoint() * dh.matrix() * frame.states;
  }
  CouplingMatrix out;
  out.t = t;
  out.theta = CMatrix::Zero(n, n);
  const cplx i{0.0, 1.0};
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < n; ++r) {
      if (r != c) out.theta(r, c) = i * proj(r, c) / (frame.energies[c] - frame.energies[r]);
    }
  }
  return out;
}

RVector time_averaged_energies(const std::function<RVector(double)>& energies, double period,
                               int n_quad, double t0) {
  if (n_quad < 8) throw ConfigError("time average needs at least 8 quadrature points");
  if (!(period > 0.0)) throw ConfigError("time average needs a positive period");
  // periodic integrand: the trapezoid rule reduces to the plain mean of n_quad samples
  RVector acc = energies(t0);
  for (int k = 1; k < n_quad; ++k) {
    acc += energies(t0 + period * k / n_quad);
  }
  return acc / n_quad;
}

RVector time_averaged_energies(const Model& model, int n_quad, double t0) {
  std::optional<double> period = model.drive_period();
  if (!period) period = model.recentering_period();
  if (!period) throw ConfigError("time average needs a periodic model");
  return time_averaged_energies(
      [&](double t) { return eig_hermitian(model.hamiltonian(t)).values; }, *period, n_quad, t0);
}

CMatrix adiabatic_generator(const AdiabaticFrame& frame, const CouplingMatrix& theta, CouplingMode mode) {
  const Index n = frame.dim();
  if (theta.theta.rows() != n) throw DimensionMismatch("coupling matrix does not match the frame");
  CMatrix g = -theta.theta;
  if (mode == CouplingMode::NearestNeighbor) {
    for (Index c = 0; c < n; ++c) {
      for (Index r = 0; r < n; ++r) {
        if (std::abs(r - c) != 1) g(r, c) = 0.0;
      }
    }
  }
  g.diagonal() = frame.energies.cast<cplx>();
  return g;
}

AdiabaticGenerator AdiabaticGenerator::from_series(std::vector<AdiabaticFrame> frames,
                                                   std::vector<CouplingMatrix> thetas, CouplingMode mode) {
  if (frames.size() != thetas.size()) {
    throw DimensionMismatch("frame and coupling series differ in length");
  }
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const Index n = frames[i].dim();
    for (Index k = 0; k < n; ++k) {
      const cplx o = frames[i - 1].states.col(k).dot(frames[i].states.col(k));
      if (!(o.real() > 0.0)) {
        std::ostringstream msg;
        msg << "frame series is not continuity gauged: state " << k << " flips between t = "
            << frames[i - 1].t << " and t = " << frames[i].t;
        throw GaugeError(msg.str());
      }
    }
  }
  AdiabaticGenerator g;
  g.frames_ = std::move(frames);
  g.thetas_ = std::move(thetas);
  g.mode_ = mode;
  return g;
}

CMatrix AdiabaticGenerator::at(std::size_t k) const {
  return adiabatic_generator(frames_.at(k), thetas_.at(k), mode_);
}

FramePropagation propagate_adiabatic_frame(const Model& model, const StateVector& psi0, double t0,
                                           double t1, int steps, CouplingMode mode) {
  if (steps < 1 || !(t1 > t0)) throw ConfigError("frame propagation needs t1 > t0 and steps >= 1");
  if (psi0.dim() != model.dim()) throw DimensionMismatch("initial state does not match the model");
  const double dt = (t1 - t0) / steps;

  AdiabaticFrame frame = instantaneous_frame(model.hamiltonian(t0), t0);
  const CVector start = frame.states.adjoint() * psi0.amplitudes();
  CVector tilde = start;
  for (int j = 0; j < steps; ++j) {
    const double tm = t0 + (j + 0.5) * dt;
    frame = instantaneous_frame(model.hamiltonian(tm), tm, &frame);
    const CMatrix g = adiabatic_generator(frame, numeric_theta(model, tm, frame), mode);
    const LinearMap map = [&g](const CVector& in, CVector& out) { out.noalias() = g * in; };
    tilde = expm_action(map, gershgorin_bounds(g), dt, tilde);
  }
  frame = instantaneous_frame(model.hamiltonian(t1), t1, &frame);
  CVector back = frame.states * tilde;
  return FramePropagation{StateVector(start, BasisKind::AdiabaticIndexed),
                          StateVector(tilde, BasisKind::AdiabaticIndexed),
                          StateVector(std::move(back), model.basis()), std::move(frame)};
}

}  // namespace blochsim
