#pragma once

// Instantaneous eigenbasis tracked smoothly in time, the couplings between
// its members and the generator of the dynamics expressed in that basis.

#include "blochsim/models.hpp"
#include "blochsim/quantum_core.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace blochsim {

struct AdiabaticFrame {
  double t = 0.0;
  RVector energies;  // ascending
  CMatrix states;    // column k belongs to energies[k]
  std::vector<bool> degenerate;
  /// Time of the frame this one was phase-matched against; empty for a
  /// canonically phased frame.
  std::optional<double> reference_t;
  /// Phase applied to each column on top of the canonical convention.
  RVector applied_phases;

  Index dim() const { return energies.size(); }
};

/// Frame of H at time t. With `prev`, each column is rotated so that
/// <prev_k|v_k> is real and positive; the diagonal of the overlap matrix must
/// exceed `min_overlap` in magnitude or a FrameStepError is raised.
AdiabaticFrame instantaneous_frame(const HermitianOperator& h, double t,
                                   const AdiabaticFrame* prev = nullptr,
                                   double min_overlap = 0.9);

/// Rotates the columns of `frame` onto the continuity gauge of `prev`.
void match_gauge(AdiabaticFrame& frame, const AdiabaticFrame& prev, double min_overlap = 0.9);

/// Frames at the given increasing times. Diagonalizations run on up to
/// `threads` workers; the continuity phases are fixed afterwards in one
/// sequential sweep so the result does not depend on the thread count.
std::vector<AdiabaticFrame> frame_series(const Model& model, const std::vector<double>& times,
                                         int threads = 1, double min_overlap = 0.9);

/// P_n = |<v_n|psi>|^2
RVector adiabatic_populations(const StateVector& psi, const AdiabaticFrame& frame);

struct CouplingMatrix {
  double t = 0.0;
  CMatrix theta;  // Hermitian, zero diagonal
};

/// Theta_mn = i <v_m|dH/dt|v_n> / (E_n - E_m) for m != n and 0 on the
/// diagonal. This is i<v_m|d_t v_n> in the parallel-transport gauge.
/// Gaps below `min_gap` raise DegenerateCrossingError.
CouplingMatrix numeric_theta(const Model& model, double t, const AdiabaticFrame& frame,
                             double min_gap = 1e-8);

/// Trapezoid average over one period of the rank-ordered instantaneous
/// energies, sampled at t0 + k T / n_quad.
RVector time_averaged_energies(const Model& model, int n_quad, double t0 = 0.0);
RVector time_averaged_energies(const std::function<RVector(double)>& energies, double period,
                               int n_quad, double t0 = 0.0);

enum class CouplingMode { Full, NearestNeighbor };

/// G(t) = D(t) - Theta(t) on a series of continuity-gauged frames.
class AdiabaticGenerator {
 public:
  /// Validates that consecutive frames carry no sign flips (GaugeError otherwise).
  static AdiabaticGenerator from_series(std::vector<AdiabaticFrame> frames,
                                        std::vector<CouplingMatrix> thetas, CouplingMode mode);

  std::size_t size() const { return frames_.size(); }
  const AdiabaticFrame& frame(std::size_t k) const { return frames_[k]; }
  CouplingMode mode() const { return mode_; }
  /// Dense generator at series entry k.
  CMatrix at(std::size_t k) const;

 private:
  std::vector<AdiabaticFrame> frames_;
  std::vector<CouplingMatrix> thetas_;
  CouplingMode mode_ = CouplingMode::Full;
};

/// Generator from one frame and its coupling matrix.
CMatrix adiabatic_generator(const AdiabaticFrame& frame, const CouplingMatrix& theta,
                            CouplingMode mode);

struct FramePropagation {
  StateVector initial_adiabatic;  // U(t0)^dagger psi0
  StateVector final_adiabatic;    // tilde psi(t1)
  StateVector final_state;        // rotated back to the model basis
  AdiabaticFrame final_frame;
};

/// Integrates i d/dt tilde psi = G tilde psi from t0 to t1 in `steps` midpoint
/// steps. Frames are built at t0, at every step midpoint and at t1, chained
/// by continuity.
FramePropagation propagate_adiabatic_frame(const Model& model, const StateVector& psi0, double t0,
                                           double t1, int steps, CouplingMode mode);

}  // namespace blochsim
