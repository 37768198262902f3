#pragma once

// Exact coherent-state solution of the driven oscillator, kept independent of
// the propagator and of the truncated displacement exponential.

#include "blochsim/models.hpp"

namespace blochsim {

/// alpha(t) solving d alpha/dt = -i omega alpha - i (J/sqrt 2) sin(Omega t).
/// Well defined at Omega = omega, where the drive is resonant.
cplx coherent_amplitude(cplx alpha0, const DrivenHOSpec& spec, double t);

/// Fock amplitudes exp(-|alpha|^2/2) alpha^n / sqrt(n!) for n < n_fock, not renormalized.
CVector coherent_fock_amplitudes(cplx alpha, Index n_fock);

/// |alpha(t)> on the truncated Fock space, renormalized. The global
/// dynamical phase is omitted.
StateVector driven_ho_coherent_oracle(cplx alpha0, const DrivenHOSpec& spec, double t);

}  // namespace blochsim
