#include "blochsim/coherent_oracle.hpp"

#include <cmath>
#include <numbers>

namespace blochsim {

namespace {

// integral_0^t exp(i delta s) ds = t exp(i delta t/2) sinc(delta t/2)
cplx phase_integral(double delta, double t) {
  const double x = 0.5 * delta * t;
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return t * sinc * std::polar(1.0, x);
}

}  // namespace

cplx coherent_amplitude(cplx alpha0, const DrivenHOSpec& spec, double t) {
  const cplx i{0.0, 1.0};
  // integral_0^t exp(i omega s) sin(Omega s) ds
  const cplx drive = (phase_integral(spec.omega + spec.Omega, t) -
                      phase_integral(spec.omega - spec.Omega, t)) / (2.0 * i);
  return std::polar(1.0, -spec.omega * t) * (alpha0 - i * (spec.J / std::numbers::sqrt2) * drive);
}

CVector coherent_fock_amplitudes(cplx alpha, Index n_fock) {
  CVector c = CVector::Zero(n_fock);
  const double r = std::abs(alpha);
  const double phi = std::arg(alpha);
  if (r == 0.0) {
    c[0] = 1.0;
    return c;
  }
  for (Index n = 0; n < n_fock; ++n) {
    const double nn = static_cast<double>(n);
    const double log_mag = -0.5 * r * r + nn * std::log(r) - 0.5 * std::lgamma(nn + 1.0);
    c[n] = std::polar(std::exp(log_mag), nn * phi);
  }
  return c;
}

StateVector driven_ho_coherent_oracle(cplx alpha0, const DrivenHOSpec& spec, double t) {
  return StateVector(coherent_fock_amplitudes(coherent_amplitude(alpha0, spec, t), spec.n_fock),
                     BasisKind::Fock)
      .normalized();
}

}  // namespace blochsim
