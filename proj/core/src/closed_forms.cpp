#include "blochsim/error.hpp"
#include "blochsim/models.hpp"
#include "blochsim/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace blochsim {

double single_band_eigenstate_oracle(int m, int n, const SingleBandSpec& spec) {
  if (spec.disorder && spec.disorder->std_dev != 0.0) {
    throw ContractViolation("Bessel eigenstates exist only for the clean lattice");
  }
  return bessel_j(n - m, 2.0 * spec.J / spec.omega);
}

double ho_adiabatic_energy(int n, double t, const DrivenHOSpec& spec) {
  if (n < 0) throw ContractViolation("Fock index must be >= 0");
  const double s = std::sin(spec.Omega * t);
  return spec.omega * n - spec.J * spec.J * s * s / (2.0 * spec.omega);
}

StateVector ho_adiabatic_state(int n, double t, const DrivenHOSpec& spec) {
  if (n < 0 || n >= spec.n_fock) {
    throw ContractViolation("Fock index outside the truncated space");
  }
  // H = omega b^dagger b + const with b = a + f/(omega sqrt 2), so the ground
  // state is the coherent state of amplitude -f/(omega sqrt 2).
  const double alpha = -spec.J * std::sin(spec.Omega * t) / (spec.omega * std::numbers::sqrt2);
  CVector fock = CVector::Zero(spec.n_fock);
  fock[n] = 1.0;
  CVector psi = displace(fock, cplx{alpha, 0.0});
  const Index edge = std::max<Index>(0, spec.n_fock - 10);
  const double tail = psi.tail(spec.n_fock - edge).squaredNorm();
  if (tail > 1e-10) {
    std::ostringstream msg;
    msg << "displaced Fock state " << n << " leaves mass " << tail
        << " in the top levels; increase n_fock";
    throw TruncationError(msg.str());
  }
  return StateVector(std::move(psi), BasisKind::Fock).normalized();
}

double ho_theta(int m, int n, double t, const DrivenHOSpec& spec) {
  if (m == n) throw ContractViolation("diagonal coupling is fixed to zero by the gauge");
  if (m < 0 || n < 0) throw ContractViolation("Fock index must be >= 0");
  double x = 0.0;
  if (m == n - 1) x = std::sqrt(static_cast<double>(n));
  if (m == n + 1) x = std::sqrt(static_cast<double>(n + 1));
  if (x == 0.0) return 0.0;
  return spec.J * spec.Omega * std::cos(spec.Omega * t) / ((m - n) * spec.omega) * x /
         std::numbers::sqrt2;
}

double lz_adiabatic_energy(int m, Branch branch, double t, const LZGridSpec& spec) {
  const double pj2 = std::numbers::pi * std::numbers::pi * spec.J * spec.J;
  const double w2 = spec.omega * spec.omega;
  const double c = (w2 - pj2) / (w2 + pj2);
  const double arg = std::clamp(c * std::cos(2.0 * std::numbers::pi * spec.lambda * t / spec.omega), -1.0, 1.0);
  const double offset = spec.omega / (2.0 * std::numbers::pi) * std::acos(arg);
  return (branch == Branch::Plus ? offset : -offset) + m * spec.omega;
}

RVector lz_adiabatic_ladder(double t, const LZGridSpec& spec, int half_width) {
  RVector out(2 * (2 * half_width + 1));
  Index k = 0;
  for (int m = -half_width; m <= half_width; ++m) {
    out[k++] = lz_adiabatic_energy(m, Branch::Plus, t, spec);
    out[k++] = lz_adiabatic_energy(m, Branch::Minus, t, spec);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double lz_transition_probability(const LZGridSpec& spec) {
  return std::exp(-std::numbers::pi * spec.J * spec.J / spec.lambda);
}

}  // namespace blochsim
