#pragma once

// Action of the unitary exp(-i tau A) on a vector for a Hermitian A that is
// only available as a matrix-vector product.

#include "blochsim/quantum_core.hpp"

#include <functional>

namespace blochsim {

/// Interval guaranteed to contain the spectrum of a Hermitian operator.
struct SpectralBounds {
  double lower = 0.0;
  double upper = 0.0;

  double center() const { return 0.5 * (lower + upper); }
  double radius() const { return 0.5 * (upper - lower); }
};

using LinearMap = std::function<void(const CVector& in, CVector& out)>;

struct TaylorStats {
  int substeps = 0;
  int products = 0;
};

/// exp(-i tau A) v by a truncated Taylor series on the shifted operator
/// A - center, split into substeps with |tau| * radius <= 4 each. Terms are
/// added until the last one drops below `tol` relative to the partial sum.
CVector expm_action(const LinearMap& a, const SpectralBounds& bounds, double tau,
                    const CVector& v, double tol = 1e-16, TaylorStats* stats = nullptr);

/// Gershgorin interval of a dense Hermitian matrix.
SpectralBounds gershgorin_bounds(const CMatrix& h);

}  // namespace blochsim
