#pragma once

// Dense complex linear algebra used throughout the simulator: state vectors,
// Hermitian operators, expectation values and a Hermitian eigensolver with a
// deterministic ordering and phase convention.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

namespace blochsim {

using Index = Eigen::Index;
using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

enum class BasisKind { Site, Fock, DiabaticLZ, AdiabaticIndexed };

std::string_view to_string(BasisKind basis);

/// Module tolerances. Defaults are the documented contract values; scenario
/// configs may override them.
struct Tolerances {
  double hermiticity = 1e-12;    // relative to max|H|
  double degeneracy = 1e-10;     // absolute eigenvalue gap
  double imag_residue = 1e-10;   // allowed Im<psi|H|psi> relative to max|H|
  double variance_floor = 1e-12; // negative variance clamped to zero above this
  double normalization = 1e-9;
};

class StateVector {
 public:
  StateVector(CVector amplitudes, BasisKind basis);

  /// |k> in a basis of dimension `dim`.
  static StateVector basis_state(Index dim, Index k, BasisKind basis);

  Index dim() const { return amplitudes_.size(); }
  BasisKind basis() const { return basis_; }
  const CVector& amplitudes() const { return amplitudes_; }
  cplx operator[](Index i) const { return amplitudes_[i]; }

  double norm() const { return amplitudes_.norm(); }
  bool is_normalized(double tol = 1e-9) const;
  StateVector normalized() const;
  StateVector with_global_phase(double phase) const;

  /// <this|other>
  cplx inner(const StateVector& other) const;
  /// |<this|other>|^2
  double fidelity(const StateVector& other) const;
  /// |amplitudes|^2
  RVector probabilities() const;

 private:
  CVector amplitudes_;
  BasisKind basis_;
};

/// Dense Hermitian matrix, checked on construction.
class HermitianOperator {
 public:
  explicit HermitianOperator(CMatrix matrix, double relative_tolerance = Tolerances{}.hermiticity);
  explicit HermitianOperator(const RMatrix& matrix, double relative_tolerance = Tolerances{}.hermiticity);

  Index dim() const { return matrix_.rows(); }
  const CMatrix& matrix() const { return matrix_; }
  /// max_ij |H - H^dagger|_ij measured at construction
  double asymmetry() const { return asymmetry_; }
  double max_abs() const { return max_abs_; }
  /// True when every imaginary part is exactly zero.
  bool is_real() const { return is_real_; }
  /// True when every element beyond the first off-diagonals is exactly zero.
  bool is_tridiagonal() const { return is_tridiagonal_; }
  bool is_diagonal() const { return is_diagonal_; }

  CVector apply(const CVector& v) const { return matrix_ * v; }

 private:
  void inspect(double relative_tolerance);

  CMatrix matrix_;
  double asymmetry_ = 0.0;
  double max_abs_ = 0.0;
  bool is_real_ = false;
  bool is_tridiagonal_ = false;
  bool is_diagonal_ = false;
};

enum class PhaseConvention { Canonical, Continuity };

struct EigenDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // column k belongs to values[k]
  PhaseConvention phase = PhaseConvention::Canonical;
  /// degenerate[k] is set when |values[k] - values[k +/- 1]| < tolerance
  std::vector<bool> degenerate;

  Index dim() const { return values.size(); }
  bool has_degeneracy() const;
  CVector column(Index k) const { return vectors.col(k); }
};

/// Rotates v so that its largest-magnitude component (lowest index on ties)
/// is real and positive. Returns the phase that was applied.
double canonicalize_phase(Eigen::Ref<CVector> v);

EigenDecomposition eig_hermitian(const HermitianOperator& h, const Tolerances& tol = {});

/// <psi|H|psi> for normalized psi.
double expectation(const StateVector& psi, const HermitianOperator& h, const Tolerances& tol = {});

/// sqrt(<H^2> - <H>^2)
double energy_uncertainty(const StateVector& psi, const HermitianOperator& h,
                          const Tolerances& tol = {});

/// The same from psi and H psi. Moments are divided by |psi|^2 and the
/// result is taken from |(H - <H>) psi|^2, so norm drift cannot make it
/// negative; the raw difference is still checked against the floor.
double energy_uncertainty(const CVector& psi, const CVector& hpsi, const Tolerances& tol = {});

/// V exp(-i diag(values) tau) V^dagger applied to v.
CVector apply_exponential(const EigenDecomposition& eig, double tau, const CVector& v);

}  // namespace blochsim
