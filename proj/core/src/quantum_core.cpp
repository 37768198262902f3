#include "blochsim/quantum_core.hpp"

#include "blochsim/error.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace blochsim {

std::string_view to_string(BasisKind basis) {
  switch (basis) {
    case BasisKind::Site:
      return "site";
    case BasisKind::Fock:
      return "fock";
    case BasisKind::DiabaticLZ:
      return "diabatic_lz";
    case BasisKind::AdiabaticIndexed:
      return "adiabatic";
  }
  return "unknown";
}

// ---------------------------------------------------------------- StateVector

StateVector::StateVector(CVector amplitudes, BasisKind basis)
    : amplitudes_(std::move(amplitudes)), basis_(basis) {
  if (amplitudes_.size() < 1) {
    throw ConfigError("StateVector needs dimension >= 1");
  }
}

StateVector StateVector::basis_state(Index dim, Index k, BasisKind basis) {
  if (k < 0 || k >= dim) {
    std::ostringstream msg;
    msg << "basis index " << k << " outside [0, " << dim << ")";
    throw ConfigError(msg.str());
  }
  CVector v = CVector::Zero(dim);
  v[k] = 1.0;
  return StateVector(std::move(v), basis);
}

bool StateVector::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

StateVector StateVector::normalized() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw NumericalError("cannot normalize a zero or non-finite state");
  }
  return StateVector(amplitudes_ / n, basis_);
}

StateVector StateVector::with_global_phase(double phase) const {
  return StateVector(amplitudes_ * std::polar(1.0, phase), basis_);
}

cplx StateVector::inner(const StateVector& other) const {
  if (other.dim() != dim()) {
    throw DimensionMismatch("inner product of states with different dimensions");
  }
  return amplitudes_.dot(other.amplitudes_);
}

double StateVector::fidelity(const StateVector& other) const { return std::norm(inner(other)); }

RVector StateVector::probabilities() const { return amplitudes_.cwiseAbs2(); }

// ---------------------------------------------------------- HermitianOperator

HermitianOperator::HermitianOperator(CMatrix matrix, double relative_tolerance)
    : matrix_(std::move(matrix)) {
  inspect(relative_tolerance);
}

HermitianOperator::HermitianOperator(const RMatrix& matrix, double relative_tolerance)
    : matrix_(matrix.cast<cplx>()) {
  inspect(relative_tolerance);
}

void HermitianOperator::inspect(double relative_tolerance) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1) {
    throw DimensionMismatch("Hermitian operator must be square and non-empty");
  }
  const Index n = matrix_.rows();
  max_abs_ = matrix_.cwiseAbs().maxCoeff();
  is_real_ = matrix_.imag().cwiseAbs().maxCoeff() == 0.0;

  asymmetry_ = 0.0;
  Index worst_i = 0;
  Index worst_j = 0;
  is_tridiagonal_ = true;
  is_diagonal_ = true;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double d = std::abs(matrix_(i, j) - std::conj(matrix_(j, i)));
      if (d > asymmetry_) {
        asymmetry_ = d;
        worst_i = std::min(i, j);
        worst_j = std::max(i, j);
      }
      if (matrix_(i, j) != cplx{0.0, 0.0}) {
        const Index off = i > j ? i - j : j - i;
        if (off > 0) is_diagonal_ = false;
        if (off > 1) is_tridiagonal_ = false;
      }
    }
  }
  if (asymmetry_ > relative_tolerance * max_abs_) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "operator is not Hermitian: |H - H^dagger| = " << asymmetry_ << " at element (" << worst_i
        << ", " << worst_j << "), tolerance " << relative_tolerance * max_abs_;
    throw HermiticityError(msg.str());
  }
  // Symmetrize exactly so downstream solvers see a Hermitian matrix.
  if (asymmetry_ > 0.0) {
    CMatrix sym = 0.5 * (matrix_ + matrix_.adjoint());
    matrix_ = std::move(sym);
  }
  for (Index i = 0; i < n; ++i) matrix_(i, i) = matrix_(i, i).real();
}

// -------------------------------------------------------------------- eig

bool EigenDecomposition::has_degeneracy() const {
  return std::any_of(degenerate.begin(), degenerate.end(), [](bool b) { return b; });
}

double canonicalize_phase(Eigen::Ref<CVector> v) {
  Index best = 0;
  double best_mag = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    // strict comparison with a relative margin keeps the choice stable under round-off
    const double mag = std::abs(v[i]);
    if (mag > best_mag * (1.0 + 1e-12)) {
      best_mag = mag;
      best = i;
    }
  }
  if (best_mag <= 0.0) return 0.0;
  const double phase = -std::arg(v[best]);
  v *= std::polar(1.0, phase);
  v[best] = std::abs(v[best]);
  return phase;
}

namespace {

void solve_real_tridiagonal(const HermitianOperator& h, RVector& values, RMatrix& vectors) {
  const Index n = h.dim();
  RVector diag = h.matrix().diagonal().real();
  RVector sub = n > 1 ? RVector(h.matrix().diagonal(-1).real()) : RVector(1);
  vectors.resize(n, n);
  const lapack_int info = LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', static_cast<lapack_int>(n),
                                         diag.data(), sub.data(), vectors.data(),
                                         static_cast<lapack_int>(n));
  if (info != 0) {
    throw NumericalError("LAPACK dstevd failed with info = " + std::to_string(info));
  }
  values = std::move(diag);
}

void solve_real_dense(const HermitianOperator& h, RVector& values, RMatrix& vectors) {
  const Index n = h.dim();
  vectors = h.matrix().real();
  values.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
                                         vectors.data(), static_cast<lapack_int>(n), values.data());
  if (info != 0) {
    throw NumericalError("LAPACK dsyevd failed with info = " + std::to_string(info));
  }
}

bool lexicographically_before(const CVector& a, const CVector& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() > b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() > b[i].imag();
  }
  return false;
}

}  // namespace

EigenDecomposition eig_hermitian(const HermitianOperator& h, const Tolerances& tol) {
  const Index n = h.dim();
  EigenDecomposition out;

  if (h.is_diagonal()) {
    RVector diag = h.matrix().diagonal().real();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return diag[a] < diag[b]; });
    out.values.resize(n);
    out.vectors = CMatrix::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
      out.values[k] = diag[order[static_cast<std::size_t>(k)]];
      out.vectors(order[static_cast<std::size_t>(k)], k) = 1.0;
    }
  } else if (h.is_real()) {
    RMatrix vecs;
    if (h.is_tridiagonal()) {
      solve_real_tridiagonal(h, out.values, vecs);
    } else {
      solve_real_dense(h, out.values, vecs);
    }
    out.vectors = vecs.cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) {
      throw NumericalError("complex Hermitian eigensolver did not converge");
    }
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
  }

  for (Index k = 0; k < n; ++k) {
    canonicalize_phase(out.vectors.col(k));
  }

  out.degenerate.assign(static_cast<std::size_t>(n), false);
  Index start = 0;
  while (start < n) {
    Index end = start + 1;
    while (end < n && out.values[end] - out.values[end - 1] < tol.degeneracy) ++end;
    if (end - start > 1) {
      std::vector<Index> cols(static_cast<std::size_t>(end - start));
      std::iota(cols.begin(), cols.end(), start);
      std::vector<CVector> copies;
      copies.reserve(cols.size());
      for (Index c : cols) copies.emplace_back(out.vectors.col(c));
      std::vector<std::size_t> perm(cols.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return lexicographically_before(copies[a], copies[b]);
      });
      for (std::size_t k = 0; k < perm.size(); ++k) {
        out.vectors.col(start + static_cast<Index>(k)) = copies[perm[k]];
        out.degenerate[static_cast<std::size_t>(start) + k] = true;
      }
    }
    start = end;
  }
  return out;
}

// ------------------------------------------------------------ expectations

namespace {

void check_dims(const StateVector& psi, const HermitianOperator& h) {
  if (psi.dim() != h.dim()) {
    std::ostringstream msg;
    msg << "state dimension " << psi.dim() << " does not match operator dimension " << h.dim();
    throw DimensionMismatch(msg.str());
  }
}

}  // namespace

double expectation(const StateVector& psi, const HermitianOperator& h, const Tolerances& tol) {
  check_dims(psi, h);
  const cplx value = psi.amplitudes().dot(h.matrix() * psi.amplitudes());
  if (std::abs(value.imag()) > tol.imag_residue * std::max(1.0, h.max_abs())) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "expectation value has imaginary residue " << value.imag();
    throw NumericalError(msg.str());
  }
  return value.real();
}

double energy_uncertainty(const StateVector& psi, const HermitianOperator& h,
                          const Tolerances& tol) {
  check_dims(psi, h);
  return energy_uncertainty(psi.amplitudes(), CVector(h.matrix() * psi.amplitudes()), tol);
}

double energy_uncertainty(const CVector& psi, const CVector& hpsi, const Tolerances& tol) {
  const double n2 = psi.squaredNorm();
  const double mean = psi.dot(hpsi).real() / n2;
  const double second = hpsi.squaredNorm() / n2;
  const double raw = second - mean * mean;
  if (raw < -tol.variance_floor * std::max(1.0, second)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "negative energy variance " << raw;
    throw NumericalError(msg.str());
  }
  return std::sqrt((hpsi - mean * psi).squaredNorm() / n2);
}

CVector apply_exponential(const EigenDecomposition& eig, double tau, const CVector& v) {
  CVector coeffs = eig.vectors.adjoint() * v;
  for (Index k = 0; k < coeffs.size(); ++k) {
    coeffs[k] *= std::polar(1.0, -eig.values[k] * tau);
  }
  return eig.vectors * coeffs;
}

}  // namespace blochsim
