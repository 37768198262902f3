#include "blochsim/models.hpp"

#include "blochsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace blochsim {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void validate_disorder(const std::optional<Disorder>& d, const char* path) {
  if (!d) return;
  require(std::isfinite(d->std_dev) && d->std_dev >= 0.0,
          std::string(path) + ".disorder.std_dev must be finite and >= 0");
}

// Gauss-Legendre rule on [0, 1] from the Jacobi matrix (Golub-Welsch).
void gauss_legendre_unit(int k, RVector& nodes, RVector& weights) {
  RMatrix jac = RMatrix::Zero(k, k);
  for (int i = 1; i < k; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jac(i, i - 1) = b;
    jac(i - 1, i) = b;
  }
  const auto eig = eig_hermitian(HermitianOperator(jac));
  nodes.resize(k);
  weights.resize(k);
  for (int i = 0; i < k; ++i) {
    nodes[i] = 0.5 * (eig.values[i] + 1.0);
    weights[i] = std::norm(eig.vectors(0, i));  // 2 v0^2 on [-1, 1], halved
  }
}

}  // namespace

RVector draw_disorder(const Disorder& disorder, Index count) {
  RVector xi = RVector::Zero(count);
  if (disorder.std_dev == 0.0) return xi;
  std::mt19937_64 rng(disorder.seed);
  std::normal_distribution<double> dist(0.0, disorder.std_dev);
  for (Index i = 0; i < count; ++i) xi[i] = dist(rng);
  return xi;
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::SingleBand:
      return "single_band";
    case ModelKind::DrivenHO:
      return "driven_ho";
    case ModelKind::LZGrid:
      return "lz_grid";
  }
  return "unknown";
}

void SingleBandSpec::validate() const {
  require(std::isfinite(J) && J > 0.0, "model.params.J must be > 0");
  require(std::isfinite(omega) && omega > 0.0, "model.params.omega must be > 0");
  require(n_sites >= 1 && n_sites % 2 == 1, "model.params.n_sites must be a positive odd integer");
  validate_disorder(disorder, "model");
}

void DrivenHOSpec::validate() const {
  require(std::isfinite(omega) && omega > 0.0, "model.params.omega must be > 0");
  require(std::isfinite(J), "model.params.J must be finite");
  require(std::isfinite(Omega) && Omega > 0.0, "model.params.Omega must be > 0");
  require(n_fock >= 2, "model.params.n_fock must be >= 2");
  validate_disorder(disorder, "model");
}

double DrivenHOSpec::drive_period() const { return 2.0 * std::numbers::pi / Omega; }

void LZGridSpec::validate() const {
  require(std::isfinite(omega) && omega > 0.0, "model.params.omega must be > 0");
  require(std::isfinite(lambda) && lambda > 0.0, "model.params.lambda must be > 0");
  require(std::isfinite(J), "model.params.J must be finite");
  require(n_levels >= 3 && n_levels % 2 == 1, "model.params.n_levels must be an odd integer >= 3");
  require(tail_nodes >= 0 && tail_nodes <= 64, "model.params.tail_nodes must lie in [0, 64]");
}

double Model::recenter(CVector& /*amplitudes*/) const {
  throw ContractViolation("model has no moving window to re-center");
}

CVector Model::unshift(const CVector& amplitudes, long shift) const {
  if (shift != 0) throw ContractViolation("model has no moving window to undo");
  return amplitudes;
}

// ------------------------------------------------------------ single band

SingleBandLattice::SingleBandLattice(SingleBandSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int half = spec_.half_width();
  onsite_.resize(spec_.n_sites);
  for (int i = 0; i < spec_.n_sites; ++i) onsite_[i] = spec_.omega * (i - half);
  if (spec_.disorder) onsite_ += draw_disorder(*spec_.disorder, spec_.n_sites);
}

HermitianOperator SingleBandLattice::hamiltonian(double /*t*/) const {
  const Index n = dim();
  RMatrix h = RMatrix::Zero(n, n);
  h.diagonal() = onsite_;
  for (Index i = 0; i + 1 < n; ++i) {
    h(i, i + 1) = -spec_.J;
    h(i + 1, i) = -spec_.J;
  }
  return HermitianOperator(h);
}

HermitianOperator SingleBandLattice::hamiltonian_derivative(double /*t*/) const {
  return HermitianOperator(RMatrix(RMatrix::Zero(dim(), dim())));
}

void SingleBandLattice::apply(double /*t*/, const CVector& in, CVector& out) const {
  const Index n = dim();
  out = onsite_.cwiseProduct(in);
  out.head(n - 1) -= spec_.J * in.tail(n - 1);
  out.tail(n - 1) -= spec_.J * in.head(n - 1);
}

SpectralBounds SingleBandLattice::spectral_bounds(double /*t*/) const {
  return {onsite_.minCoeff() - 2.0 * spec_.J, onsite_.maxCoeff() + 2.0 * spec_.J};
}

double SingleBandLattice::shortest_period() const { return 2.0 * std::numbers::pi / spec_.omega; }

// ------------------------------------------------------------ driven oscillator

DrivenOscillator::DrivenOscillator(DrivenHOSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const Index n = spec_.n_fock;
  bare_.resize(n);
  for (Index i = 0; i < n; ++i) bare_[i] = spec_.omega * static_cast<double>(i);
  if (spec_.disorder) bare_ += draw_disorder(*spec_.disorder, n);
  x_off_.resize(n - 1);
  for (Index i = 0; i + 1 < n; ++i) x_off_[i] = std::sqrt(static_cast<double>(i + 1) / 2.0);
}

double DrivenOscillator::drive(double t) const {
  const double tr = std::fmod(t, spec_.drive_period());
  return spec_.J * std::sin(spec_.Omega * tr);
}

double DrivenOscillator::drive_rate(double t) const {
  const double tr = std::fmod(t, spec_.drive_period());
  return spec_.J * spec_.Omega * std::cos(spec_.Omega * tr);
}

HermitianOperator DrivenOscillator::hamiltonian(double t) const {
  const Index n = dim();
  const double f = drive(t);
  RMatrix h = RMatrix::Zero(n, n);
  h.diagonal() = bare_;
  for (Index i = 0; i + 1 < n; ++i) {
    h(i + 1, i) = f * x_off_[i];
    h(i, i + 1) = f * x_off_[i];
  }
  return HermitianOperator(h);
}

HermitianOperator DrivenOscillator::hamiltonian_derivative(double t) const {
  const Index n = dim();
  const double g = drive_rate(t);
  RMatrix h = RMatrix::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) {
    h(i + 1, i) = g * x_off_[i];
    h(i, i + 1) = g * x_off_[i];
  }
  return HermitianOperator(h);
}

void DrivenOscillator::apply(double t, const CVector& in, CVector& out) const {
  const Index n = dim();
  const double f = drive(t);
  out = bare_.cwiseProduct(in);
  out.head(n - 1) += f * x_off_.cwiseProduct(in.tail(n - 1));
  out.tail(n - 1) += f * x_off_.cwiseProduct(in.head(n - 1));
}

SpectralBounds DrivenOscillator::spectral_bounds(double t) const {
  // Gershgorin with the largest off-diagonal row sum
  const double f = std::abs(drive(t));
  const double reach = 2.0 * f * x_off_.maxCoeff();
  return {bare_.minCoeff() - reach, bare_.maxCoeff() + reach};
}

double DrivenOscillator::shortest_period() const {
  const double two_pi = 2.0 * std::numbers::pi;
  return std::min(two_pi / spec_.Omega, two_pi / spec_.omega);
}

// ------------------------------------------------------------ LZ grid

LandauZenerGrid::LandauZenerGrid(LZGridSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int half = spec_.half_width();
  const int k = spec_.tail_nodes;
  const Index per = spec_.levels_per_branch();
  energies_.resize(per);
  weights_ = RVector::Ones(per);

  for (int i = 0; i < spec_.n_levels; ++i) energies_[k + i] = spec_.omega * (half - i);

  if (k > 0) {
    // Each ladder beyond |m| > L is replaced by k levels at s_j omega whose
    // couplings carry the quadrature weight of the sum they stand for. The
    // substitution s = S/u maps the tail to u in (0, 1]; the explicit edge
    // levels get the Euler-Maclaurin end correction.
    RVector u;
    RVector wq;
    gauss_legendre_unit(k, u, wq);
    const double s_edge = half + 0.5;
    for (int j = 0; j < k; ++j) {
      // u ascending gives s descending, so the upper tail fills indices 0..k-1
      const double s = s_edge / u[j];
      const double w = wq[j] * s_edge / (u[j] * u[j]);
      energies_[j] = spec_.omega * s;
      weights_[j] = w;
      energies_[per - 1 - j] = -spec_.omega * s;
      weights_[per - 1 - j] = w;
    }
    weights_[k] = weights_[per - 1 - k] = 25.0 / 24.0;
    weights_[k + 1] = weights_[per - 2 - k] = 23.0 / 24.0;
  }
  weight_norm2_ = weights_.sum();
}

RVector LandauZenerGrid::diabatic_energies(double t) const {
  const Index per = spec_.levels_per_branch();
  RVector e(2 * per);
  e.head(per) = energies_.array() + spec_.lambda * t;
  e.tail(per) = energies_.array() - spec_.lambda * t;
  return e;
}

HermitianOperator LandauZenerGrid::hamiltonian(double t) const {
  const Index per = spec_.levels_per_branch();
  const RVector v = weights_.cwiseSqrt();
  RMatrix h = RMatrix::Zero(2 * per, 2 * per);
  h.diagonal() = diabatic_energies(t);
  const RMatrix cross = spec_.J * v * v.transpose();
  h.topRightCorner(per, per) = cross;
  h.bottomLeftCorner(per, per) = cross;
  return HermitianOperator(h);
}

HermitianOperator LandauZenerGrid::hamiltonian_derivative(double /*t*/) const {
  const Index per = spec_.levels_per_branch();
  RMatrix h = RMatrix::Zero(2 * per, 2 * per);
  h.diagonal().head(per).setConstant(spec_.lambda);
  h.diagonal().tail(per).setConstant(-spec_.lambda);
  return HermitianOperator(h);
}

void LandauZenerGrid::apply(double t, const CVector& in, CVector& out) const {
  const Index per = spec_.levels_per_branch();
  const RVector v = weights_.cwiseSqrt();
  const cplx plus = spec_.J * v.cast<cplx>().dot(in.head(per));
  const cplx minus = spec_.J * v.cast<cplx>().dot(in.tail(per));
  out.resize(2 * per);
  out.head(per) = (energies_.array() + spec_.lambda * t).matrix().cast<cplx>().cwiseProduct(in.head(per)) +
                  minus * v.cast<cplx>();
  out.tail(per) = (energies_.array() - spec_.lambda * t).matrix().cast<cplx>().cwiseProduct(in.tail(per)) +
                  plus * v.cast<cplx>();
}

SpectralBounds LandauZenerGrid::spectral_bounds(double t) const {
  // The coupling part has eigenvalues +/- J |v|^2 and zeros, so Weyl's
  // inequality bounds the spectrum by the diagonal range widened by that.
  const double reach = std::abs(spec_.J) * weight_norm2_;
  const double shift = std::abs(spec_.lambda * t);
  return {energies_.minCoeff() - shift - reach, energies_.maxCoeff() + shift + reach};
}

double LandauZenerGrid::shortest_period() const {
  return std::min(spec_.period(), 4.0 * std::numbers::pi / spec_.omega);
}

double LandauZenerGrid::recenter(CVector& amplitudes) const {
  // After one window period the + ladder has risen by omega and the - ladder
  // has fallen by omega, so explicit amplitudes move one label along.
  if (amplitudes.size() != dim()) {
    throw DimensionMismatch("recenter: state dimension does not match the grid");
  }
  const Index per = spec_.levels_per_branch();
  const Index a = first_explicit();
  const Index b = last_explicit();
  double lost = std::norm(amplitudes[a]) + std::norm(amplitudes[per + b]);
  for (Index i = a; i < b; ++i) amplitudes[i] = amplitudes[i + 1];
  amplitudes[b] = 0.0;
  for (Index i = per + b; i > per + a; --i) amplitudes[i] = amplitudes[i - 1];
  amplitudes[per + a] = 0.0;
  return lost;
}

CVector LandauZenerGrid::unshift(const CVector& amplitudes, long shift) const {
  if (amplitudes.size() != dim()) {
    throw DimensionMismatch("unshift: state dimension does not match the grid");
  }
  if (shift == 0) return amplitudes;
  const Index per = spec_.levels_per_branch();
  const Index a = first_explicit();
  const long half = spec_.half_width();
  CVector out = CVector::Zero(dim());
  for (long k = -half; k <= half; ++k) {
    const Index i = a + (half - k);
    // window label k holds original label k - shift (+ branch) or k + shift (- branch)
    const long up = k - shift;
    const long down = k + shift;
    if (up >= -half && up <= half) out[a + (half - up)] = amplitudes[i];
    if (down >= -half && down <= half) out[per + a + (half - down)] = amplitudes[per + i];
  }
  return out;
}

// ------------------------------------------------------------ factories

std::unique_ptr<Model> make_model(const ModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::unique_ptr<Model> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SingleBandSpec>) {
          return std::make_unique<SingleBandLattice>(s);
        } else if constexpr (std::is_same_v<T, DrivenHOSpec>) {
          return std::make_unique<DrivenOscillator>(s);
        } else {
          return std::make_unique<LandauZenerGrid>(s);
        }
      },
      spec);
}

HermitianOperator build_single_band(const SingleBandSpec& spec) {
  return SingleBandLattice(spec).hamiltonian(0.0);
}

HermitianOperator build_driven_ho(const DrivenHOSpec& spec, double t) {
  return DrivenOscillator(spec).hamiltonian(t);
}

HermitianOperator build_lz_grid(const LZGridSpec& spec, double t) {
  return LandauZenerGrid(spec).hamiltonian(t);
}

}  // namespace blochsim
