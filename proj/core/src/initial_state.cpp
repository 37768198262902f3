#include "blochsim/error.hpp"
#include "blochsim/expm.hpp"
#include "blochsim/models.hpp"

#include <cmath>
#include <sstream>

namespace blochsim {

namespace {

// Levels this close to the Fock cutoff must stay empty.
constexpr int kFockMargin = 50;

[[noreturn]] void tail_error(double tail, double tol, const std::string& what) {
  std::ostringstream msg;
  msg << what << ": truncation tail mass " << tail << " exceeds " << tol
      << "; enlarge the basis dimension";
  throw TruncationError(msg.str());
}

const SingleBandLattice& need_lattice(const Model& model, const char* kind) {
  const auto* lattice = dynamic_cast<const SingleBandLattice*>(&model);
  if (!lattice) throw ConfigError(std::string("initial_state.kind ") + kind + " needs a single_band model");
  return *lattice;
}

const DrivenOscillator& need_oscillator(const Model& model, const char* kind) {
  const auto* ho = dynamic_cast<const DrivenOscillator*>(&model);
  if (!ho) throw ConfigError(std::string("initial_state.kind ") + kind + " needs a driven_ho model");
  return *ho;
}

// Poisson mass above level `cut` for mean `mu`, summed in log space.
double poisson_tail(double mu, int cut) {
  if (mu == 0.0) return 0.0;
  double sum = 0.0;
  for (int n = cut + 1; n < cut + 2000; ++n) {
    const double term = std::exp(n * std::log(mu) - mu - std::lgamma(n + 1.0));
    sum += term;
    if (n > mu && term < 1e-30 * std::max(sum, 1e-300)) break;
  }
  return sum;
}

StateVector make(const SiteDelta& s, const Model& model, double) {
  const auto& lattice = need_lattice(model, "site_delta");
  const int half = lattice.spec().half_width();
  if (s.n < -half || s.n > half) {
    throw ConfigError("initial_state.n lies outside the lattice");
  }
  return StateVector::basis_state(lattice.dim(), lattice.index_of_site(s.n), BasisKind::Site);
}

StateVector make(const GaussianSites& g, const Model& model, double tol) {
  const auto& lattice = need_lattice(model, "gaussian_sites");
  if (!(g.sigma > 0.0)) throw ConfigError("initial_state.sigma must be > 0");
  const int half = lattice.spec().half_width();
  // probability density has standard deviation sigma; mass beyond the edges
  const double reach = std::min(half + 0.5 - g.center, half + 0.5 + g.center);
  const double tail = std::erfc(reach / (g.sigma * std::sqrt(2.0)));
  if (reach <= 0.0 || tail > tol) tail_error(tail, tol, "gaussian_sites");
  CVector c(lattice.dim());
  for (int n = -half; n <= half; ++n) {
    const double d = n - g.center;
    c[lattice.index_of_site(n)] = std::exp(-d * d / (4.0 * g.sigma * g.sigma));
  }
  return StateVector(std::move(c), BasisKind::Site).normalized();
}

StateVector make(const FockState& f, const Model& model, double) {
  const auto& ho = need_oscillator(model, "fock");
  if (f.n < 0) throw ConfigError("initial_state.n must be >= 0");
  if (f.n >= ho.dim() - kFockMargin) {
    std::ostringstream msg;
    msg << "fock: level " << f.n << " is within " << kFockMargin << " levels of n_fock = " << ho.dim()
        << "; enlarge n_fock";
    throw TruncationError(msg.str());
  }
  return StateVector::basis_state(ho.dim(), f.n, BasisKind::Fock);
}

StateVector make(const CoherentState& c, const Model& model, double tol) {
  const auto& ho = need_oscillator(model, "coherent");
  const int cut = static_cast<int>(ho.dim()) - kFockMargin;
  const double tail = poisson_tail(std::norm(c.alpha), cut);
  if (tail > tol) tail_error(tail, tol, "coherent");
  CVector vacuum = CVector::Zero(ho.dim());
  vacuum[0] = 1.0;
  return StateVector(displace(vacuum, c.alpha), BasisKind::Fock).normalized();
}

StateVector make(const AdiabaticIndex& a, const Model& model, double) {
  const auto eig = eig_hermitian(model.hamiltonian(a.t0));
  const Index q = a.q.value_or(model.dim() / 2);
  if (q < 0 || q >= model.dim()) {
    throw ConfigError("initial_state.q lies outside the basis");
  }
  return StateVector(eig.column(q), model.basis()).normalized();
}

}  // namespace

StateVector initial_state(const InitialStateSpec& kind, const Model& model, double tail_tolerance) {
  return std::visit([&](const auto& k) { return make(k, model, tail_tolerance); }, kind);
}

CVector displace(const CVector& v, cplx alpha) {
  const Index n = v.size();
  if (alpha == cplx{0.0, 0.0}) return v;
  // exp(alpha a^dagger - alpha^* a) = exp(-i A) with the Hermitian A = i (alpha a^dagger - alpha^* a)
  RVector root(n);
  for (Index k = 0; k < n; ++k) root[k] = std::sqrt(static_cast<double>(k));
  const cplx i_alpha = cplx{0.0, 1.0} * alpha;
  const cplx i_alpha_conj = cplx{0.0, 1.0} * std::conj(alpha);
  const LinearMap a_map = [&](const CVector& in, CVector& out) {
    out.resize(n);
    out[0] = 0.0;
    for (Index k = 1; k < n; ++k) out[k] = i_alpha * root[k] * in[k - 1];
    for (Index k = 0; k + 1 < n; ++k) out[k] -= i_alpha_conj * root[k + 1] * in[k + 1];
  };
  const double reach = 2.0 * std::abs(alpha) * root[n - 1];
  return expm_action(a_map, SpectralBounds{-reach, reach}, 1.0, v);
}

}  // namespace blochsim
