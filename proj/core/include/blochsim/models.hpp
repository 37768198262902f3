#pragma once

// The three driven Hamiltonians: a tilted single-band lattice, a driven
// harmonic oscillator in the Fock basis and the Landau-Zener grid in its
// diabatic basis. Each model supplies H(t), dH/dt and a structured
// matrix-vector product used by the propagator.

#include "blochsim/expm.hpp"
#include "blochsim/quantum_core.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>

namespace blochsim {

/// Quenched Gaussian level shifts xi_n with mean zero.
struct Disorder {
  double std_dev = 0.0;
  std::uint64_t seed = 0;
};

/// Frozen shifts for `count` levels drawn from N(0, std_dev^2) with mt19937_64(seed).
RVector draw_disorder(const Disorder& disorder, Index count);

struct SingleBandSpec {
  double J = 1.0;        // tunneling amplitude
  double omega = 1.0;    // tilt per site
  int n_sites = 101;     // odd; sites -L..L
  std::optional<Disorder> disorder;

  void validate() const;
  int half_width() const { return n_sites / 2; }
};

struct DrivenHOSpec {
  double omega = 1.0;  // oscillator frequency
  double J = 0.5;      // drive amplitude
  double Omega = 1.2;  // drive frequency
  int n_fock = 400;    // Fock truncation dimension
  std::optional<Disorder> disorder;

  void validate() const;
  double drive_period() const;
};

struct LZGridSpec {
  double omega = 0.5;   // diabatic level spacing
  double lambda = 1.0;  // sweep rate
  double J = 0.2;       // grid coupling
  int n_levels = 61;    // odd; ladder indices m = -L..L per branch
  /// Number of Gauss-Legendre levels per side and branch that stand in for the
  /// part of each ladder beyond |m| > L. Zero gives the plain truncated grid.
  int tail_nodes = 0;

  void validate() const;
  int half_width() const { return n_levels / 2; }
  /// tau_per = omega / lambda
  double period() const { return omega / lambda; }
  int levels_per_branch() const { return n_levels + 2 * tail_nodes; }
  Index dim() const { return 2 * static_cast<Index>(levels_per_branch()); }
};

enum class ModelKind { SingleBand, DrivenHO, LZGrid };

std::string_view to_string(ModelKind kind);

class Model {
 public:
  virtual ~Model() = default;

  virtual ModelKind kind() const = 0;
  virtual Index dim() const = 0;
  virtual BasisKind basis() const = 0;

  virtual HermitianOperator hamiltonian(double t) const = 0;
  /// dH/dt, which equals dV/dt for every model here.
  virtual HermitianOperator hamiltonian_derivative(double t) const = 0;
  /// out = H(t) in, without forming the dense matrix.
  virtual void apply(double t, const CVector& in, CVector& out) const = 0;
  virtual SpectralBounds spectral_bounds(double t) const = 0;

  /// Period of H(t) when the model is periodic in t.
  virtual std::optional<double> drive_period() const { return std::nullopt; }
  /// Shortest intrinsic time scale; default integration steps derive from it.
  virtual double shortest_period() const = 0;
  /// Average spacing of the (instantaneous) adiabatic ladder.
  virtual double level_spacing() const = 0;
  virtual bool time_independent() const { return false; }

  /// Models whose truncated basis drifts in energy re-center it every
  /// recentering_period(). recenter() shifts the amplitudes by one period
  /// and returns the squared norm that fell off the window edge.
  virtual std::optional<double> recentering_period() const { return std::nullopt; }
  virtual double recenter(CVector& amplitudes) const;
  /// Amplitudes of a state recorded after `shift` re-centerings, expressed on
  /// the labels of the unshifted window. Levels that left the window are dropped.
  virtual CVector unshift(const CVector& amplitudes, long shift) const;

  /// Physical label of basis index i (site n, Fock n, or rank).
  virtual long label(Index i) const { return static_cast<long>(i); }
};

class SingleBandLattice final : public Model {
 public:
  explicit SingleBandLattice(SingleBandSpec spec);

  ModelKind kind() const override { return ModelKind::SingleBand; }
  Index dim() const override { return spec_.n_sites; }
  BasisKind basis() const override { return BasisKind::Site; }
  HermitianOperator hamiltonian(double t) const override;
  HermitianOperator hamiltonian_derivative(double t) const override;
  void apply(double t, const CVector& in, CVector& out) const override;
  SpectralBounds spectral_bounds(double t) const override;
  double shortest_period() const override;
  double level_spacing() const override { return spec_.omega; }
  bool time_independent() const override { return true; }
  long label(Index i) const override { return static_cast<long>(i) - spec_.half_width(); }

  const SingleBandSpec& spec() const { return spec_; }
  /// Array index of site n.
  Index index_of_site(int n) const { return static_cast<Index>(n + spec_.half_width()); }

 private:
  SingleBandSpec spec_;
  RVector onsite_;
};

class DrivenOscillator final : public Model {
 public:
  explicit DrivenOscillator(DrivenHOSpec spec);

  ModelKind kind() const override { return ModelKind::DrivenHO; }
  Index dim() const override { return spec_.n_fock; }
  BasisKind basis() const override { return BasisKind::Fock; }
  HermitianOperator hamiltonian(double t) const override;
  HermitianOperator hamiltonian_derivative(double t) const override;
  void apply(double t, const CVector& in, CVector& out) const override;
  SpectralBounds spectral_bounds(double t) const override;
  std::optional<double> drive_period() const override { return spec_.drive_period(); }
  double shortest_period() const override;
  double level_spacing() const override { return spec_.omega; }

  const DrivenHOSpec& spec() const { return spec_; }
  const RVector& bare_energies() const { return bare_; }
  /// J sin(Omega t) with t reduced modulo the drive period.
  double drive(double t) const;
  double drive_rate(double t) const;

 private:
  DrivenHOSpec spec_;
  RVector bare_;    // omega n + xi_n
  RVector x_off_;   // <n+1|x|n> = sqrt(n+1)/sqrt(2)
};

class LandauZenerGrid final : public Model {
 public:
  explicit LandauZenerGrid(LZGridSpec spec);

  ModelKind kind() const override { return ModelKind::LZGrid; }
  Index dim() const override { return spec_.dim(); }
  BasisKind basis() const override { return BasisKind::DiabaticLZ; }
  HermitianOperator hamiltonian(double t) const override;
  HermitianOperator hamiltonian_derivative(double t) const override;
  void apply(double t, const CVector& in, CVector& out) const override;
  SpectralBounds spectral_bounds(double t) const override;
  double shortest_period() const override;
  double level_spacing() const override { return 0.5 * spec_.omega; }
  std::optional<double> recentering_period() const override { return spec_.period(); }
  double recenter(CVector& amplitudes) const override;
  CVector unshift(const CVector& amplitudes, long shift) const override;

  const LZGridSpec& spec() const { return spec_; }
  /// Per-branch bare energies, descending (tail levels first and last).
  const RVector& branch_energies() const { return energies_; }
  /// Per-branch coupling weights (1 for explicit levels).
  const RVector& branch_weights() const { return weights_; }
  /// Diabatic energies at t in basis order (+ branch, then - branch).
  RVector diabatic_energies(double t) const;
  /// Index range [first, last] of the explicit ladder inside one branch.
  Index first_explicit() const { return spec_.tail_nodes; }
  Index last_explicit() const { return spec_.tail_nodes + spec_.n_levels - 1; }

 private:
  LZGridSpec spec_;
  RVector energies_;
  RVector weights_;
  double weight_norm2_ = 0.0;
};

using ModelSpec = std::variant<SingleBandSpec, DrivenHOSpec, LZGridSpec>;

std::unique_ptr<Model> make_model(const ModelSpec& spec);

// Named wrappers matching the per-model operations.
HermitianOperator build_single_band(const SingleBandSpec& spec);
HermitianOperator build_driven_ho(const DrivenHOSpec& spec, double t);
HermitianOperator build_lz_grid(const LZGridSpec& spec, double t);

// ------------------------------------------------------------ closed forms

/// J_{n-m}(2J/omega): amplitude of site n in the Wannier-Stark state centered at m.
double single_band_eigenstate_oracle(int m, int n, const SingleBandSpec& spec);

/// omega n - J^2 sin^2(Omega t) / (2 omega)
double ho_adiabatic_energy(int n, double t, const DrivenHOSpec& spec);

/// Displaced Fock state centered at x = -J sin(Omega t)/omega, obtained by
/// exponentiating the truncated displacement generator.
StateVector ho_adiabatic_state(int n, double t, const DrivenHOSpec& spec);

/// Closed-form non-adiabatic coupling amplitude of the driven oscillator in
/// the real convention <m|dV/dt|n>/(E_m - E_n); the Hermitian connection
/// i<m|d_t n> equals -i times this value.
double ho_theta(int m, int n, double t, const DrivenHOSpec& spec);

enum class Branch { Plus, Minus };

/// +/- (omega/2pi) arccos(c cos(2 pi lambda t/omega)) + m omega with
/// c = (omega^2 - pi^2 J^2)/(omega^2 + pi^2 J^2).
double lz_adiabatic_energy(int m, Branch branch, double t, const LZGridSpec& spec);

/// Both branches for m in [-half_width, half_width], sorted ascending.
RVector lz_adiabatic_ladder(double t, const LZGridSpec& spec, int half_width);

/// exp(-pi J^2 / lambda)
double lz_transition_probability(const LZGridSpec& spec);

// ------------------------------------------------------------ initial states

struct SiteDelta { int n = 0; };
struct GaussianSites { double center = 0.0; double sigma = 10.0; };
struct FockState { int n = 0; };
struct CoherentState { cplx alpha{0.0, 0.0}; };
struct AdiabaticIndex { std::optional<Index> q; double t0 = 0.0; };

using InitialStateSpec = std::variant<SiteDelta, GaussianSites, FockState, CoherentState, AdiabaticIndex>;

/// Normalized initial state on the model's basis. Throws TruncationError when
/// the truncated basis would lose more than `tail_tolerance` probability.
StateVector initial_state(const InitialStateSpec& kind, const Model& model,
                          double tail_tolerance = 1e-12);

/// exp(alpha a^dagger - alpha^* a) applied to v on a truncated Fock space.
CVector displace(const CVector& v, cplx alpha);

}  // namespace blochsim
