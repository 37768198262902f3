#pragma once

// Scenario configuration: a strict JSON document describing one experiment.
// Unknown keys are rejected with the offending path.

#include "blochsim/models.hpp"
#include "blochsim/propagator.hpp"
#include "blochsim/quantum_core.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace blochsim {

struct PlanConfig {
  double t0 = 0.0;
  double t1 = 1.0;
  std::optional<double> dt;  // resolved to the model default when absent
  double output_interval = 0.1;
  Method method = Method::MidpointExponential;
  Backend backend = Backend::Taylor;
  double norm_drift_rate = 1e-9;
  double max_window_loss = 1e-8;
  bool follow_window = true;
};

struct FrameConfig {
  /// Fraction of levels excluded at each spectral edge by interior checks.
  double interior_fraction = 0.15;
  double min_overlap = 0.9;
};

struct EnsembleConfig {
  int n_realizations = 1;
  /// Realization i draws its disorder with seed master_seed + i.
  std::uint64_t master_seed = 0;
};

enum class PopulationBasis { Model, Adiabatic };

enum class SeriesKind { SigmaIdx, ExcessSigma, DeltaE, Participation };

std::string_view to_string(SeriesKind k);

struct AnalysisConfig {
  PopulationBasis population_basis = PopulationBasis::Model;
  std::vector<double> probe_times;
  /// Series whose period is estimated; empty disables the estimate.
  std::optional<SeriesKind> period_series;
  double period_smoothing = 0.0;
  double period_min_lag = 0.0;
  std::optional<std::array<double, 2>> fit_window;
  SeriesKind fit_series = SeriesKind::SigmaIdx;
  /// Window searched for the participation-ratio minimum.
  std::optional<std::array<double, 2>> relocalization_window;
  double relocalization_smoothing = 0.0;
  int detuning_n_max = 0;
};

struct ScenarioConfig {
  std::string name = "custom";
  ModelSpec model = SingleBandSpec{};
  InitialStateSpec initial_state = SiteDelta{};
  PlanConfig plan;
  FrameConfig frames;
  EnsembleConfig ensemble;
  AnalysisConfig analysis;
  Tolerances tolerances;
  /// Free-form block ignored by the simulation (written into metadata).
  nlohmann::json provenance;
};

/// Strict parse. Throws ConfigError naming the field path.
ScenarioConfig parse_scenario(const nlohmann::json& doc);

/// Canonical, fully explicit JSON; parse_scenario(to_json(c)) == c.
nlohmann::json to_json(const ScenarioConfig& config, bool with_provenance = true);

/// FNV-1a 64 of the canonical JSON without provenance, as 16 hex digits.
std::string scenario_hash(const ScenarioConfig& config);

std::string fnv1a_hex(std::string_view bytes);

/// Applies "a.b.c=value" to a JSON document. The value is parsed as JSON when
/// possible and taken as a string otherwise. Intermediate objects are created.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Reads a JSON file; ConfigError on I/O or syntax errors.
nlohmann::json load_json_file(const std::string& path);

}  // namespace blochsim
