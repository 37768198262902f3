#pragma once

// Scenario execution: ensembles of propagations, observables, the analysis
// report and the on-disk output bundle.

#include "blochsim/scenario.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

namespace blochsim {

std::string_view tool_version();

struct RunOptions {
  /// Worker threads for the ensemble loop; 0 uses the available cores.
  int threads = 0;
};

struct ObservableRow {
  double t = 0.0;
  double fidelity = 0.0;
  double sigma_idx = 0.0;
  double delta_e = 0.0;
  double participation = 0.0;
};

struct RunResult {
  ScenarioConfig config;  // with dt resolved
  std::string hash;
  std::vector<double> times;
  /// Ensemble-averaged populations at each output time.
  std::vector<RVector> populations;
  /// Label written in the n column for each population index.
  std::vector<long> labels;
  std::vector<ObservableRow> observables;
  nlohmann::json report;
};

/// Fills in defaults that depend on the model (currently the step size).
ScenarioConfig resolve(ScenarioConfig config);

/// Runs every realization, averages in index order and analyzes the result.
/// Deterministic for a given config regardless of the thread count.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

struct BundleFiles {
  std::map<std::string, std::string> file_hashes;  // file name -> FNV-1a hex
  std::string bundle_hash;
};

/// Writes populations.csv, observables.csv, report.json and metadata.json
/// into `dir`, each through a temporary file and a rename.
BundleFiles write_bundle(const RunResult& result, const std::string& dir);

/// Rendered file contents, keyed by file name.
std::map<std::string, std::string> render_bundle(const RunResult& result);

/// Diabatic and adiabatic energies of the scenario's model on `times` as CSV
/// with header t,kind,index,E.
std::string render_spectrum(const ScenarioConfig& config, const std::vector<double>& times);

/// Writes `contents` to `path` via a temporary sibling and rename.
void write_atomically(const std::string& path, const std::string& contents);

}  // namespace blochsim
