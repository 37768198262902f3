#include "cli.hpp"

#include "blochsim/coherent_oracle.hpp"
#include "blochsim/error.hpp"
#include "blochsim/models.hpp"
#include "blochsim/presets.hpp"
#include "blochsim/runner.hpp"
#include "blochsim/scenario.hpp"
#include "blochsim/special_functions.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace blochsim::cli {

namespace {

using nlohmann::json;

struct ScenarioArgs {
  std::string preset;
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
};

void add_scenario_options(CLI::App* app, ScenarioArgs& a) {
  app->add_option("--preset", a.preset, "Built-in scenario name");
  app->add_option("--config", a.config, "Scenario JSON file");
  app->add_option("--set", a.sets, "Override key=value (repeatable)")->take_all();
  app->add_option("--seed", a.seed, "Ensemble master seed");
  app->add_option("--dt", a.dt, "Integration step");
}

ScenarioConfig load_scenario(const ScenarioArgs& a) {
  if (a.preset.empty() == a.config.empty()) {
    throw ConfigError("exactly one of --preset or --config is required");
  }
  json doc = a.preset.empty() ? load_json_file(a.config) : preset_json(a.preset);
  for (const auto& s : a.sets) apply_override(doc, s);
  if (a.seed) doc["ensemble"]["master_seed"] = *a.seed;
  if (a.dt) doc["plan"]["dt"] = *a.dt;
  return parse_scenario(doc);
}

std::string output_dir(const std::string& flag, const std::string& name) {
  if (!flag.empty()) return flag;
  const char* root = std::getenv("BLOCHSIM_OUT");
  const std::filesystem::path base = root && *root ? root : "blochsim_out";
  return (base / name).string();
}

void emit(const std::string& text, const std::string& dir, const std::string& file, std::ostream& out) {
  if (dir.empty()) {
    out << text;
    return;
  }
  std::filesystem::create_directories(dir);
  const auto path = (std::filesystem::path(dir) / file).string();
  write_atomically(path, text);
  out << "wrote " << path << "\n";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_grid(const std::string& spec, double fallback_end) {
  // "start:end:count"
  double a = 0.0;
  double b = fallback_end;
  long n = 201;
  if (!spec.empty()) {
    char c1 = 0;
    char c2 = 0;
    std::istringstream in(spec);
    if (!(in >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 2 || !(b > a)) {
      throw ConfigError("--t-grid must look like start:end:count with end > start and count >= 2");
    }
  }
  std::vector<double> t;
  for (long k = 0; k < n; ++k) t.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
  return t;
}

int cmd_run(const ScenarioArgs& a, const std::string& out_flag, int threads, std::ostream& out) {
  const ScenarioConfig cfg = load_scenario(a);
  RunOptions opts;
  opts.threads = threads;
  const RunResult result = run_scenario(cfg, opts);
  const std::string dir = output_dir(out_flag, result.config.name);
  const BundleFiles files = write_bundle(result, dir);
  out << "scenario " << result.config.name << " hash " << result.hash << " dt " << num(*result.config.plan.dt)
      << "\n";
  out << "bundle " << files.bundle_hash << " -> " << dir << "\n";
  for (const auto& [name, h] : files.file_hashes) out << "  " << name << " " << h << "\n";
  for (const auto& w : result.report["warnings"]) out << "warning: " << w.get<std::string>() << "\n";
  return kOk;
}

int cmd_spectrum(const ScenarioArgs& a, const std::string& grid, const std::string& out_flag, std::ostream& out) {
  const ScenarioConfig cfg = load_scenario(a);
  const auto model = make_model(cfg.model);
  std::optional<double> period = model->drive_period();
  if (!period) period = model->recentering_period();
  const double t_end = period ? 2.0 * *period : model->shortest_period();
  const std::string text = render_spectrum(cfg, parse_grid(grid, t_end));
  emit(text, out_flag.empty() ? "" : out_flag, "spectrum.csv", out);
  return kOk;
}

struct OracleArgs {
  std::string name;
  double J = 0.0;
  double omega = 1.0;
  double Omega = 1.2;
  double lambda = 1.0;
  std::vector<double> alpha{std::sqrt(200.0), 0.0};
  int kmax = 40;
  int m_max = 3;
  double t1 = 10.0 * 3.14159265358979323846;
  int n = 101;
};

int cmd_oracle(const OracleArgs& o, const std::string& out_flag, std::ostream& out) {
  std::string text;
  if (o.name == "bessel") {
    if (!(o.omega > 0.0)) throw ConfigError("--omega must be > 0");
    const double x = 2.0 * o.J / o.omega;
    text = "k,x,J_k\n";
    for (int k = -o.kmax; k <= o.kmax; ++k) text += std::to_string(k) + "," + num(x) + "," + num(bessel_j(k, x)) + "\n";
  } else if (o.name == "ho-coherent") {
    DrivenHOSpec spec;
    spec.omega = o.omega;
    spec.J = o.J;
    spec.Omega = o.Omega;
    spec.validate();
    if (o.alpha.empty() || o.alpha.size() > 2) throw ConfigError("--alpha takes re or re,im");
    const cplx a0{o.alpha[0], o.alpha.size() > 1 ? o.alpha[1] : 0.0};
    text = "t,re_alpha,im_alpha,abs_alpha\n";
    for (double t : parse_grid("0:" + num(o.t1) + ":" + std::to_string(o.n), o.t1)) {
      const cplx a = coherent_amplitude(a0, spec, t);
      text += num(t) + "," + num(a.real()) + "," + num(a.imag()) + "," + num(std::abs(a)) + "\n";
    }
  } else if (o.name == "lz-energies") {
    LZGridSpec spec;
    spec.omega = o.omega;
    spec.lambda = o.lambda;
    spec.J = o.J;
    spec.validate();
    text = "t,m,branch,E\n";
    for (double t : parse_grid("0:" + num(o.t1) + ":" + std::to_string(o.n), o.t1)) {
      for (int m = -o.m_max; m <= o.m_max; ++m) {
        text += num(t) + "," + std::to_string(m) + ",+," + num(lz_adiabatic_energy(m, Branch::Plus, t, spec)) + "\n";
        text += num(t) + "," + std::to_string(m) + ",-," + num(lz_adiabatic_energy(m, Branch::Minus, t, spec)) + "\n";
      }
    }
  } else if (o.name == "lz-probability") {
    LZGridSpec spec;
    spec.lambda = o.lambda;
    spec.J = o.J;
    spec.validate();
    text = "J,lambda,P\n" + num(o.J) + "," + num(o.lambda) + "," + num(lz_transition_probability(spec)) + "\n";
  } else {
    throw ConfigError("unknown oracle '" + o.name + "' (bessel, ho-coherent, lz-energies, lz-probability)");
  }
  emit(text, out_flag, "oracle_" + o.name + ".csv", out);
  return kOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"blochsim: energy Bloch oscillations in driven quantum systems"};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", std::string(tool_version()));

  std::string dump_preset;
  int threads = 0;
  std::string out_flag;
  app.add_option("--dump-preset", dump_preset, "Print a preset as JSON and exit");
  app.add_option("--threads", threads, "Worker threads for ensembles (0 = all cores)")->check(CLI::NonNegativeNumber);

  ScenarioArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its output bundle");
  add_scenario_options(run_cmd, run_args);
  run_cmd->add_option("--out", out_flag, "Output directory (default $BLOCHSIM_OUT/<name>)");
  run_cmd->add_option("--threads", threads, "Worker threads for ensembles (0 = all cores)")->check(CLI::NonNegativeNumber);

  ScenarioArgs spec_args;
  std::string grid;
  auto* spec_cmd = app.add_subcommand("spectrum", "Diabatic and adiabatic energies on a time grid");
  add_scenario_options(spec_cmd, spec_args);
  spec_cmd->add_option("--t-grid", grid, "start:end:count");
  spec_cmd->add_option("--out", out_flag, "Output directory (stdout when absent)");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Evaluate a closed-form reference");
  oracle_cmd->add_option("name", oracle.name, "bessel | ho-coherent | lz-energies | lz-probability")->required();
  oracle_cmd->add_option("--J", oracle.J, "Coupling or drive amplitude");
  oracle_cmd->add_option("--omega", oracle.omega, "Level spacing");
  oracle_cmd->add_option("--Omega", oracle.Omega, "Drive frequency");
  oracle_cmd->add_option("--lambda", oracle.lambda, "Sweep rate");
  oracle_cmd->add_option("--alpha", oracle.alpha, "Initial coherent amplitude re[,im]")->delimiter(',');
  oracle_cmd->add_option("--kmax", oracle.kmax, "Largest Bessel order");
  oracle_cmd->add_option("--m-max", oracle.m_max, "Largest ladder index");
  oracle_cmd->add_option("--t1", oracle.t1, "End of the time grid");
  oracle_cmd->add_option("--n", oracle.n, "Number of time points");
  oracle_cmd->add_option("--out", out_flag, "Output directory (stdout when absent)");

  auto* list_cmd = app.add_subcommand("list-presets", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (!dump_preset.empty()) {
      out << preset_json(dump_preset).dump(2) << "\n";
      return kOk;
    }
    if (run_cmd->parsed()) return cmd_run(run_args, out_flag, threads, out);
    if (spec_cmd->parsed()) return cmd_spectrum(spec_args, grid, out_flag, out);
    if (oracle_cmd->parsed()) return cmd_oracle(oracle, out_flag, out);
    if (list_cmd->parsed()) {
      for (const auto& p : list_presets()) out << p.name << "  " << p.summary << "\n";
      return kOk;
    }
    out << app.help();
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DimensionMismatch& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical abort: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace blochsim::cli
