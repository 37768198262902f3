#include "blochsim/error.hpp"
#include "blochsim/presets.hpp"
#include "blochsim/runner.hpp"
#include "blochsim/scenario.hpp"

#include <doctest.h>

using namespace blochsim;
using nlohmann::json;

namespace {

json small_lattice() {
  return json::parse(R"({
    "name": "small",
    "model": {"kind": "single_band", "params": {"J": 1.0, "omega": 1.0, "n_sites": 41}},
    "initial_state": {"kind": "site_delta", "n": 0},
    "plan": {"t0": 0.0, "t1": 6.283185307179586, "dt": 0.006283185307179586, "output_interval": 0.6283185307179586}
  })");
}

json small_disordered_ho(double std_dev, int n_real) {
  json j = json::parse(R"({
    "name": "dis",
    "model": {"kind": "driven_ho", "params": {"omega": 1.0, "J": 0.5, "Omega": 1.2, "n_fock": 80}},
    "initial_state": {"kind": "fock", "n": 10},
    "plan": {"t0": 0.0, "t1": 2.0, "dt": 0.002, "output_interval": 0.5}
  })");
  j["model"]["disorder"] = {{"std_dev", std_dev}, {"seed", 0}};
  j["ensemble"] = {{"n_realizations", n_real}, {"master_seed", 7}};
  return j;
}

std::string thrown_message(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("unknown keys are rejected with their path") {
  json j = small_lattice();
  j["plan"]["dtt"] = 0.1;
  CHECK(thrown_message(j).find("plan.dtt") != std::string::npos);
  j = small_lattice();
  j["model"]["params"]["jj"] = 1;
  CHECK(thrown_message(j).find("model.params.jj") != std::string::npos);
  j = small_lattice();
  j["model"]["kind"] = "nope";
  CHECK(!thrown_message(j).empty());
  j = small_lattice();
  j["model"]["params"]["n_sites"] = 40;
  CHECK_THROWS(parse_scenario(j));
}

TEST_CASE("overrides create and replace fields") {
  json j = small_lattice();
  apply_override(j, "model.params.J=2.5");
  apply_override(j, "name=renamed");
  apply_override(j, "analysis.probe_times=[1.0,2.0]");
  CHECK(j["model"]["params"]["J"] == 2.5);
  CHECK(j["name"] == "renamed");
  CHECK(j["analysis"]["probe_times"].size() == 2);
  CHECK_THROWS_AS(apply_override(j, "no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(apply_override(j, "=3"), ConfigError);
}

TEST_CASE("canonical JSON round trip and hash") {
  for (const auto& info : list_presets()) {
    const ScenarioConfig c = preset(info.name);
    const json canon = to_json(c);
    CHECK(to_json(parse_scenario(canon)) == canon);
    CHECK(scenario_hash(parse_scenario(canon)) == scenario_hash(c));
    CHECK(scenario_hash(c).size() == 16);
  }
  ScenarioConfig a = parse_scenario(small_lattice());
  ScenarioConfig b = a;
  b.provenance = {{"note", "ignored"}};
  CHECK(scenario_hash(a) == scenario_hash(b));
  b.plan.t1 *= 2;
  CHECK(scenario_hash(a) != scenario_hash(b));
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("unknown presets are a config error") {
  CHECK_THROWS_AS(preset("nope"), ConfigError);
  CHECK(list_presets().size() == 7);
}

TEST_CASE("runs are deterministic and metadata reproduces the bundle") {
  const ScenarioConfig c = parse_scenario(small_lattice());
  const auto first = render_bundle(run_scenario(c));
  const auto second = render_bundle(run_scenario(c));
  CHECK(first == second);
  const json meta = json::parse(first.at("metadata.json"));
  json again = meta;
  again.erase("provenance");
  const auto third = render_bundle(run_scenario(parse_scenario(again)));
  CHECK(third.at("populations.csv") == first.at("populations.csv"));
  CHECK(third.at("observables.csv") == first.at("observables.csv"));
  CHECK(third.at("report.json") == first.at("report.json"));
}

TEST_CASE("ensemble averaging") {
  const RunResult clean = run_scenario(parse_scenario(small_disordered_ho(0.0, 1)));
  const RunResult zero = run_scenario(parse_scenario(small_disordered_ho(0.0, 3)));
  REQUIRE(clean.populations.size() == zero.populations.size());
  for (std::size_t k = 0; k < clean.populations.size(); ++k) {
    CHECK((clean.populations[k] - zero.populations[k]).cwiseAbs().maxCoeff() < 1e-14);
  }
  const RunResult dis = run_scenario(parse_scenario(small_disordered_ho(0.3, 4)), {2});
  const RunResult dis1 = run_scenario(parse_scenario(small_disordered_ho(0.3, 4)), {1});
  for (std::size_t k = 0; k < dis.populations.size(); ++k) {
    CHECK(std::abs(dis.populations[k].sum() - 1.0) < 1e-9);
    CHECK((dis.populations[k] - dis1.populations[k]).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(parse_scenario(small_disordered_ho(0.3, 0)), ConfigError);
}
