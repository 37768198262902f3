#include "blochsim/scenario.hpp"

#include "blochsim/error.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace blochsim {

using nlohmann::json;

std::string_view to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::SigmaIdx:
      return "sigma_idx";
    case SeriesKind::ExcessSigma:
      return "excess_sigma";
    case SeriesKind::DeltaE:
      return "deltaE";
    case SeriesKind::Participation:
      return "participation";
  }
  return "unknown";
}

namespace {

SeriesKind series_from_string(const std::string& s, const std::string& path) {
  for (SeriesKind k : {SeriesKind::SigmaIdx, SeriesKind::ExcessSigma, SeriesKind::DeltaE,
                       SeriesKind::Participation}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError(path + ": unknown series '" + s + "'");
}

// Walks one JSON object, remembering which keys were consumed so that
// leftovers can be reported.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) throw ConfigError(field(key) + " is required");
    return obj_.at(key);
  }

  Reader child(const std::string& key) { return Reader(raw(key), field(key)); }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(field(key) + " must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    return has(key) ? number(key) : fallback;
  }
  std::optional<double> optional_number(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  long long integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(field(key) + " must be an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) {
    seen_.insert(key);
    return has(key) ? integer(key) : fallback;
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError(field(key) + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(field(key) + " must be a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    return has(key) ? string(key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) throw ConfigError(field(key) + " must be true or false");
    return v.get<bool>();
  }

  std::optional<std::array<double, 2>> interval(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    const json& v = obj_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ConfigError(field(key) + " must be a [start, end] pair of numbers");
    }
    return std::array<double, 2>{v[0].get<double>(), v[1].get<double>()};
  }

  std::vector<double> numbers(const std::string& key) {
    seen_.insert(key);
    std::vector<double> out;
    if (!has(key)) return out;
    const json& v = obj_.at(key);
    if (!v.is_array()) throw ConfigError(field(key) + " must be an array of numbers");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(field(key) + "[" + std::to_string(i) + "] must be a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  void ignore(const std::string& key) { seen_.insert(key); }

  /// Rejects any key that was never read.
  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(field(item.key()) + " is not a recognized field");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "config" : path_; }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

int to_int(long long v, const std::string& path) {
  if (v < -(1LL << 30) || v > (1LL << 30)) throw ConfigError(path + " is out of range");
  return static_cast<int>(v);
}

std::optional<Disorder> read_disorder(Reader& model) {
  if (!model.has("disorder")) {
    model.ignore("disorder");
    return std::nullopt;
  }
  Reader d = model.child("disorder");
  Disorder out;
  out.std_dev = d.number("std_dev");
  out.seed = d.seed("seed", 0);
  d.finish();
  return out;
}

ModelSpec read_model(Reader& root) {
  Reader m = root.child("model");
  const std::string kind = m.string("kind");
  Reader p = m.child("params");
  ModelSpec spec;
  if (kind == "single_band") {
    SingleBandSpec s;
    s.J = p.number("J");
    s.omega = p.number("omega");
    s.n_sites = to_int(p.integer("n_sites"), p.field("n_sites"));
    s.disorder = read_disorder(m);
    spec = s;
  } else if (kind == "driven_ho") {
    DrivenHOSpec s;
    s.omega = p.number("omega");
    s.J = p.number("J");
    s.Omega = p.number("Omega");
    s.n_fock = to_int(p.integer("n_fock"), p.field("n_fock"));
    s.disorder = read_disorder(m);
    spec = s;
  } else if (kind == "lz_grid") {
    LZGridSpec s;
    s.omega = p.number("omega");
    s.lambda = p.number("lambda");
    s.J = p.number("J");
    s.n_levels = to_int(p.integer("n_levels"), p.field("n_levels"));
    s.tail_nodes = to_int(p.integer("tail_nodes", 0), p.field("tail_nodes"));
    if (m.has("disorder")) throw ConfigError("model.disorder is not supported for lz_grid");
    m.ignore("disorder");
    spec = s;
  } else {
    throw ConfigError("model.kind must be single_band, driven_ho or lz_grid, got '" + kind + "'");
  }
  p.finish();
  m.finish();
  std::visit([](const auto& s) { s.validate(); }, spec);
  return spec;
}

cplx read_alpha(Reader& r) {
  const json& v = r.raw("alpha");
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError(r.field("alpha") + " must be a number or a [re, im] pair");
}

InitialStateSpec read_initial(Reader& root) {
  Reader r = root.child("initial_state");
  const std::string kind = r.string("kind");
  InitialStateSpec out;
  if (kind == "site_delta") {
    out = SiteDelta{to_int(r.integer("n", 0), r.field("n"))};
  } else if (kind == "gaussian_sites") {
    out = GaussianSites{r.number("center", 0.0), r.number("sigma")};
  } else if (kind == "fock") {
    out = FockState{to_int(r.integer("n"), r.field("n"))};
  } else if (kind == "coherent") {
    out = CoherentState{read_alpha(r)};
  } else if (kind == "adiabatic_index") {
    AdiabaticIndex a;
    r.ignore("q");
    if (r.has("q")) a.q = r.integer("q");
    a.t0 = r.number("t0", 0.0);
    out = a;
  } else {
    throw ConfigError("initial_state.kind must be site_delta, gaussian_sites, fock, coherent or adiabatic_index, got '" +
                      kind + "'");
  }
  r.finish();
  return out;
}

}  // namespace

ScenarioConfig parse_scenario(const json& doc) {
  Reader root(doc, "");
  ScenarioConfig c;
  c.name = root.string("name", "custom");
  c.model = read_model(root);
  c.initial_state = read_initial(root);

  {
    Reader p = root.child("plan");
    c.plan.t0 = p.number("t0", 0.0);
    c.plan.t1 = p.number("t1");
    c.plan.dt = p.optional_number("dt");
    c.plan.output_interval = p.number("output_interval");
    c.plan.method = method_from_string(p.string("method", "midpoint_exponential"));
    c.plan.backend = backend_from_string(p.string("backend", "taylor"));
    c.plan.norm_drift_rate = p.number("norm_drift_rate", 1e-9);
    c.plan.max_window_loss = p.number("max_window_loss", 1e-8);
    c.plan.follow_window = p.boolean("follow_window", true);
    p.finish();
    if (!(c.plan.output_interval > 0.0)) throw ConfigError("plan.output_interval must be > 0");
    if (c.plan.dt && !(*c.plan.dt > 0.0)) throw ConfigError("plan.dt must be > 0");
    if (!(c.plan.t1 > c.plan.t0)) throw ConfigError("plan.t1 must exceed plan.t0");
  }
  if (root.has("frames")) {
    Reader f = root.child("frames");
    c.frames.interior_fraction = f.number("interior_fraction", 0.15);
    c.frames.min_overlap = f.number("min_overlap", 0.9);
    f.finish();
    if (c.frames.interior_fraction < 0.0 || c.frames.interior_fraction >= 0.5) {
      throw ConfigError("frames.interior_fraction must lie in [0, 0.5)");
    }
  } else {
    root.ignore("frames");
  }
  if (root.has("ensemble")) {
    Reader e = root.child("ensemble");
    const long long n = e.integer("n_realizations", 1);
    if (n < 1) throw ConfigError("ensemble.n_realizations must be >= 1");
    c.ensemble.n_realizations = to_int(n, "ensemble.n_realizations");
    c.ensemble.master_seed = e.seed("master_seed", 0);
    e.finish();
  } else {
    root.ignore("ensemble");
  }
  if (root.has("analysis")) {
    Reader a = root.child("analysis");
    const std::string basis = a.string("population_basis", "model");
    if (basis == "model") {
      c.analysis.population_basis = PopulationBasis::Model;
    } else if (basis == "adiabatic") {
      c.analysis.population_basis = PopulationBasis::Adiabatic;
    } else {
      throw ConfigError("analysis.population_basis must be model or adiabatic");
    }
    c.analysis.probe_times = a.numbers("probe_times");
    a.ignore("period_series");
    if (a.has("period_series")) {
      c.analysis.period_series = series_from_string(a.string("period_series"), "analysis.period_series");
    }
    c.analysis.period_smoothing = a.number("period_smoothing", 0.0);
    c.analysis.period_min_lag = a.number("period_min_lag", 0.0);
    c.analysis.fit_window = a.interval("fit_window");
    c.analysis.fit_series = series_from_string(a.string("fit_series", "sigma_idx"), "analysis.fit_series");
    c.analysis.relocalization_window = a.interval("relocalization_window");
    c.analysis.relocalization_smoothing = a.number("relocalization_smoothing", 0.0);
    c.analysis.detuning_n_max = to_int(a.integer("detuning_n_max", 0), "analysis.detuning_n_max");
    a.finish();
  } else {
    root.ignore("analysis");
  }
  if (root.has("tolerances")) {
    Reader t = root.child("tolerances");
    c.tolerances.hermiticity = t.number("hermiticity", c.tolerances.hermiticity);
    c.tolerances.degeneracy = t.number("degeneracy", c.tolerances.degeneracy);
    c.tolerances.imag_residue = t.number("imag_residue", c.tolerances.imag_residue);
    c.tolerances.variance_floor = t.number("variance_floor", c.tolerances.variance_floor);
    c.tolerances.normalization = t.number("normalization", c.tolerances.normalization);
    t.finish();
  } else {
    root.ignore("tolerances");
  }
  root.ignore("provenance");
  if (doc.contains("provenance")) c.provenance = doc.at("provenance");
  root.finish();
  return c;
}

namespace {

json disorder_json(const std::optional<Disorder>& d) {
  if (!d) return nullptr;
  return json{{"std_dev", d->std_dev}, {"seed", d->seed}};
}

json model_json(const ModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SingleBandSpec>) {
          json m{{"kind", "single_band"},
                 {"params", {{"J", s.J}, {"omega", s.omega}, {"n_sites", s.n_sites}}}};
          if (s.disorder) m["disorder"] = disorder_json(s.disorder);
          return m;
        } else if constexpr (std::is_same_v<T, DrivenHOSpec>) {
          json m{{"kind", "driven_ho"},
                 {"params", {{"omega", s.omega}, {"J", s.J}, {"Omega", s.Omega}, {"n_fock", s.n_fock}}}};
          if (s.disorder) m["disorder"] = disorder_json(s.disorder);
          return m;
        } else {
          return json{{"kind", "lz_grid"},
                      {"params",
                       {{"omega", s.omega},
                        {"lambda", s.lambda},
                        {"J", s.J},
                        {"n_levels", s.n_levels},
                        {"tail_nodes", s.tail_nodes}}}};
        }
      },
      spec);
}

json initial_json(const InitialStateSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SiteDelta>) {
          return json{{"kind", "site_delta"}, {"n", s.n}};
        } else if constexpr (std::is_same_v<T, GaussianSites>) {
          return json{{"kind", "gaussian_sites"}, {"center", s.center}, {"sigma", s.sigma}};
        } else if constexpr (std::is_same_v<T, FockState>) {
          return json{{"kind", "fock"}, {"n", s.n}};
        } else if constexpr (std::is_same_v<T, CoherentState>) {
          return json{{"kind", "coherent"}, {"alpha", {s.alpha.real(), s.alpha.imag()}}};
        } else {
          json j{{"kind", "adiabatic_index"}, {"t0", s.t0}};
          if (s.q) j["q"] = *s.q;
          return j;
        }
      },
      spec);
}

json interval_json(const std::optional<std::array<double, 2>>& w) {
  if (!w) return nullptr;
  return json::array({(*w)[0], (*w)[1]});
}

}  // namespace

json to_json(const ScenarioConfig& c, bool with_provenance) {
  json plan{{"t0", c.plan.t0},
            {"t1", c.plan.t1},
            {"output_interval", c.plan.output_interval},
            {"method", to_string(c.plan.method)},
            {"backend", to_string(c.plan.backend)},
            {"norm_drift_rate", c.plan.norm_drift_rate},
            {"max_window_loss", c.plan.max_window_loss},
            {"follow_window", c.plan.follow_window}};
  if (c.plan.dt) plan["dt"] = *c.plan.dt;

  json analysis{
      {"population_basis", c.analysis.population_basis == PopulationBasis::Adiabatic ? "adiabatic" : "model"},
      {"probe_times", c.analysis.probe_times},
      {"period_smoothing", c.analysis.period_smoothing},
      {"period_min_lag", c.analysis.period_min_lag},
      {"fit_series", to_string(c.analysis.fit_series)},
      {"relocalization_smoothing", c.analysis.relocalization_smoothing},
      {"detuning_n_max", c.analysis.detuning_n_max}};
  if (c.analysis.period_series) analysis["period_series"] = to_string(*c.analysis.period_series);
  if (c.analysis.fit_window) analysis["fit_window"] = interval_json(c.analysis.fit_window);
  if (c.analysis.relocalization_window) {
    analysis["relocalization_window"] = interval_json(c.analysis.relocalization_window);
  }

  json doc{{"name", c.name},
           {"model", model_json(c.model)},
           {"initial_state", initial_json(c.initial_state)},
           {"plan", plan},
           {"frames", {{"interior_fraction", c.frames.interior_fraction}, {"min_overlap", c.frames.min_overlap}}},
           {"ensemble", {{"n_realizations", c.ensemble.n_realizations}, {"master_seed", c.ensemble.master_seed}}},
           {"analysis", analysis},
           {"tolerances",
            {{"hermiticity", c.tolerances.hermiticity},
             {"degeneracy", c.tolerances.degeneracy},
             {"imag_residue", c.tolerances.imag_residue},
             {"variance_floor", c.tolerances.variance_floor},
             {"normalization", c.tolerances.normalization}}}};
  if (with_provenance && !c.provenance.is_null()) doc["provenance"] = c.provenance;
  return doc;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string scenario_hash(const ScenarioConfig& config) { return fnv1a_hex(to_json(config, false).dump()); }

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' must have the form key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    if (node->is_null()) *node = json::object();
    if (!node->is_object()) throw ConfigError("override key '" + key + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config file '" + path + "' is not valid JSON");
  return doc;
}

}  // namespace blochsim
