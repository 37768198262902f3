#include "blochsim/runner.hpp"

#include "blochsim/adiabatic_frame.hpp"
#include "blochsim/analysis.hpp"
#include "blochsim/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#ifndef BLOCHSIM_VERSION
#define BLOCHSIM_VERSION "0.0.0"
#endif

namespace blochsim {

using nlohmann::json;

std::string_view tool_version() { return BLOCHSIM_VERSION; }

ScenarioConfig resolve(ScenarioConfig config) {
  if (!config.plan.dt) {
    const auto model = make_model(config.model);
    config.plan.dt = default_dt(*model);
  }
  return config;
}

namespace {

struct Realization {
  std::vector<RVector> populations;
  std::vector<double> fidelity;
  std::vector<double> delta_e;
  double max_norm_deviation = 0.0;
  double window_loss = 0.0;
  double edge_mass = 0.0;
};

ModelSpec with_seed(const ModelSpec& spec, std::uint64_t seed) {
  ModelSpec out = spec;
  std::visit(
      [seed](auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (!std::is_same_v<T, LZGridSpec>) {
          if (s.disorder) s.disorder->seed = seed;
        }
      },
      out);
  return out;
}

bool has_disorder(const ModelSpec& spec) {
  return std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LZGridSpec>) {
          return false;
        } else {
          return s.disorder.has_value() && s.disorder->std_dev != 0.0;
        }
      },
      spec);
}

PropagationPlan make_plan(const ScenarioConfig& c) {
  PropagationPlan p = PropagationPlan::uniform(c.plan.t0, c.plan.t1, *c.plan.dt, c.plan.output_interval);
  for (double t : c.analysis.probe_times) p.output_times.push_back(t);
  std::sort(p.output_times.begin(), p.output_times.end());
  p.method = c.plan.method;
  p.backend = c.plan.backend;
  p.norm_drift_rate = c.plan.norm_drift_rate;
  p.max_window_loss = c.plan.max_window_loss;
  p.follow_window = c.plan.follow_window;
  return p;
}

// sqrt(<H^2> - <H>^2) through the structured product
double delta_energy(const Model& model, double t, const CVector& psi, const Tolerances& tol) {
  CVector hpsi;
  model.apply(t, psi, hpsi);
  return energy_uncertainty(psi, hpsi, tol);
}

// Frames are reused between output times that share the drive phase.
class FrameCache {
 public:
  FrameCache(const Model& model, const PropagationPlan& plan) : model_(model), plan_(plan) {
    std::optional<double> period = model.drive_period();
    // a fixed LZ window is not periodic in time, only the co-moving one is
    if (!period && plan.follow_window) period = model.recentering_period();
    if (model.time_independent()) {
      steps_per_period_ = 1;
    } else if (period) {
      const double m = *period / plan.dt;
      const long r = std::lround(m);
      if (r >= 1 && std::abs(m - static_cast<double>(r)) <= 1e-9 * m) steps_per_period_ = r;
    }
  }

  const AdiabaticFrame& at(double model_t, double global_t) {
    long key = -1;
    if (steps_per_period_ > 0) {
      const long j = std::lround((global_t - plan_.t0) / plan_.dt);
      key = j % steps_per_period_;
    }
    if (key >= 0) {
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
      return cache_.emplace(key, instantaneous_frame(model_.hamiltonian(model_t), model_t)).first->second;
    }
    scratch_ = instantaneous_frame(model_.hamiltonian(model_t), model_t);
    return scratch_;
  }

 private:
  const Model& model_;
  const PropagationPlan& plan_;
  long steps_per_period_ = 0;
  std::unordered_map<long, AdiabaticFrame> cache_;
  AdiabaticFrame scratch_;
};

// The oscillator's ground level is physical, so only its top edge counts.
double edge_mass(const RVector& p, double fraction, bool lower_edge) {
  const auto n = static_cast<Index>(std::floor(fraction * static_cast<double>(p.size())));
  if (n == 0) return 0.0;
  return (lower_edge ? p.head(n).sum() : 0.0) + p.tail(n).sum();
}

Realization run_one(const ScenarioConfig& c, std::uint64_t seed) {
  const auto model = make_model(with_seed(c.model, seed));
  const StateVector psi0 = initial_state(c.initial_state, *model);
  const PropagationPlan plan = make_plan(c);
  const bool adiabatic = c.analysis.population_basis == PopulationBasis::Adiabatic;
  FrameCache frames(*model, plan);

  Realization r;
  const double period = model->recentering_period().value_or(0.0);
  auto observe = [&](std::size_t, double t, const StateVector& psi, long shift) {
    const double tm = t - static_cast<double>(shift) * period;
    RVector p = adiabatic ? adiabatic_populations(psi, frames.at(tm, t)) : psi.probabilities();
    const CVector fixed = model->unshift(psi.amplitudes(), shift);
    r.fidelity.push_back(std::min(1.0, std::norm(psi0.amplitudes().dot(fixed))));
    r.delta_e.push_back(delta_energy(*model, tm, psi.amplitudes(), c.tolerances));
    r.edge_mass = std::max(r.edge_mass, edge_mass(p, c.frames.interior_fraction, model->kind() != ModelKind::DrivenHO));
    r.populations.push_back(std::move(p));
  };
  const Trajectory traj = propagate(*model, psi0, plan, observe, false);
  r.max_norm_deviation = traj.max_norm_deviation;
  r.window_loss = traj.window_loss;
  return r;
}

std::vector<long> population_labels(const Model& model, PopulationBasis basis) {
  std::vector<long> labels(static_cast<std::size_t>(model.dim()));
  for (Index i = 0; i < model.dim(); ++i) {
    labels[static_cast<std::size_t>(i)] = basis == PopulationBasis::Model ? model.label(i) : static_cast<long>(i);
  }
  return labels;
}

std::vector<double> series_of(SeriesKind kind, const std::vector<ObservableRow>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  const double s0 = rows.empty() ? 0.0 : rows.front().sigma_idx;
  for (const auto& row : rows) {
    switch (kind) {
      case SeriesKind::SigmaIdx:
        out.push_back(row.sigma_idx);
        break;
      case SeriesKind::ExcessSigma:
        out.push_back(std::sqrt(std::max(0.0, row.sigma_idx * row.sigma_idx - s0 * s0)));
        break;
      case SeriesKind::DeltaE:
        out.push_back(row.delta_e);
        break;
      case SeriesKind::Participation:
        out.push_back(row.participation);
        break;
    }
  }
  return out;
}

double dt_window_limit(const Model& model, double t0) {
  const SpectralBounds b = model.spectral_bounds(t0);
  return 0.02 / std::max(std::abs(b.lower), std::abs(b.upper));
}

json analyze(const ScenarioConfig& c, const Model& model, const std::vector<double>& times,
             const std::vector<RVector>& pops, const std::vector<ObservableRow>& rows,
             const std::vector<double>& pop_fidelity, json& warnings) {
  json a = json::object();

  json revival = json::array();
  for (double tp : c.analysis.probe_times) {
    auto it = std::min_element(times.begin(), times.end(),
                               [tp](double x, double y) { return std::abs(x - tp) < std::abs(y - tp); });
    const auto k = static_cast<std::size_t>(it - times.begin());
    revival.push_back({{"t_probe", tp},
                       {"t", times[k]},
                       {"fidelity", rows[k].fidelity},
                       {"population_fidelity", pop_fidelity[k]},
                       {"total_variation", total_variation(pops.front(), pops[k])}});
  }
  a["revival"] = revival;

  auto widest = std::max_element(rows.begin(), rows.end(),
                                 [](const auto& x, const auto& y) { return x.sigma_idx < y.sigma_idx; });
  a["width"] = {{"max_sigma_idx", widest->sigma_idx},
                {"t_at_max", widest->t},
                {"max_sigma_energy", widest->sigma_idx * model.level_spacing()}};

  if (c.analysis.population_basis == PopulationBasis::Model) {
    const double offset = static_cast<double>(model.label(0));
    std::vector<double> com;
    for (const auto& p : pops) com.push_back(center_of_mass(p, offset));
    const auto [lo, hi] = std::minmax_element(com.begin(), com.end());
    a["center_of_mass"] = {{"min", *lo},
                           {"max", *hi},
                           {"excursion", *hi - *lo},
                           {"t_at_min", times[static_cast<std::size_t>(lo - com.begin())]},
                           {"t_at_max", times[static_cast<std::size_t>(hi - com.begin())]}};
  }

  // Series analyses use the uniform output grid (probe times may add points)
  // and time elapsed since t0, so fit windows are independent of the origin.
  std::vector<double> ut;
  std::vector<ObservableRow> urows;
  {
    const double h = c.plan.output_interval;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double q = (times[k] - c.plan.t0) / h;
      if (std::abs(q - std::round(q)) < 1e-6) {
        ut.push_back(times[k] - c.plan.t0);
        urows.push_back(rows[k]);
      }
    }
  }

  if (c.analysis.period_series) {
    const auto s = series_of(*c.analysis.period_series, urows);
    json entry{{"series", to_string(*c.analysis.period_series)},
               {"smoothing", c.analysis.period_smoothing},
               {"min_lag", c.analysis.period_min_lag}};
    try {
      const auto est = estimate_period(ut, s, {c.analysis.period_smoothing, c.analysis.period_min_lag, 0.1});
      entry["period"] = est.period;
      entry["uncertainty"] = est.uncertainty;
      entry["peak_correlation"] = est.peak_correlation;
    } catch (const NumericalError& e) {
      entry["error"] = e.what();
      warnings.push_back(std::string("period estimate failed: ") + e.what());
    }
    a["period"] = entry;
  }

  if (c.analysis.fit_window) {
    const auto s = series_of(c.analysis.fit_series, urows);
    json entry{{"series", to_string(c.analysis.fit_series)},
               {"window", {(*c.analysis.fit_window)[0], (*c.analysis.fit_window)[1]}}};
    try {
      const auto fit = fit_power_law(ut, s, (*c.analysis.fit_window)[0], (*c.analysis.fit_window)[1]);
      entry["gamma"] = fit.gamma;
      entry["prefactor"] = fit.prefactor;
      entry["residual"] = fit.residual;
      entry["points"] = fit.points;
    } catch (const std::exception& e) {
      entry["error"] = e.what();
      warnings.push_back(std::string("power-law fit failed: ") + e.what());
    }
    a["power_law"] = entry;
  }

  if (c.analysis.relocalization_window) {
    const double h = c.plan.output_interval;
    const int window = 2 * static_cast<int>(std::lround(0.5 * c.analysis.relocalization_smoothing / h)) + 1;
    const auto pr = moving_average(series_of(SeriesKind::Participation, urows), window);
    const auto& w = *c.analysis.relocalization_window;
    json entry{{"window", {w[0], w[1]}}, {"smoothing", c.analysis.relocalization_smoothing}};
    try {
      const auto m = minimum_in_window(ut, pr, w[0], w[1]);
      entry["t_min"] = m.t;
      entry["participation_min"] = m.value;
      entry["participation_max"] = *std::max_element(pr.begin(), pr.end());
    } catch (const ConfigError& e) {
      entry["error"] = e.what();
      warnings.push_back(std::string("relocalization search failed: ") + e.what());
    }
    a["relocalization"] = entry;
  }

  if (c.analysis.detuning_n_max > 0) {
    if (const auto* ho = std::get_if<DrivenHOSpec>(&c.model)) {
      const auto table = detuning_table(ho->Omega, ho->omega, c.analysis.detuning_n_max);
      json entries = json::array();
      for (const auto& d : table.entries) {
        entries.push_back({{"n", d.n},
                           {"delta", d.delta},
                           {"super_period", std::isfinite(d.super_period) ? json(d.super_period) : json(nullptr)}});
      }
      const auto& res = table.entries[static_cast<std::size_t>(table.resonant_n - 1)];
      a["detuning"] = {{"entries", entries},
                       {"resonant_n", table.resonant_n},
                       {"exact_resonance", table.exact_resonance},
                       {"super_period",
                        std::isfinite(res.super_period) ? json(res.super_period) : json(nullptr)}};
    }
  }
  return a;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& input, const RunOptions& options) {
  RunResult result;
  result.config = resolve(input);
  const ScenarioConfig& c = result.config;
  result.hash = scenario_hash(c);

  const auto reference_model = make_model(c.model);
  json warnings = json::array();
  if (*c.plan.dt > dt_window_limit(*reference_model, c.plan.t0)) {
    std::ostringstream msg;
    msg << "dt = " << *c.plan.dt << " exceeds 0.02 / spectral radius = " << dt_window_limit(*reference_model, c.plan.t0)
        << "; accuracy is governed by the local commutator, check the convergence pair";
    warnings.push_back(msg.str());
  }

  // identical realizations are computed once
  const int n_real = c.ensemble.n_realizations;
  const int distinct = has_disorder(c.model) ? n_real : 1;
  std::vector<Realization> parts(static_cast<std::size_t>(distinct));
  {
    int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, distinct);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= distinct) return;
        try {
          parts[static_cast<std::size_t>(i)] = run_one(c, c.ensemble.master_seed + static_cast<std::uint64_t>(i));
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(distinct);
        }
      }
    };
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
  }

  const PropagationPlan plan = make_plan(c);
  {
    const double dir = 1.0;
    for (long j : plan.output_steps()) result.times.push_back(c.plan.t0 + dir * *c.plan.dt * static_cast<double>(j));
  }
  const std::size_t n_out = result.times.size();

  // fixed-order reduction
  std::vector<double> fidelity(n_out, 0.0);
  std::vector<double> delta_e(n_out, 0.0);
  std::vector<double> pop_fidelity(n_out, 0.0);
  result.populations.assign(n_out, RVector::Zero(reference_model->dim()));
  double max_dev = 0.0;
  double max_loss = 0.0;
  double max_edge = 0.0;
  for (const auto& part : parts) {
    for (std::size_t k = 0; k < n_out; ++k) {
      result.populations[k] += part.populations[k];
      fidelity[k] += part.fidelity[k];
      delta_e[k] += part.delta_e[k];
    }
    max_dev = std::max(max_dev, part.max_norm_deviation);
    max_loss = std::max(max_loss, part.window_loss);
    max_edge = std::max(max_edge, part.edge_mass);
  }
  if (distinct > 1) {
    const double inv = 1.0 / distinct;
    for (std::size_t k = 0; k < n_out; ++k) {
      result.populations[k] *= inv;
      fidelity[k] *= inv;
      delta_e[k] *= inv;
    }
  }
  for (std::size_t k = 0; k < n_out; ++k) {
    pop_fidelity[k] = population_fidelity(result.populations.front(), result.populations[k]);
  }

  result.observables.reserve(n_out);
  for (std::size_t k = 0; k < n_out; ++k) {
    const RVector& p = result.populations[k];
    result.observables.push_back(
        ObservableRow{result.times[k], fidelity[k], index_width(p), delta_e[k], participation_ratio(p)});
  }
  result.labels = population_labels(*reference_model, c.analysis.population_basis);

  if (max_edge > 1e-6) {
    std::ostringstream msg;
    msg << "population " << max_edge << " reached the outer " << c.frames.interior_fraction
        << " of the basis; enlarge the truncation";
    warnings.push_back(msg.str());
  }

  json report;
  report["scenario"] = c.name;
  report["scenario_hash"] = result.hash;
  report["dt"] = *c.plan.dt;
  report["tool_version"] = tool_version();
  report["model"] = std::string(to_string(reference_model->kind()));
  report["dimension"] = reference_model->dim();
  report["population_basis"] = c.analysis.population_basis == PopulationBasis::Adiabatic ? "adiabatic" : "model";
  json seeds = json::array();
  for (int i = 0; i < n_real; ++i) seeds.push_back(c.ensemble.master_seed + static_cast<std::uint64_t>(i));
  report["ensemble"] = {{"n_realizations", n_real},
                        {"distinct_realizations", distinct},
                        {"master_seed", c.ensemble.master_seed},
                        {"seeds", seeds}};
  report["norm"] = {{"max_deviation", max_dev}, {"window_loss", max_loss}};
  report["edge_mass"] = max_edge;
  report["analysis"] = analyze(c, *reference_model, result.times, result.populations, result.observables,
                               pop_fidelity, warnings);
  report["warnings"] = warnings;
  result.report = std::move(report);
  return result;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

std::map<std::string, std::string> render_bundle(const RunResult& r) {
  std::map<std::string, std::string> files;

  std::string pops = "t,n,P\n";
  pops.reserve(r.times.size() * r.labels.size() * 30);
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
      append_number(pops, r.times[k]);
      pops += ',';
      pops += std::to_string(r.labels[i]);
      pops += ',';
      append_number(pops, r.populations[k][static_cast<Index>(i)]);
      pops += '\n';
    }
  }
  files["populations.csv"] = std::move(pops);

  std::string obs = "t,fidelity,sigma_idx,deltaE,participation\n";
  for (const auto& row : r.observables) {
    for (double v : {row.t, row.fidelity, row.sigma_idx, row.delta_e}) {
      append_number(obs, v);
      obs += ',';
    }
    append_number(obs, row.participation);
    obs += '\n';
  }
  files["observables.csv"] = std::move(obs);

  files["report.json"] = r.report.dump(2) + "\n";

  json meta = to_json(r.config, false);
  meta["provenance"] = {{"tool", "blochsim"},
                        {"tool_version", tool_version()},
                        {"scenario_hash", r.hash},
                        {"dt", *r.config.plan.dt},
                        {"master_seed", r.config.ensemble.master_seed}};
  files["metadata.json"] = meta.dump(2) + "\n";
  return files;
}

void write_atomically(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw ConfigError("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

BundleFiles write_bundle(const RunResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  BundleFiles out;
  std::string all;
  for (const auto& [name, contents] : render_bundle(result)) {
    write_atomically((fs::path(dir) / name).string(), contents);
    const std::string h = fnv1a_hex(contents);
    out.file_hashes[name] = h;
    all += name + ":" + h + "\n";
  }
  out.bundle_hash = fnv1a_hex(all);
  return out;
}

std::string render_spectrum(const ScenarioConfig& config, const std::vector<double>& times) {
  const auto model = make_model(config.model);
  std::string out = "t,kind,index,E\n";
  const auto* lz = dynamic_cast<const LandauZenerGrid*>(model.get());
  for (double t : times) {
    const HermitianOperator h = model->hamiltonian(t);
    RVector diabatic = h.matrix().diagonal().real();
    Index first = 0;
    Index last = model->dim() - 1;
    for (Index i = 0; i < model->dim(); ++i) {
      if (lz) {
        // auxiliary tail levels are not physical diabatic states
        const Index per = lz->spec().levels_per_branch();
        const Index local = i % per;
        if (local < lz->first_explicit() || local > lz->last_explicit()) continue;
      }
      append_number(out, t);
      out += ",diabatic," + std::to_string(model->label(i)) + ",";
      append_number(out, diabatic[i]);
      out += '\n';
    }
    const RVector e = eig_hermitian(h).values;
    if (lz) {
      // keep the ranks whose energies lie inside the explicit diabatic range
      const RVector d = lz->diabatic_energies(t);
      const double lo = std::min(d[lz->last_explicit()], d[lz->spec().levels_per_branch() + lz->last_explicit()]);
      const double hi = std::max(d[lz->first_explicit()], d[lz->spec().levels_per_branch() + lz->first_explicit()]);
      first = 0;
      while (first < e.size() && e[first] < lo) ++first;
      last = e.size() - 1;
      while (last > 0 && e[last] > hi) --last;
    }
    for (Index k = first; k <= last; ++k) {
      append_number(out, t);
      out += ",adiabatic," + std::to_string(k) + ",";
      append_number(out, e[k]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace blochsim
