#include "blochsim/analysis.hpp"

#include "blochsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace blochsim {

double index_width(const RVector& p) {
  double mean = 0.0;
  double second = 0.0;
  for (Index n = 0; n < p.size(); ++n) {
    const double x = static_cast<double>(n);
    mean += x * p[n];
    second += x * x * p[n];
  }
  const double total = p.sum();
  mean /= total;
  second /= total;
  return std::sqrt(std::max(0.0, second - mean * mean));
}

double center_of_mass(const RVector& p, double offset) {
  double mean = 0.0;
  for (Index n = 0; n < p.size(); ++n) mean += static_cast<double>(n) * p[n];
  return mean / p.sum() + offset;
}

double participation_ratio(const RVector& p) {
  const double s = p.squaredNorm();
  if (!(s > 0.0)) throw NumericalError("participation ratio of an empty distribution");
  const double total = p.sum();
  return total * total / s;
}

double population_fidelity(const RVector& p, const RVector& q) {
  if (p.size() != q.size()) throw DimensionMismatch("distributions differ in length");
  const double s = (p.cwiseMax(0.0).cwiseSqrt().cwiseProduct(q.cwiseMax(0.0).cwiseSqrt())).sum();
  // rounding can push normalized overlaps a few ulps past one
  return std::min(1.0, s * s);
}

double total_variation(const RVector& p, const RVector& q) {
  if (p.size() != q.size()) throw DimensionMismatch("distributions differ in length");
  return 0.5 * (p - q).cwiseAbs().sum();
}

double revival_fidelity(const Trajectory& traj, double t_probe) {
  if (traj.states.empty()) throw ConfigError("trajectory holds no states");
  const double tol = 1e-9 * std::max(1.0, std::abs(t_probe)) + 1e-6 * traj.dt;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (std::abs(traj.times[k] - t_probe) <= tol) {
      if (traj.shifts[k] != traj.shifts.front()) {
        throw ContractViolation("revival fidelity across window re-centerings is not defined");
      }
      return traj.states.front().fidelity(traj.states[k]);
    }
  }
  std::ostringstream msg;
  msg << "probe time " << t_probe << " is not an output time";
  throw ConfigError(msg.str());
}

std::vector<double> moving_average(const std::vector<double>& v, int window) {
  if (window <= 1) return v;
  const int half = window / 2;
  const int n = static_cast<int>(v.size());
  std::vector<double> out(v.size());
  for (int i = 0; i < n; ++i) {
    const int a = std::max(0, i - half);
    const int b = std::min(n - 1, i + half);
    double s = 0.0;
    for (int j = a; j <= b; ++j) s += v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s / (b - a + 1);
  }
  return out;
}

namespace {

double sampling_step(const std::vector<double>& t) {
  if (t.size() < 3) throw ConfigError("series needs at least 3 samples");
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-6 * h) throw ConfigError("series is not uniformly sampled");
  }
  return h;
}

}  // namespace

PeriodEstimate estimate_period(const std::vector<double>& t, const std::vector<double>& values,
                               const PeriodOptions& options) {
  if (t.size() != values.size()) throw DimensionMismatch("time and value series differ in length");
  const double h = sampling_step(t);
  const int window = options.smoothing > 0.0 ? 2 * static_cast<int>(std::lround(0.5 * options.smoothing / h)) + 1 : 1;
  std::vector<double> x = moving_average(values, window);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (double& v : x) v -= mean;
  const std::size_t n = x.size();
  const double var = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
  const double scale = std::accumulate(values.begin(), values.end(), 0.0,
                                       [](double a, double b) { return std::max(a, std::abs(b)); });
  if (!(var > 1e-24 * std::max(1.0, scale * scale) * static_cast<double>(n))) {
    throw NumericalError("series is flat; no period can be estimated");
  }
  // Pearson correlation between the series and its lagged copy. Unlike the
  // biased estimator it has no (N - k)/N taper that drags peaks to shorter lags.
  // Lags are limited so that the overlap keeps a third of the series.
  const std::size_t max_lag = n - std::max<std::size_t>(n / 3, 3);
  std::vector<double> r(max_lag + 1, 0.0);
  r[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    const std::size_t m = n - k;
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      ma += x[i];
      mb += x[i + k];
    }
    ma /= static_cast<double>(m);
    mb /= static_cast<double>(m);
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = x[i] - ma;
      const double b = x[i + k] - mb;
      sab += a * b;
      saa += a * a;
      sbb += b * b;
    }
    r[k] = saa > 0.0 && sbb > 0.0 ? sab / std::sqrt(saa * sbb) : 0.0;
  }
  const std::size_t nr = r.size();
  std::size_t start = 1;
  while (start < nr && r[start] >= 0.0) ++start;
  const auto min_lag = static_cast<std::size_t>(std::ceil(options.min_lag / h));
  start = std::max(start, min_lag);

  std::vector<std::size_t> peaks;
  for (std::size_t k = std::max<std::size_t>(start, 1); k + 1 < nr; ++k) {
    if (r[k] >= r[k - 1] && r[k] > r[k + 1]) peaks.push_back(k);
  }
  if (peaks.empty()) throw NumericalError("autocorrelation has no peak; series too short for a period");
  double best = -1.0;
  for (std::size_t k : peaks) best = std::max(best, r[k]);
  if (best < options.significance) {
    std::ostringstream msg;
    msg << "largest autocorrelation peak " << best << " is below the significance level " << options.significance;
    throw NumericalError(msg.str());
  }
  std::size_t pick = peaks.front();
  for (std::size_t k : peaks) {
    if (r[k] >= 0.9 * best) {
      pick = k;
      break;
    }
  }
  double lag = static_cast<double>(pick);
  const double a = r[pick - 1];
  const double b = r[pick];
  const double c = r[pick + 1];
  const double denom = a - 2.0 * b + c;
  if (denom < 0.0) lag += 0.5 * (a - c) / denom;
  return PeriodEstimate{lag * h, h, b};
}

PowerLawFit fit_power_law(const std::vector<double>& t, const std::vector<double>& sigma, double t_a,
                          double t_b) {
  if (t.size() != sigma.size()) throw DimensionMismatch("time and width series differ in length");
  if (!(t_b > t_a) || !(t_a > 0.0)) throw ConfigError("fit window must satisfy 0 < t_a < t_b");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t_a && t[i] <= t_b) {
      if (!(sigma[i] > 0.0)) throw NumericalError("width must be positive inside the fit window");
      lx.push_back(std::log(t[i]));
      ly.push_back(std::log(sigma[i]));
    }
  }
  if (lx.size() < 8) throw ConfigError("fit window holds fewer than 8 points");
  const double m = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / m;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  PowerLawFit fit;
  fit.gamma = sxy / sxx;
  const double intercept = my - fit.gamma * mx;
  fit.prefactor = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (intercept + fit.gamma * lx[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / m);
  fit.points = static_cast<int>(lx.size());
  fit.t_a = t_a;
  fit.t_b = t_b;
  return fit;
}

DetuningTable detuning_table(double Omega, double omega, int n_max) {
  if (n_max < 1) throw ConfigError("detuning table needs n_max >= 1");
  DetuningTable table;
  double smallest = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    Detuning d;
    d.n = n;
    d.delta = Omega - n * omega;
    d.super_period = d.delta == 0.0 ? std::numeric_limits<double>::infinity()
                                    : 2.0 * std::numbers::pi / std::abs(d.delta);
    if (std::abs(d.delta) < smallest) {
      smallest = std::abs(d.delta);
      table.resonant_n = n;
    }
    table.entries.push_back(d);
  }
  table.exact_resonance = smallest == 0.0;
  return table;
}

Extremum minimum_in_window(const std::vector<double>& t, const std::vector<double>& values, double t_a,
                           double t_b) {
  Extremum e;
  e.value = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t_a && t[i] <= t_b && values[i] < e.value) {
      e = Extremum{t[i], values[i], i};
      found = true;
    }
  }
  if (!found) throw ConfigError("search window holds no samples");
  return e;
}

}  // namespace blochsim
