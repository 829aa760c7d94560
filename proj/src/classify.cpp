#include "entrytime/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "entrytime/errors.hpp"

namespace entrytime {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int effective_rmax(const EntryTimeTable& table, const ClassifyThresholds& th) {
  const int r = th.r_max == 0 ? table.r_max : th.r_max;
  if (r > table.r_max) throw InvalidArgument("classify: thresholds.r_max exceeds the table");
  if (r < 2 * th.plateau_window) throw InvalidArgument("classify: r_max must be at least 2 * plateau_window");
  return r;
}

double window_mean(const EntryTimeTable& table, int first, int last) {
  double s = 0.0;
  for (int r = first; r <= last; ++r) s += table.u[static_cast<std::size_t>(r)].value();
  return s / (last - first + 1);
}

bool superstable_signal(const TailStatistics& s, const ClassifyThresholds& th) {
  return s.tail_mean < th.eps_super || s.growth_elasticity >= th.eps_trend;
}

}  // namespace

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Unstable: return "Unstable";
    case Verdict::Stable: return "Stable";
    case Verdict::Superstable: return "Superstable";
    case Verdict::FiniteTimeExtinction: return "FiniteTimeExtinction";
  }
  return "unknown";
}

void ClassifyThresholds::validate() const {
  if (r_max < 0) throw InvalidArgument("ClassifyThresholds: r_max must be >= 0");
  if (!(eps_super > 0.0) || !std::isfinite(eps_super)) throw InvalidArgument("ClassifyThresholds: eps_super must be positive");
  if (!(eps_tailsum > 0.0) || !std::isfinite(eps_tailsum)) {
    throw InvalidArgument("ClassifyThresholds: eps_tailsum must be positive");
  }
  if (!(eps_trend > 0.0) || !std::isfinite(eps_trend)) throw InvalidArgument("ClassifyThresholds: eps_trend must be positive");
  if (plateau_window < 1) throw InvalidArgument("ClassifyThresholds: plateau_window must be >= 1");
}

TailStatistics tail_statistics(const EntryTimeTable& table, const ClassifyThresholds& th) {
  th.validate();
  const int rmax = effective_rmax(table, th);
  const int w = th.plateau_window;

  TailStatistics s;
  s.r_max = rmax;
  s.second_half_start = rmax / 2 + 1;
  for (int r = 0; r <= rmax; ++r) {
    if (table.u[static_cast<std::size_t>(r)].is_infinite()) s.any_infinite = true;
  }
  for (int r = s.second_half_start; r <= rmax + 1; ++r) {
    const EntryStatus st = table.status[static_cast<std::size_t>(r)];
    if (st == EntryStatus::HorizonExceeded) s.any_horizon_exceeded = true;
    if (st == EntryStatus::Inconclusive) s.any_inconclusive = true;
  }
  if (s.any_infinite) {
    s.last_u = s.tail_mean = s.tail_sum = s.window_sum = kInf;
    return s;
  }

  s.last_u = table.u[static_cast<std::size_t>(rmax)].value();
  s.tail_mean = window_mean(table, rmax - w + 1, rmax);
  s.window_sum = s.tail_mean * w;
  for (int r = s.second_half_start; r <= rmax; ++r) s.tail_sum += table.u[static_cast<std::size_t>(r)].value();

  // Least squares of u against r over the second half.
  const int n = rmax - s.second_half_start + 1;
  if (n >= 2) {
    double mr = 0.0;
    double mu = 0.0;
    for (int r = s.second_half_start; r <= rmax; ++r) {
      mr += r;
      mu += table.u[static_cast<std::size_t>(r)].value();
    }
    mr /= n;
    mu /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (int r = s.second_half_start; r <= rmax; ++r) {
      sxy += (r - mr) * (table.u[static_cast<std::size_t>(r)].value() - mu);
      sxx += (r - mr) * (r - mr);
    }
    s.trend_slope = sxy / sxx;
  }

  const int half = rmax / 2;
  const double early = window_mean(table, half - w + 1, half);
  const double r_early = half - 0.5 * (w - 1);
  const double r_late = rmax - 0.5 * (w - 1);
  if (s.tail_mean == 0.0) {
    s.growth_elasticity = early > 0.0 ? kInf : 0.0;
  } else if (early > 0.0 && r_early > 0.0) {
    s.growth_elasticity = std::log(early / s.tail_mean) / std::log(r_late / r_early);
  }
  return s;
}

Classification classify(const EntryTimeTable& table, const ClassifyThresholds& th) {
  Classification c;
  c.thresholds = th;
  c.diagnostics = tail_statistics(table, th);
  const TailStatistics& s = c.diagnostics;
  c.inconclusive = s.any_inconclusive;

  c.stable_test_passed = !s.any_infinite && !s.any_horizon_exceeded;
  if (!c.stable_test_passed) {
    c.verdict = Verdict::Unstable;
    return c;
  }
  c.extinction_test_passed = s.tail_sum < th.eps_tailsum;
  c.superstable_test_passed = c.extinction_test_passed || superstable_signal(s, th);
  if (c.extinction_test_passed) {
    c.verdict = Verdict::FiniteTimeExtinction;
    for (int r = 0; r <= s.r_max; ++r) c.k += table.u[static_cast<std::size_t>(r)].value();
    c.k_error = s.window_sum;
  } else if (c.superstable_test_passed) {
    c.verdict = Verdict::Superstable;
  } else {
    c.verdict = Verdict::Stable;
    c.nu = 1.0 / s.tail_mean;
  }
  return c;
}

std::vector<double> default_growth_grid(const EntryTimeTable& table) {
  std::vector<double> grid;
  double last = 1.0;
  for (std::size_t r = 1; r < table.t.size(); ++r) {
    if (table.t[r].is_finite() && table.t[r].value() > 0.0) {
      grid.push_back(table.t[r].value());
      last = std::max(last, table.t[r].value());
    }
  }
  for (double t = 2.0 * last; t < 2e7; t *= 2.0) grid.push_back(t);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

GrowthEstimate growth_characteristic(const NormTrajectory& traj, const EntryTimeTable& table,
                                     std::span<const double> t_grid, const ClassifyThresholds& th,
                                     double minus_infinity_floor) {
  std::vector<double> grid;
  for (double t : t_grid) {
    if (!std::isfinite(t)) throw InvalidArgument("growth_characteristic: grid must be finite");
    if (t > 0.0) grid.push_back(t);
  }
  if (grid.empty()) throw InvalidArgument("growth_characteristic: grid needs a positive point");
  const ExtendedReal& last = table.t.back();
  if (last.is_finite() && *std::max_element(grid.begin(), grid.end()) < last.value()) {
    throw InvalidArgument("growth_characteristic: grid must reach t_rmax");
  }

  auto rate = [&](double t) {
    const double w = traj.log_evaluate(t) / t;
    return w < minus_infinity_floor ? -kInf : w;
  };

  GrowthEstimate g;
  g.t_large = *std::max_element(grid.begin(), grid.end());
  g.omega_large_t = rate(g.t_large);
  g.omega_inf_grid = kInf;
  for (double t : grid) g.omega_inf_grid = std::min(g.omega_inf_grid, rate(t));

  const TailStatistics s = tail_statistics(table, th);
  if (s.any_infinite) {
    g.omega_entry = 0.0;
  } else if (s.tail_sum < th.eps_tailsum || superstable_signal(s, th)) {
    g.omega_entry = -kInf;
  } else {
    g.omega_entry = -1.0 / s.tail_mean;
  }

  const double w[3] = {g.omega_large_t, g.omega_inf_grid, g.omega_entry};
  const int minus_inf = static_cast<int>(std::count(std::begin(w), std::end(w), -kInf));
  if (minus_inf == 3) {
    g.all_minus_infinity = true;
    g.agreement_spread = 0.0;
  } else if (minus_inf > 0) {
    g.agreement_spread = kInf;
  } else {
    g.agreement_spread = *std::max_element(std::begin(w), std::end(w)) - *std::min_element(std::begin(w), std::end(w));
  }
  return g;
}

GelfandEstimate gelfand_spectral_radius(const Matrix& m, int n_max, std::uint64_t seed) {
  if (!m.is_square()) throw InvalidArgument("gelfand_spectral_radius: square matrix required");
  if (!m.all_finite()) throw InvalidArgument("gelfand_spectral_radius: non-finite entries");
  if (n_max < 1) throw InvalidArgument("gelfand_spectral_radius: n_max must be >= 1");

  GelfandEstimate out;
  out.sequence.push_back(operator_norm(m, 1e-13, seed));
  int squarings = 0;
  while ((1LL << squarings) < n_max) ++squarings;

  Matrix p = m;
  double log_scale = 0.0;  // M^{2^k} = e^{log_scale} p
  for (int k = 1; k <= squarings; ++k) {
    const double s = p.max_abs();
    if (s == 0.0) {
      out.sequence.push_back(0.0);
      break;
    }
    p = p.scaled(1.0 / s);
    log_scale += std::log(s);
    p = p * p;
    log_scale *= 2.0;
    if (!p.all_finite() || !std::isfinite(log_scale)) {
      throw NumericsFailure("gelfand_spectral_radius: power left the double range", out.sequence.back());
    }
    const double n = operator_norm(p, 1e-13, seed);
    if (n == 0.0) {
      out.sequence.push_back(0.0);
      break;
    }
    const double a = std::exp((log_scale + std::log(n)) / std::ldexp(1.0, k));
    if (!std::isfinite(a)) throw NumericsFailure("gelfand_spectral_radius: non-finite term", out.sequence.back());
    out.sequence.push_back(a);
  }

  const std::size_t k = out.sequence.size();
  if (k == 1 || out.sequence[k - 1] == 0.0) {
    out.radius = out.sequence[k - 1];
  } else {
    // a_k ≈ ρ·c^{1/2^k}, so a_k²/a_{k-1} cancels the leading correction.
    out.radius = out.sequence[k - 1] * out.sequence[k - 1] / out.sequence[k - 2];
  }
  return out;
}

GelfandEstimate gelfand_spectral_radius(const SemigroupModel& model, double t, int n_max) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("gelfand_spectral_radius: t must be finite and >= 0");
  if (const auto* mat = model.as<MatrixSemigroup>()) {
    return gelfand_spectral_radius(matrix_exponential(mat->generator, t), n_max, model.power_seed());
  }
  if (const auto* frac = model.as<FractionalIntegration>()) {
    return gelfand_spectral_radius(fractional_integration_matrix(t, frac->grid_size), n_max, model.power_seed());
  }
  if (const auto* sd = model.as<ScalarDecay>()) {
    Matrix one(1, 1, std::exp(-sd->nu * t));
    return gelfand_spectral_radius(one, n_max, model.power_seed());
  }
  throw InvalidArgument("gelfand_spectral_radius: model " + model.kind_name() + " has no matrix representation");
}

std::vector<double> default_nu_grid() {
  std::vector<double> g;
  for (double nu = 1.0; nu <= 1024.0; nu *= 2.0) g.push_back(nu);
  return g;
}

StabilityIndices stability_and_extinction_indices(const NormTrajectory& traj, const EntryTimeTable& table,
                                                  std::span<const double> nu_grid, const ClassifyThresholds& th,
                                                  double sample_step) {
  if (nu_grid.empty()) throw InvalidArgument("stability indices: empty nu grid");
  for (double nu : nu_grid) {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("stability indices: nu must be positive and finite");
  }
  if (!(sample_step > 0.0) || !std::isfinite(sample_step)) throw InvalidArgument("stability indices: bad sample step");

  const TailStatistics s = tail_statistics(table, th);
  StabilityIndices out;
  out.nu_grid.assign(nu_grid.begin(), nu_grid.end());
  if (s.any_infinite) {
    out.k_partial_sum = kInf;
    out.k_hat_sum = kInf;
  } else {
    out.nu_hat = s.tail_mean > 0.0 ? 1.0 / s.tail_mean : kInf;
    for (int r = 0; r <= s.r_max; ++r) out.k_partial_sum += table.u[static_cast<std::size_t>(r)].value();
    out.sum_converged = s.tail_sum < th.eps_tailsum;
    out.k_hat_sum = out.sum_converged ? out.k_partial_sum : kInf;
  }

  double t_end = 1.0;
  for (const ExtendedReal& t : table.t) {
    if (t.is_finite()) t_end = std::max(t_end, 2.0 * t.value());
  }
  // Expensive trajectories (large fractional meshes) make dense sampling costly: cap the count.
  const double step = std::max(sample_step, t_end / kMaxOvershootSamples);
  const auto count = static_cast<std::size_t>(t_end / step) + 1;
  const std::vector<double> values = traj.sample(0.0, step, count);
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) logs[i] = values[i] > 0.0 ? std::log(values[i]) : -kInf;

  out.k_hat_overshoot = -kInf;
  for (double nu : nu_grid) {
    double best = -kInf;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
      const double v = logs[i] + nu * step * static_cast<double>(i);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    out.log_m.push_back(best);
    if (!std::isfinite(best)) {
      ++out.skipped_nu;
      continue;
    }
    // A supremum sitting at the end of the sample grid is not a supremum at all.
    const double ratio = arg + 1 == logs.size() ? kInf : best / nu;
    out.k_hat_overshoot = std::max(out.k_hat_overshoot, ratio);
  }
  return out;
}

}  // namespace entrytime
