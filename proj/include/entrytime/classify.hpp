#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entrytime/entry_times.hpp"
#include "entrytime/models.hpp"
#include "entrytime/numerics.hpp"
#include "entrytime/trajectory.hpp"

namespace entrytime {

enum class Verdict { Unstable, Stable, Superstable, FiniteTimeExtinction };

std::string to_string(Verdict verdict);

struct ClassifyThresholds {
  /// Largest r taken from the table; 0 uses the whole table.
  int r_max = 0;
  /// Plateau level of u below which the semigroup counts as superstable.
  double eps_super = 1e-2;
  /// Tail sum of u below which extinction is declared.
  double eps_tailsum = 1e-3;
  /// Number of trailing u_r averaged into the plateau estimate.
  int plateau_window = 8;
  /// Growth elasticity of the rate 1/u_r above which the rate is taken to be unbounded.
  /// A genuine plateau gives elasticity near 0, while e^{-t^2/4} gives 1/2.
  double eps_trend = 0.15;

  void validate() const;
};

struct TailStatistics {
  int r_max = 0;
  /// First r of the second half, floor(r_max/2) + 1.
  int second_half_start = 0;
  double last_u = 0.0;
  /// Mean of the last plateau_window u_r.
  double tail_mean = 0.0;
  /// Sum of u_r over the second half.
  double tail_sum = 0.0;
  /// Sum of the last plateau_window u_r.
  double window_sum = 0.0;
  /// Least-squares slope of u_r against r over the second half.
  double trend_slope = 0.0;
  /// d log(1/u) / d log r between a window ending at r_max/2 and the last window.
  double growth_elasticity = 0.0;
  bool any_infinite = false;
  bool any_horizon_exceeded = false;
  bool any_inconclusive = false;
};

/// Tail statistics of a table; u must be finite for the numeric fields to mean anything.
TailStatistics tail_statistics(const EntryTimeTable& table, const ClassifyThresholds& th);

struct Classification {
  Verdict verdict = Verdict::Unstable;
  /// Stable: ν̂ = 1/û. Zero otherwise.
  double nu = 0.0;
  /// FiniteTimeExtinction: Σ u_r with its error bar. Zero otherwise.
  double k = 0.0;
  double k_error = 0.0;
  /// Some tail entry came from a search that could not confirm its window.
  bool inconclusive = false;
  bool stable_test_passed = false;
  bool superstable_test_passed = false;
  bool extinction_test_passed = false;
  TailStatistics diagnostics;
  ClassifyThresholds thresholds;
};

/// Classifies a table. Requires r_max ≥ 2·plateau_window.
Classification classify(const EntryTimeTable& table, const ClassifyThresholds& th);

struct GrowthEstimate {
  /// log‖T(t)‖/t at the largest grid point; -inf when below the floor.
  double omega_large_t = 0.0;
  /// inf over the grid of log‖T(t)‖/t.
  double omega_inf_grid = 0.0;
  /// -1/û from entry times, -inf when superstable, 0 when some u_r is infinite.
  double omega_entry = 0.0;
  /// max - min of the three routes; +inf when they disagree about -inf; 0 when all are -inf.
  double agreement_spread = 0.0;
  bool all_minus_infinity = false;
  double t_large = 0.0;
};

/// Grid for growth estimates: the finite entry times plus doublings of the last one up to 1e7.
std::vector<double> default_growth_grid(const EntryTimeTable& table);

/// Values below `minus_infinity_floor` are reported as -inf.
GrowthEstimate growth_characteristic(const NormTrajectory& traj, const EntryTimeTable& table,
                                     std::span<const double> t_grid, const ClassifyThresholds& th,
                                     double minus_infinity_floor = -1e6);

struct GelfandEstimate {
  double radius = 0.0;
  /// ‖M^{2^k}‖^{1/2^k}, k = 0, 1, ...
  std::vector<double> sequence;
};

/// Spectral radius by repeated squaring up to power ≥ n_max, extrapolated from the last two terms.
/// Throws NumericsFailure (best estimate = last finite term) when a power leaves the double range.
GelfandEstimate gelfand_spectral_radius(const Matrix& m, int n_max, std::uint64_t seed = kDefaultPowerSeed);
/// Same for T(t) of a matrix or fractional-integration model.
GelfandEstimate gelfand_spectral_radius(const SemigroupModel& model, double t, int n_max);

struct StabilityIndices {
  double nu_hat = 0.0;
  double k_partial_sum = 0.0;
  /// Partial sum when the tail has converged, +inf otherwise.
  double k_hat_sum = 0.0;
  bool sum_converged = false;
  /// max_ν (log M_ν)/ν with M_ν = sup_t e^{νt}‖T(t)‖ over the sample grid.
  double k_hat_overshoot = 0.0;
  std::vector<double> nu_grid;
  std::vector<double> log_m;
  int skipped_nu = 0;
};

std::vector<double> default_nu_grid();

/// The overshoot grid covers [0, 2 max t_r] with step max(sample_step, span / this).
inline constexpr double kMaxOvershootSamples = 4096.0;

StabilityIndices stability_and_extinction_indices(const NormTrajectory& traj, const EntryTimeTable& table,
                                                  std::span<const double> nu_grid, const ClassifyThresholds& th,
                                                  double sample_step = 1e-3);

}  // namespace entrytime
