#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entrytime/extended.hpp"
#include "entrytime/models.hpp"
#include "entrytime/trajectory.hpp"

namespace entrytime {

enum class EntryStatus {
  Exact,            ///< known without search (e.g. t_0 = 0 for a contraction)
  Bisected,         ///< bracketed to within time_tol
  HorizonExceeded,  ///< still above the level at horizon_cap: +∞
  Inconclusive,     ///< below the level at the cap but no sustained window observed
};

std::string to_string(EntryStatus status);

enum class SearchMethod {
  Auto,               ///< monotone bisection for contraction-flagged trajectories, scan otherwise
  MonotoneBisection,
  LastCrossingScan,
};

struct SearchConfig {
  double time_tol = 1e-8;
  double grid_step = 1e-3;
  double horizon_start = 16.0;
  double horizon_cap = 1e4;
  /// Norms at or below this are treated as exact zeros.
  double norm_floor = 1e-300;
  SearchMethod method = SearchMethod::Auto;

  /// Throws InvalidArgument unless time_tol < grid_step < horizon_start ≤ horizon_cap.
  void validate() const;
};

struct EntryTime {
  ExtendedReal time;
  EntryStatus status = EntryStatus::Exact;
  /// Half-width of the final bracket (widened for Inconclusive).
  double error = 0.0;
  /// The norm dropped to ≤ norm_floor at the crossing and stayed there.
  bool extinct = false;
};

/// Final entry time of ‖T(·)‖ into the level e^{-r}, searching from `left_bound`.
EntryTime final_entry_time(const NormTrajectory& traj, int r, const SearchConfig& cfg, double left_bound = 0.0);

/// Final entry time into an arbitrary positive level: the time after which
/// ‖T(t)‖ ≤ level forever (within the searched horizon).
EntryTime final_entry_into(const NormTrajectory& traj, double level, const SearchConfig& cfg,
                           double left_bound = 0.0);

/// First time at which the norm is exactly zero (log_evaluate = -inf), located to
/// time_tol; nullopt when the norm is still positive at horizon_cap. Uses that a
/// semigroup which vanishes once stays zero.
std::optional<double> extinction_boundary(const NormTrajectory& traj, const SearchConfig& cfg, double left_bound = 0.0);

struct EntryTimeTable {
  int r_max = 0;
  /// t_0 … t_{r_max+1}
  std::vector<ExtendedReal> t;
  /// u_0 … u_{r_max}, u_r = t_{r+1} - t_r with +∞ whenever t_{r+1} = +∞
  std::vector<ExtendedReal> u;
  /// Per t entry.
  std::vector<EntryStatus> status;
  std::vector<double> error;
  /// Time at which the norm vanished, when observed.
  std::optional<double> extinction_time;
  /// max_r (u_{r+1} - u_r) over finite neighbours; ≤ 0 for a nonincreasing u.
  double monotonicity_defect = 0.0;

  bool has_infinite_u() const;
  /// Header `r,t_r,u_r,status`, +∞ as `inf`; the final row (r = r_max+1) has an empty u_r.
  std::string to_csv() const;
};

/// Builds u, the status bookkeeping and the monotonicity diagnostic from a list of times.
EntryTimeTable make_entry_time_table(std::vector<ExtendedReal> t, std::vector<EntryStatus> status,
                                     std::vector<double> error = {});

/// t_0 … t_{r_max+1}, each search starting from the previous entry time.
EntryTimeTable entry_time_table(const NormTrajectory& traj, int r_max, const SearchConfig& cfg);

/// t_r(x) for the orbit t ↦ ‖e^{tA}x‖ of a unit vector x.
EntryTime vector_entry_time(const SemigroupModel& model, std::span<const double> x, int r, const SearchConfig& cfg);

}  // namespace entrytime
