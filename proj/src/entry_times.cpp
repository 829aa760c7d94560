#include "entrytime/entry_times.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "entrytime/errors.hpp"

namespace entrytime {

std::string to_string(EntryStatus status) {
  switch (status) {
    case EntryStatus::Exact: return "exact";
    case EntryStatus::Bisected: return "bisected";
    case EntryStatus::HorizonExceeded: return "horizon-exceeded";
    case EntryStatus::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

void SearchConfig::validate() const {
  const bool finite = std::isfinite(time_tol) && std::isfinite(grid_step) && std::isfinite(horizon_start) &&
                      std::isfinite(horizon_cap) && std::isfinite(norm_floor);
  if (!finite) throw InvalidArgument("SearchConfig: parameters must be finite");
  if (!(time_tol > 0.0)) throw InvalidArgument("SearchConfig: time_tol must be positive");
  if (!(time_tol < grid_step)) throw InvalidArgument("SearchConfig: time_tol must be below grid_step");
  if (!(grid_step < horizon_start)) throw InvalidArgument("SearchConfig: grid_step must be below horizon_start");
  if (!(horizon_start <= horizon_cap)) throw InvalidArgument("SearchConfig: horizon_start must not exceed horizon_cap");
  if (!(norm_floor > 0.0 && norm_floor < 1.0)) throw InvalidArgument("SearchConfig: norm_floor must lie in (0, 1)");
}

namespace {

constexpr std::size_t kBlock = 256;

/// Lazily sampled grid t_k = k·h shared by all searches over one trajectory.
class GridCache {
 public:
  GridCache(const NormTrajectory& traj, double step) : traj_(traj), step_(step) {}

  double time(std::size_t k) const { return static_cast<double>(k) * step_; }

  double value(std::size_t k) {
    const std::size_t b = k / kBlock;
    if (b >= blocks_.size()) blocks_.resize(b + 1);
    if (!blocks_[b]) {
      blocks_[b] = std::make_unique<std::vector<double>>(traj_.sample(time(b * kBlock), step_, kBlock));
      for (double v : *blocks_[b]) {
        if (std::isnan(v)) throw NumericsFailure("entry time search: trajectory returned NaN", time(b * kBlock));
      }
    }
    return (*blocks_[b])[k % kBlock];
  }

  double step() const { return step_; }

 private:
  const NormTrajectory& traj_;
  double step_;
  std::vector<std::unique_ptr<std::vector<double>>> blocks_;
};

struct Bracket {
  double lo;  // evaluate(lo) > level
  double hi;  // evaluate(hi) ≤ level
};

/// Shrinks [lo, hi] to time_tol, keeping evaluate(lo) > level ≥ evaluate(hi).
Bracket bisect(const NormTrajectory& traj, double level, Bracket b, double tol) {
  while (b.hi - b.lo > tol) {
    const double mid = 0.5 * (b.lo + b.hi);
    if (mid <= b.lo || mid >= b.hi) break;
    if (traj.evaluate(mid) > level) {
      b.lo = mid;
    } else {
      b.hi = mid;
    }
  }
  return b;
}

EntryTime at_left_bound(double left) {
  EntryTime out;
  out.time = ExtendedReal(left);
  out.status = left == 0.0 ? EntryStatus::Exact : EntryStatus::Bisected;
  return out;
}

EntryTime from_bracket(const NormTrajectory& traj, const Bracket& b, const SearchConfig& cfg) {
  EntryTime out;
  out.time = ExtendedReal(0.5 * (b.lo + b.hi));
  out.status = EntryStatus::Bisected;
  out.error = 0.5 * (b.hi - b.lo);
  out.extinct = traj.evaluate(b.hi) <= cfg.norm_floor;
  return out;
}

EntryTime monotone_search(const NormTrajectory& traj, double level, const SearchConfig& cfg, double left) {
  if (traj.evaluate(left) <= level) {
    EntryTime out = at_left_bound(left);
    out.extinct = traj.evaluate(left) <= cfg.norm_floor;
    return out;
  }
  if (left >= cfg.horizon_cap) {
    EntryTime out;
    out.time = ExtendedReal::infinity();
    out.status = EntryStatus::HorizonExceeded;
    return out;
  }
  double lo = left;
  double step = cfg.horizon_start;
  double hi = std::min(lo + step, cfg.horizon_cap);
  while (traj.evaluate(hi) > level) {
    if (hi >= cfg.horizon_cap) {
      EntryTime out;
      out.time = ExtendedReal::infinity();
      out.status = EntryStatus::HorizonExceeded;
      return out;
    }
    lo = hi;
    step *= 2.0;
    hi = std::min(lo + step, cfg.horizon_cap);
  }
  return from_bracket(traj, bisect(traj, level, {lo, hi}, cfg.time_tol), cfg);
}

/// Backward scan for the last grid point above `level`, widening the window
/// until a stretch of length horizon_start below the level follows it.
EntryTime scan_search(const NormTrajectory& traj, GridCache& grid, double level, const SearchConfig& cfg,
                      double left) {
  const double h = grid.step();
  const auto k_left = static_cast<std::size_t>(std::ceil(left / h));
  double end = left + cfg.horizon_start;
  bool capped = false;

  bool found = false;
  std::size_t k_last = 0;
  double max_after = 0.0;  // largest sample after k_last (or after left) seen so far
  std::size_t scanned_to = k_left;  // samples in [k_left, scanned_to) already examined
  bool any_scanned = false;

  for (;;) {
    if (end >= cfg.horizon_cap) {
      end = std::max(cfg.horizon_cap, left);
      capped = true;
    }
    const auto k_end = static_cast<std::size_t>(std::floor(end / h));
    if (k_end >= k_left && (!any_scanned || k_end >= scanned_to)) {
      const std::size_t stop = any_scanned ? scanned_to : k_left;
      double region_max = 0.0;
      for (std::size_t k = k_end + 1; k-- > stop;) {
        const double v = grid.value(k);
        if (v > level) {
          found = true;
          k_last = k;
          max_after = region_max;
          break;
        }
        region_max = std::max(region_max, v);
        if (k == stop) max_after = std::max(max_after, region_max);
      }
      scanned_to = k_end + 1;
      any_scanned = true;
    }
    const double quiet_from = found ? grid.time(k_last + 1) : left;
    if (end - quiet_from >= cfg.horizon_start) break;
    if (capped) {
      if (traj.evaluate(end) >= level) {
        EntryTime out;
        out.time = ExtendedReal::infinity();
        out.status = EntryStatus::HorizonExceeded;
        return out;
      }
      break;
    }
    end = left + 2.0 * (end - left);
  }

  EntryTime out;
  if (found) {
    const double lo = std::max(grid.time(k_last), left);
    if (traj.evaluate(lo) > level) {
      out = from_bracket(traj, bisect(traj, level, {lo, grid.time(k_last + 1)}, cfg.time_tol), cfg);
    } else {
      // The sample sat a rounding error above the level; the crossing is at lo.
      out = at_left_bound(lo);
      out.status = EntryStatus::Bisected;
      out.error = h;
      out.extinct = traj.evaluate(lo) <= cfg.norm_floor;
    }
  } else if (traj.evaluate(left) > level && grid.time(k_left) > left) {
    out = from_bracket(traj, bisect(traj, level, {left, grid.time(k_left)}, cfg.time_tol), cfg);
  } else {
    out = at_left_bound(left);
    out.extinct = traj.evaluate(left) <= cfg.norm_floor;
  }
  out.extinct = out.extinct && max_after <= cfg.norm_floor;
  if (capped && (found ? cfg.horizon_cap - grid.time(k_last + 1) : cfg.horizon_cap - left) < cfg.horizon_start) {
    out.status = EntryStatus::Inconclusive;
    out.error = std::max(out.error, cfg.horizon_cap - out.time.value());
  }
  return out;
}

bool use_bisection(const NormTrajectory& traj, const SearchConfig& cfg) {
  switch (cfg.method) {
    case SearchMethod::MonotoneBisection: return true;
    case SearchMethod::LastCrossingScan: return false;
    case SearchMethod::Auto: break;
  }
  return traj.flags().is_contraction;
}

void check_level(double level) {
  if (!(level > 0.0) || !std::isfinite(level)) throw InvalidArgument("entry time: level must be positive and finite");
}

void check_left(double left) {
  if (!(left >= 0.0) || !std::isfinite(left)) throw InvalidArgument("entry time: left bound must be finite and >= 0");
}

}  // namespace

EntryTime final_entry_into(const NormTrajectory& traj, double level, const SearchConfig& cfg, double left_bound) {
  cfg.validate();
  check_level(level);
  check_left(left_bound);
  if (use_bisection(traj, cfg)) return monotone_search(traj, level, cfg, left_bound);
  GridCache grid(traj, cfg.grid_step);
  return scan_search(traj, grid, level, cfg, left_bound);
}

EntryTime final_entry_time(const NormTrajectory& traj, int r, const SearchConfig& cfg, double left_bound) {
  if (r < 0) throw InvalidArgument("final_entry_time: r must be >= 0");
  return final_entry_into(traj, std::exp(-static_cast<double>(r)), cfg, left_bound);
}

std::optional<double> extinction_boundary(const NormTrajectory& traj, const SearchConfig& cfg, double left_bound) {
  cfg.validate();
  check_left(left_bound);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  if (traj.log_evaluate(left_bound) == neg_inf) return left_bound;
  if (left_bound >= cfg.horizon_cap || traj.log_evaluate(cfg.horizon_cap) > neg_inf) return std::nullopt;
  double lo = left_bound;
  double hi = cfg.horizon_cap;
  while (hi - lo > cfg.time_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (traj.log_evaluate(mid) == neg_inf) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

bool EntryTimeTable::has_infinite_u() const {
  return std::any_of(u.begin(), u.end(), [](const ExtendedReal& x) { return x.is_infinite(); });
}

std::string EntryTimeTable::to_csv() const {
  std::ostringstream os;
  os << "r,t_r,u_r,status\n";
  for (std::size_t r = 0; r < t.size(); ++r) {
    os << r << ',' << format_extended(t[r]) << ',';
    if (r < u.size()) os << format_extended(u[r]);
    os << ',' << to_string(status[r]) << '\n';
  }
  return os.str();
}

EntryTimeTable make_entry_time_table(std::vector<ExtendedReal> t, std::vector<EntryStatus> status,
                                     std::vector<double> error) {
  if (t.size() < 2) throw InvalidArgument("entry time table: need at least t_0 and t_1");
  if (status.size() != t.size()) throw InvalidArgument("entry time table: status size mismatch");
  if (error.empty()) error.assign(t.size(), 0.0);
  if (error.size() != t.size()) throw InvalidArgument("entry time table: error size mismatch");

  EntryTimeTable table;
  table.r_max = static_cast<int>(t.size()) - 2;
  table.t = std::move(t);
  table.status = std::move(status);
  table.error = std::move(error);
  table.u.reserve(table.t.size() - 1);
  for (std::size_t r = 0; r + 1 < table.t.size(); ++r) {
    table.u.push_back(relative_difference(table.t[r + 1], table.t[r]));
  }
  double defect = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r + 1 < table.u.size(); ++r) {
    if (table.u[r].is_finite() && table.u[r + 1].is_finite()) {
      defect = std::max(defect, table.u[r + 1].value() - table.u[r].value());
    }
  }
  table.monotonicity_defect = std::isfinite(defect) ? defect : 0.0;
  return table;
}

EntryTimeTable entry_time_table(const NormTrajectory& traj, int r_max, const SearchConfig& cfg) {
  if (r_max < 1) throw InvalidArgument("entry_time_table: r_max must be >= 1");
  cfg.validate();
  const bool bisection = use_bisection(traj, cfg);
  GridCache grid(traj, cfg.grid_step);

  std::vector<ExtendedReal> t;
  std::vector<EntryStatus> status;
  std::vector<double> error;
  std::optional<double> extinction;
  double left = 0.0;
  for (int r = 0; r <= r_max + 1; ++r) {
    EntryTime e;
    if (!t.empty() && t.back().is_infinite()) {
      e.time = ExtendedReal::infinity();
      e.status = EntryStatus::HorizonExceeded;
    } else if (extinction) {
      // Once the norm has vanished every later level is entered at the same instant.
      e.time = t.back();
      e.status = status.back();
      e.error = error.back();
    } else {
      const double level = std::exp(-static_cast<double>(r));
      e = bisection ? monotone_search(traj, level, cfg, left) : scan_search(traj, grid, level, cfg, left);
      if (e.time.is_finite()) {
        left = e.time.value();
        if (e.extinct) extinction = left;
      }
    }
    t.push_back(e.time);
    status.push_back(e.status);
    error.push_back(e.error);
  }
  EntryTimeTable table = make_entry_time_table(std::move(t), std::move(status), std::move(error));
  table.extinction_time = extinction;
  return table;
}

EntryTime vector_entry_time(const SemigroupModel& model, std::span<const double> x, int r, const SearchConfig& cfg) {
  if (r < 0) throw InvalidArgument("vector_entry_time: r must be >= 0");
  const NormTrajectory traj = make_vector_trajectory(model, x);
  SearchConfig scan = cfg;
  if (scan.method == SearchMethod::Auto) scan.method = SearchMethod::LastCrossingScan;
  return final_entry_time(traj, r, scan);
}

}  // namespace entrytime
