#pragma once

#include <array>
#include <string>
#include <vector>

#include "entrytime/entry_times.hpp"
#include "entrytime/quadrature.hpp"
#include "entrytime/trajectory.hpp"

namespace entrytime {

/// Weight applied to the norm trajectory inside a Pazy-type integral.
struct WeightKind {
  enum class Type {
    NormPower,        ///< ‖T(t)‖^p
    InverseLogPower,  ///< |log‖T(t)‖|^{-p}
  };

  Type type = Type::NormPower;
  double p = 1.0;

  static WeightKind norm_power(double p);
  static WeightKind inverse_log_power(double p);

  /// F(x) at x = -log‖T‖: e^{-px} or x^{-p}. F(0) = +inf for InverseLogPower.
  double F(double x) const;
  std::string describe() const;
};

enum class PazyVerdict { Value, Divergent, Inconclusive, CriterionInapplicable };

std::string to_string(PazyVerdict verdict);

struct PazyIntegral {
  PazyVerdict verdict = PazyVerdict::Inconclusive;
  double value = 0.0;
  double error_estimate = 0.0;
  double lower = 0.0;
  /// Extinction boundary, or +inf.
  double upper = 0.0;
  /// Largest time the quadrature reached.
  double horizon = 0.0;
  long evaluations = 0;
};

/// Quadrature settings for Pazy integrals. The relative tolerance is looser than
/// the quadrature default: near t_0 the log of a numerically computed norm
/// close to 1 only carries about ten correct digits.
QuadratureSpec pazy_quadrature_spec();

/// ∫_a^∞ of the weighted norm. The integrand is 0 where the norm vanishes
/// (and, for NormPower, where it is ≤ norm_floor). Callers choose a ≥ t_0.
PazyIntegral pazy_integral(const NormTrajectory& traj, const WeightKind& w, double a, const QuadratureSpec& spec = pazy_quadrature_spec(),
                           const SearchConfig& cfg = {});

enum class ImpliedClass { None, Stable, Superstable, FiniteTimeExtinction };

std::string to_string(ImpliedClass c);

struct PazyCriterion {
  std::string name;  ///< "i" … "iv"
  WeightKind::Type weight = WeightKind::Type::NormPower;
  std::vector<double> p_values;
  std::vector<PazyIntegral> results;
  bool fires = false;
  ImpliedClass implies = ImpliedClass::None;
};

struct PazyGrid {
  std::vector<double> norm_power{1.0, 2.0};
  std::vector<double> inverse_log{1.5, 2.0};
  /// 2^{-1} … 2^{-10}
  std::vector<double> limit_trace = default_limit_trace();

  static std::vector<double> default_limit_trace();
};

struct PazyReport {
  enum class Status { Evaluated, Inconclusive, NotApplicable };

  Status status = Status::Evaluated;
  double a = 0.0;
  double t0 = 0.0;
  /// (i), (ii), (iii), (iv)
  std::array<PazyCriterion, 4> criteria;
  /// (iv): value at the smallest p of the trace that produced a Value; +inf if none.
  double limit_estimate = 0.0;
  /// (iv): supremum over converged trace values.
  double trace_sup = 0.0;
  ImpliedClass strongest = ImpliedClass::None;
  std::vector<std::string> contradictions;
};

std::string to_string(PazyReport::Status status);

/// All four criteria at a = max(a_user, t_0) + 1e-6.
PazyReport pazy_criteria(const NormTrajectory& traj, double a_user = 0.0, const PazyGrid& grid = {},
                         const QuadratureSpec& spec = pazy_quadrature_spec(), const SearchConfig& cfg = {});

struct SandwichResult {
  double lower = 0.0;
  double integral = 0.0;
  double upper = 0.0;
  double slack = 0.0;
  PazyVerdict integral_verdict = PazyVerdict::Inconclusive;
  bool pass = false;
};

/// Σ u_r F(r+1) ≤ ∫_0^∞ F(-log‖T(t)‖) dt ≤ Σ u_r F(r) on a contraction with t_0 = 0.
/// Throws InvalidArgument on infinite table entries or a non-contraction trajectory.
SandwichResult ftrick_sandwich(const EntryTimeTable& table, const NormTrajectory& traj, const WeightKind& w,
                               const QuadratureSpec& spec = pazy_quadrature_spec(), const SearchConfig& cfg = {});

}  // namespace entrytime
