#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace entrytime {

struct TrajectoryFlags {
  /// ‖T(t)‖ is nonincreasing (hence ≤ 1).
  bool is_contraction = false;
  /// t ↦ ‖T(t)‖ is continuous.
  bool is_norm_continuous = true;
  /// Closed form rather than a numerical estimate.
  bool is_exact = false;
  /// The discretization behind a numeric trajectory failed its resolution check.
  bool is_inconclusive = false;
};

/// The norm trajectory t ↦ ‖T(t)‖ of a semigroup, the single input of every analysis.
///
/// Besides point evaluation it offers the logarithm (so superexponential decay
/// stays representable after the norm itself underflows) and uniform-grid
/// sampling, which numeric models can serve much faster than repeated
/// evaluation. Copies share the underlying evaluators; all members are
/// reentrant.
class NormTrajectory {
 public:
  using Evaluator = std::function<double(double)>;
  using Sampler = std::function<std::vector<double>(double start, double step, std::size_t count)>;

  NormTrajectory(std::string name, Evaluator evaluate, TrajectoryFlags flags, double eval_error_bound = 0.0,
                 Evaluator log_evaluate = {}, Sampler sampler = {});

  /// ‖T(t)‖. Throws InvalidArgument for t < 0 or NaN.
  double evaluate(double t) const;
  /// log ‖T(t)‖, -inf where the norm vanishes.
  double log_evaluate(double t) const;
  /// Values at start, start+step, ..., start+(count-1)*step.
  std::vector<double> sample(double start, double step, std::size_t count) const;

  const TrajectoryFlags& flags() const noexcept { return flags_; }
  double eval_error_bound() const noexcept { return eval_error_bound_; }
  const std::string& name() const noexcept { return name_; }

  /// Same evaluators under different flags; used to force a search strategy.
  NormTrajectory with_flags(TrajectoryFlags flags) const;

 private:
  std::string name_;
  Evaluator evaluate_;
  Evaluator log_evaluate_;
  Sampler sampler_;
  TrajectoryFlags flags_;
  double eval_error_bound_ = 0.0;
};

/// Wraps an evaluator with a thread-safe memo keyed by t rounded to 12
/// significant digits.
NormTrajectory::Evaluator memoize(NormTrajectory::Evaluator evaluate);

struct SubmultiplicativityReport {
  double max_violation = 0.0;  ///< max of evaluate(s+t) - evaluate(s)·evaluate(t), floored at 0
  double slack = 0.0;
  bool pass = true;
  double worst_s = 0.0;
  double worst_t = 0.0;
  std::size_t pairs_checked = 0;
};

/// Checks ‖T(s+t)‖ ≤ ‖T(s)‖‖T(t)‖ on the given pairs with slack 1e-8 + 2·eval_error_bound.
SubmultiplicativityReport validate_submultiplicativity(const NormTrajectory& traj,
                                                       std::span<const std::pair<double, double>> grid);

/// All pairs from {0, 0.1, 0.25, 0.5, 0.75, 1, 1.5, 2, 3, 5}.
std::vector<std::pair<double, double>> default_submultiplicativity_grid();

}  // namespace entrytime
