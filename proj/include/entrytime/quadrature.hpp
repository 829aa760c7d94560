#pragma once

#include <functional>
#include <limits>

namespace entrytime {

enum class TailPolicy {
  /// Integrate [lower, lower+1], then segments doubling the distance from
  /// `lower`, until the geometric tail estimate is below tolerance.
  HorizonDoubling,
  /// Integrate once over [lower, min(upper, horizon_cap)] and ignore the rest.
  ClosedCutoff,
};

struct QuadratureSpec {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  TailPolicy tail_policy = TailPolicy::HorizonDoubling;
  /// Partial integrals beyond this are reported Divergent.
  double divergence_threshold = 1e12;
  /// Largest distance from `lower` explored before giving up.
  double horizon_cap = 1e12;
};

struct QuadratureResult {
  enum class Kind { Value, Divergent, Inconclusive };

  Kind kind = Kind::Inconclusive;
  /// The integral for Value; the last partial integral otherwise.
  double value = 0.0;
  double error_estimate = 0.0;
  /// Upper end reached by the integration.
  double horizon = 0.0;
  long evaluations = 0;

  bool converged() const noexcept { return kind == Kind::Value; }
};

/// Adaptive Gauss–Kronrod (7/15) quadrature of f over [lower, upper), with a
/// geometrically graded initial mesh toward `lower` for integrable endpoint
/// singularities and horizon doubling for infinite upper limits.
///
/// Throws NumericsFailure if f returns NaN, InvalidArgument for a malformed spec.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, const QuadratureSpec& spec);

}  // namespace entrytime
