#pragma once

#include <string>

#include "entrytime/entry_times.hpp"
#include "entrytime/extended.hpp"
#include "entrytime/models.hpp"
#include "entrytime/numerics.hpp"
#include "entrytime/trajectory.hpp"

// Brute-force reference computations for tests. Nothing here calls the
// entry-time search, classification or quadrature code.

namespace entrytime::oracles {

enum class Method { ClosedForm, DenseGrid, EigenTriangular };

std::string to_string(Method m);

struct OracleResult {
  std::string quantity;
  ExtendedReal value;
  Method method = Method::ClosedForm;
  /// Grid step for DenseGrid (the bracket width), 0 otherwise.
  double step = 0.0;
  double horizon = 0.0;
};

/// Entry times from the closed-form norms of the analytic models.
/// Throws InvalidArgument for matrix and fractional-integration models.
EntryTimeTable closed_form_entry_times(const SemigroupModel& model, int r_max);

/// Smallest grid point k·step after which every sample up to `horizon` is ≤ e^{-r};
/// +inf when the sample at the horizon is still above. Plain evaluate() calls only.
OracleResult dense_grid_entry_time(const NormTrajectory& traj, int r, double step, double horizon = 100.0);

/// Largest diagonal entry of an upper or lower triangular matrix.
double spectral_abscissa_triangular(const Matrix& a);

}  // namespace entrytime::oracles
