#include "entrytime/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "entrytime/errors.hpp"

namespace entrytime::oracles {

std::string to_string(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed-form";
    case Method::DenseGrid: return "dense-grid";
    case Method::EigenTriangular: return "eigen-triangular";
  }
  return "unknown";
}

EntryTimeTable closed_form_entry_times(const SemigroupModel& model, int r_max) {
  if (r_max < 1) throw InvalidArgument("closed_form_entry_times: r_max must be >= 1");
  std::vector<ExtendedReal> t;
  for (int r = 0; r <= r_max + 1; ++r) {
    double v = 0.0;
    if (const auto* m = model.as<ScalarDecay>()) {
      v = r / m->nu;
    } else if (model.as<GaussianShift>() != nullptr) {
      v = 2.0 * std::sqrt(static_cast<double>(r));
    } else if (const auto* m = model.as<NilpotentShift>()) {
      v = r == 0 ? 0.0 : m->length;
    } else if (const auto* m = model.as<DampedNilpotent>()) {
      v = std::min(r / m->nu, m->length);
    } else {
      throw InvalidArgument("closed_form_entry_times: no closed form for " + model.kind_name());
    }
    t.emplace_back(v);
  }
  std::vector<EntryStatus> status(t.size(), EntryStatus::Exact);
  return make_entry_time_table(std::move(t), std::move(status));
}

OracleResult dense_grid_entry_time(const NormTrajectory& traj, int r, double step, double horizon) {
  if (r < 0) throw InvalidArgument("dense_grid_entry_time: r must be >= 0");
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("dense_grid_entry_time: step must be positive");
  if (!(horizon > step) || !std::isfinite(horizon)) throw InvalidArgument("dense_grid_entry_time: bad horizon");

  OracleResult out;
  out.quantity = "t_" + std::to_string(r);
  out.method = Method::DenseGrid;
  out.step = step;
  out.horizon = horizon;

  const double level = std::exp(-static_cast<double>(r));
  const auto n = static_cast<long long>(std::floor(horizon / step));
  if (traj.evaluate(static_cast<double>(n) * step) > level) {
    out.value = ExtendedReal::infinity();
    return out;
  }
  long long last_above = -1;
  for (long long k = n; k >= 0; --k) {
    if (traj.evaluate(static_cast<double>(k) * step) > level) {
      last_above = k;
      break;
    }
  }
  out.value = ExtendedReal(static_cast<double>(last_above + 1) * step);
  return out;
}

double spectral_abscissa_triangular(const Matrix& a) {
  if (!a.is_square()) throw InvalidArgument("spectral_abscissa_triangular: square matrix required");
  bool upper = true;
  bool lower = true;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i > j && a(i, j) != 0.0) upper = false;
      if (i < j && a(i, j) != 0.0) lower = false;
    }
  }
  if (!upper && !lower) throw InvalidArgument("spectral_abscissa_triangular: matrix is not triangular");
  double best = a(0, 0);
  for (std::size_t i = 1; i < a.rows(); ++i) best = std::max(best, a(i, i));
  return best;
}

}  // namespace entrytime::oracles
