#include "entrytime/models.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "entrytime/errors.hpp"
#include "entrytime/model_spec.hpp"

namespace entrytime {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("norm evaluation: t must be finite and >= 0");
}

}  // namespace

SemigroupModel::SemigroupModel(ModelKind kind, std::uint64_t power_seed)
    : kind_(std::move(kind)), power_seed_(power_seed) {
  std::visit(Overloaded{
                 [](const ScalarDecay& m) {
                   if (!(m.nu > 0.0) || !std::isfinite(m.nu)) throw InvalidModel("scalar-decay: nu must be > 0");
                 },
                 [](const GaussianShift&) {},
                 [](const NilpotentShift& m) {
                   if (!(m.length > 0.0) || !std::isfinite(m.length))
                     throw InvalidModel("nilpotent-shift: L must be > 0");
                 },
                 [](const DampedNilpotent& m) {
                   if (!(m.nu > 0.0) || !std::isfinite(m.nu)) throw InvalidModel("damped-nilpotent: nu must be > 0");
                   if (!(m.length > 0.0) || !std::isfinite(m.length))
                     throw InvalidModel("damped-nilpotent: L must be > 0");
                 },
                 [](const FractionalIntegration& m) {
                   if (m.grid_size < 16) throw InvalidModel("fractional-integration: n must be >= 16");
                 },
                 [](const MatrixSemigroup& m) {
                   if (!m.generator.is_square()) throw InvalidModel("matrix: generator must be square");
                   if (!m.generator.all_finite()) throw InvalidModel("matrix: generator entries must be finite");
                 },
             },
             kind_);
}

std::string SemigroupModel::kind_name() const {
  return std::visit(Overloaded{
                        [](const ScalarDecay&) { return std::string("scalar-decay"); },
                        [](const GaussianShift&) { return std::string("gaussian-shift"); },
                        [](const NilpotentShift&) { return std::string("nilpotent-shift"); },
                        [](const DampedNilpotent&) { return std::string("damped-nilpotent"); },
                        [](const FractionalIntegration&) { return std::string("fractional-integration"); },
                        [](const MatrixSemigroup&) { return std::string("matrix"); },
                    },
                    kind_);
}

bool SemigroupModel::is_analytic() const noexcept {
  return !std::holds_alternative<FractionalIntegration>(kind_) && !std::holds_alternative<MatrixSemigroup>(kind_);
}

// ---------------------------------------------------------------------------
// Fractional integration

namespace {

/// Mesh data reused by every evaluation of one trajectory.
struct FractionalGrid {
  int n = 0;
  std::vector<double> width;
  /// Row i holds log(s_i - x_j) for j = 0..i, packed.
  std::vector<double> log_distance;
  std::vector<std::size_t> row_offset;
};

std::shared_ptr<const FractionalGrid> make_fractional_grid(int n) {
  auto grid = std::make_shared<FractionalGrid>();
  const std::vector<double> x = fractional_mesh(n);
  grid->n = n;
  grid->width.resize(n);
  grid->row_offset.resize(n);
  std::size_t offset = 0;
  for (int i = 0; i < n; ++i) {
    grid->width[i] = x[i + 1] - x[i];
    grid->row_offset[i] = offset;
    offset += static_cast<std::size_t>(i) + 1;
  }
  grid->log_distance.resize(offset);
  for (int i = 0; i < n; ++i) {
    const double mid = 0.5 * (x[i] + x[i + 1]);
    for (int j = 0; j <= i; ++j) grid->log_distance[grid->row_offset[i] + j] = std::log(mid - x[j]);
  }
  return grid;
}

/// The collocation matrix scaled by e^{log_scale}; log_scale = logΓ(t+1) keeps
/// the entries clear of underflow for large t.
Matrix assemble_fractional(const FractionalGrid& grid, double t, double log_scale = 0.0) {
  const int n = grid.n;
  Matrix b(n, n);
  const double log_norm = log_gamma(t + 1.0) - log_scale;
  std::vector<double> e(n + 1);
  for (int i = 0; i < n; ++i) {
    const double* logs = &grid.log_distance[grid.row_offset[i]];
    // e_j = (s_i - x_j)^t / Γ(t+1); the cell integral is e_j - e_{j+1}, and
    // the diagonal cell is cut at the collocation point.
    for (int j = 0; j <= i; ++j) e[j] = std::exp(t * logs[j] - log_norm);
    const double sqrt_wi = std::sqrt(grid.width[i]);
    for (int j = 0; j < i; ++j) b(i, j) = (e[j] - e[j + 1]) * sqrt_wi / std::sqrt(grid.width[j]);
    b(i, i) = e[i];
  }
  return b;
}

void require_fractional_args(double t, int n) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("fractional integration: t must be finite and >= 0");
  if (n < 16) throw InvalidArgument("fractional integration: n must be >= 16");
}

double fractional_norm_on(const FractionalGrid& grid, double t, std::uint64_t seed) {
  if (t == 0.0) return 1.0;
  return operator_norm(assemble_fractional(grid, t), 1e-12, seed);
}

double fractional_log_norm_on(const FractionalGrid& grid, double t, std::uint64_t seed) {
  if (t == 0.0) return 0.0;
  // Scale so the entry for the longest distance s_{n-1} - x_0 is O(1).
  const double longest = grid.log_distance[grid.row_offset[static_cast<std::size_t>(grid.n - 1)]];
  const double shift = log_gamma(t + 1.0) - t * longest;
  const double scaled = operator_norm(assemble_fractional(grid, t, shift), 1e-12, seed);
  return scaled > 0.0 ? std::log(scaled) - shift : -INFINITY;
}

}  // namespace

std::vector<double> fractional_mesh(int n) {
  if (n < 16) throw InvalidArgument("fractional_mesh: n must be >= 16");
  constexpr double kRatio = 0.85;
  const int graded = std::min(42, n / 4);
  const double h = 1.0 / n;
  std::vector<double> widths;
  double graded_total = 0.0;
  for (int k = graded; k >= 1; --k) {
    widths.push_back(h * std::pow(kRatio, k));
    graded_total += widths.back();
  }
  const double uniform = (1.0 - graded_total) / (n - graded);
  widths.resize(n, uniform);
  std::vector<double> x(n + 1, 0.0);
  for (int i = 0; i < n; ++i) x[i + 1] = x[i] + widths[i];
  x[n] = 1.0;
  return x;
}

Matrix fractional_integration_matrix(double t, int n) {
  require_fractional_args(t, n);
  if (t == 0.0) return Matrix::identity(n);
  return assemble_fractional(*make_fractional_grid(n), t);
}

double fractional_integration_norm(double t, int n) {
  require_fractional_args(t, n);
  return fractional_norm_on(*make_fractional_grid(n), t, kDefaultPowerSeed);
}

FractionalNormCheck fractional_integration_norm_checked(double t, int n) {
  require_fractional_args(t, n);
  FractionalNormCheck check;
  check.value = fractional_integration_norm(t, n);
  if (n / 2 >= 16) {
    const double coarse = fractional_integration_norm(t, n / 2);
    check.error_estimate = std::abs(check.value - coarse);
  }
  check.resolved = check.error_estimate <= 0.05 * check.value;
  return check;
}

// ---------------------------------------------------------------------------
// Matrix semigroups

namespace {

/// log ‖e^{tA}‖ that stays finite after the norm itself underflows: the
/// exponential is built by binary powering of a moderate step, renormalizing
/// every product and accumulating the scale in log space.
double matrix_log_norm(const Matrix& a, double t, std::uint64_t seed) {
  const Matrix e = matrix_exponential(a, t);
  const double direct = e.all_finite() ? operator_norm(e, kTrajectoryNormTol, seed) : INFINITY;
  if (direct > 1e-250 && direct < 1e250) return std::log(direct);

  const double step = 16.0 / std::max(a.one_norm(), 1e-12);
  if (t <= step) return direct > 0.0 ? std::log(direct) : -INFINITY;

  auto normalize = [](Matrix& m, double& log_scale) {
    const double s = m.max_abs();
    if (s == 0.0 || !std::isfinite(s)) return false;
    m = m.scaled(1.0 / s);
    log_scale += std::log(s);
    return true;
  };

  auto count = static_cast<unsigned long long>(std::floor(t / step));
  const double rest = t - static_cast<double>(count) * step;
  Matrix result = matrix_exponential(a, rest);
  Matrix base = matrix_exponential(a, step);
  double log_result = 0.0;
  double log_base = 0.0;
  if (!normalize(result, log_result) || !normalize(base, log_base)) return -INFINITY;
  while (count > 0) {
    if (count & 1ULL) {
      result = result * base;
      log_result += log_base;
      if (!normalize(result, log_result)) return -INFINITY;
    }
    count >>= 1;
    if (count > 0) {
      base = base * base;
      log_base *= 2.0;
      if (!normalize(base, log_base)) return -INFINITY;
    }
  }
  const double tail = operator_norm(result, kTrajectoryNormTol, seed);
  return tail > 0.0 ? log_result + std::log(tail) : -INFINITY;
}

/// ‖e^{tA}‖, +inf once the exponential overflows.
double matrix_norm(const Matrix& a, double t, std::uint64_t seed) {
  const Matrix e = matrix_exponential(a, t);
  if (e.all_finite()) return operator_norm(e, kTrajectoryNormTol, seed);
  return std::exp(matrix_log_norm(a, t, seed));
}

constexpr std::size_t kAnchorInterval = 256;

/// Grid sampling of ‖e^{tA}‖ by stepping with e^{hA}, re-anchored with a fresh
/// exponential every kAnchorInterval points; power iteration is warm-started
/// from the previous singular vector.
std::vector<double> sample_matrix_norms(const Matrix& a, double start, double step, std::size_t count,
                                        std::uint64_t seed) {
  std::vector<double> out(count);
  const Matrix stepper = matrix_exponential(a, step);
  Matrix current;
  std::vector<double> warm;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % kAnchorInterval == 0) {
      current = matrix_exponential(a, start + static_cast<double>(i) * step);
    } else {
      current = current * stepper;
    }
    if (!current.all_finite()) {
      out[i] = matrix_norm(a, start + static_cast<double>(i) * step, seed);
      warm.clear();
      continue;
    }
    SingularValueEstimate est = largest_singular_value(current, kTrajectoryNormTol, warm, seed);
    out[i] = est.sigma;
    warm = std::move(est.right_vector);
  }
  return out;
}

TrajectoryFlags sampled_matrix_flags(const Matrix& a, std::uint64_t seed) {
  TrajectoryFlags flags;
  flags.is_exact = false;
  flags.is_norm_continuous = true;
  std::vector<double> grid = {0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
  for (int k = 1; k <= 400; ++k) grid.push_back(0.05 * k);
  double previous = 1.0;
  flags.is_contraction = true;
  for (double t : grid) {
    const double v = matrix_norm(a, t, seed);
    if (v > previous * (1.0 + 1e-12) || v > 1.0 + 1e-12) {
      flags.is_contraction = false;
      break;
    }
    previous = v;
  }
  return flags;
}

}  // namespace

double norm_at(const SemigroupModel& model, double t) {
  require_time(t);
  return std::visit(Overloaded{
                        [t](const ScalarDecay& m) { return std::exp(-m.nu * t); },
                        [t](const GaussianShift&) { return std::exp(-0.25 * t * t); },
                        [t](const NilpotentShift& m) { return t < m.length ? 1.0 : 0.0; },
                        [t](const DampedNilpotent& m) { return t < m.length ? std::exp(-m.nu * t) : 0.0; },
                        [t](const FractionalIntegration& m) { return fractional_integration_norm(t, m.grid_size); },
                        [t, &model](const MatrixSemigroup& m) {
                          return matrix_norm(m.generator, t, model.power_seed());
                        },
                    },
                    model.kind());
}

TrajectoryFlags model_flags(const SemigroupModel& model) {
  return std::visit(Overloaded{
                        [](const ScalarDecay&) { return TrajectoryFlags{true, true, true, false}; },
                        [](const GaussianShift&) { return TrajectoryFlags{true, true, true, false}; },
                        [](const NilpotentShift&) { return TrajectoryFlags{true, false, true, false}; },
                        // Jumps from e^{-νL} to 0 at t = L.
                        [](const DampedNilpotent&) { return TrajectoryFlags{true, false, true, false}; },
                        [](const FractionalIntegration&) { return TrajectoryFlags{true, true, false, false}; },
                        [&model](const MatrixSemigroup& m) {
                          return sampled_matrix_flags(m.generator, model.power_seed());
                        },
                    },
                    model.kind());
}

NormTrajectory make_trajectory(const SemigroupModel& model) {
  const std::string name = to_spec_string(model);
  TrajectoryFlags flags = model_flags(model);

  if (const auto* m = model.as<ScalarDecay>()) {
    const double nu = m->nu;
    return NormTrajectory(
        name, [nu](double t) { return std::exp(-nu * t); }, flags, 0.0, [nu](double t) { return -nu * t; });
  }
  if (model.as<GaussianShift>() != nullptr) {
    return NormTrajectory(
        name, [](double t) { return std::exp(-0.25 * t * t); }, flags, 0.0, [](double t) { return -0.25 * t * t; });
  }
  if (const auto* m = model.as<NilpotentShift>()) {
    const double length = m->length;
    return NormTrajectory(
        name, [length](double t) { return t < length ? 1.0 : 0.0; }, flags, 0.0,
        [length](double t) { return t < length ? 0.0 : -INFINITY; });
  }
  if (const auto* m = model.as<DampedNilpotent>()) {
    const double nu = m->nu;
    const double length = m->length;
    return NormTrajectory(
        name, [nu, length](double t) { return t < length ? std::exp(-nu * t) : 0.0; }, flags, 0.0,
        [nu, length](double t) { return t < length ? -nu * t : -INFINITY; });
  }
  if (const auto* m = model.as<FractionalIntegration>()) {
    const int n = m->grid_size;
    const std::uint64_t seed = model.power_seed();
    auto grid = make_fractional_grid(n);
    // Resolution probe: compare against the half-resolution discretization.
    double error_bound = 0.0;
    if (n / 2 >= 16) {
      auto coarse = make_fractional_grid(n / 2);
      for (double probe : {0.25, 0.5, 1.0, 2.0}) {
        const double fine_value = fractional_norm_on(*grid, probe, seed);
        const double difference = std::abs(fine_value - fractional_norm_on(*coarse, probe, seed));
        error_bound = std::max(error_bound, difference);
        if (difference > 0.05 * fine_value) flags.is_inconclusive = true;
      }
    }
    auto evaluate = memoize([grid, seed](double t) { return fractional_norm_on(*grid, t, seed); });
    auto log_evaluate = [evaluate, grid, seed](double t) {
      const double v = evaluate(t);
      return v > 1e-280 ? std::log(v) : fractional_log_norm_on(*grid, t, seed);
    };
    return NormTrajectory(name, evaluate, flags, error_bound, log_evaluate);
  }

  const auto& a = model.as<MatrixSemigroup>()->generator;
  const std::uint64_t seed = model.power_seed();
  auto evaluate = memoize([a, seed](double t) { return matrix_norm(a, t, seed); });
  auto log_evaluate = [a, seed](double t) { return matrix_log_norm(a, t, seed); };
  auto sampler = [a, seed](double start, double step, std::size_t count) {
    return sample_matrix_norms(a, start, step, count, seed);
  };
  return NormTrajectory(name, evaluate, flags, 1e-11, log_evaluate, sampler);
}

NormTrajectory make_vector_trajectory(const SemigroupModel& model, std::span<const double> x) {
  const auto* m = model.as<MatrixSemigroup>();
  if (m == nullptr) throw InvalidArgument("vector trajectory: matrix model required");
  const Matrix& a = m->generator;
  if (x.size() != a.cols()) throw InvalidArgument("vector trajectory: dimension mismatch");
  double norm = 0.0;
  for (double v : x) norm += v * v;
  if (std::abs(std::sqrt(norm) - 1.0) > 1e-12) throw InvalidArgument("vector trajectory: x must be a unit vector");

  std::vector<double> start(x.begin(), x.end());
  auto orbit_norm = [](const Matrix& e, const std::vector<double>& v) {
    std::vector<double> y(e.rows());
    e.apply(v, y);
    double s = 0.0;
    for (double c : y) s += c * c;
    return std::sqrt(s);
  };
  auto evaluate = [a, start, orbit_norm](double t) { return orbit_norm(matrix_exponential(a, t), start); };
  auto sampler = [a, start](double t0, double step, std::size_t count) {
    std::vector<double> out(count);
    const Matrix stepper = matrix_exponential(a, step);
    std::vector<double> y(a.rows());
    std::vector<double> v;
    for (std::size_t i = 0; i < count; ++i) {
      if (i % kAnchorInterval == 0) {
        v.assign(a.rows(), 0.0);
        matrix_exponential(a, t0 + static_cast<double>(i) * step).apply(start, v);
      } else {
        stepper.apply(v, y);
        v.swap(y);
      }
      double s = 0.0;
      for (double c : v) s += c * c;
      out[i] = std::sqrt(s);
    }
    return out;
  };
  TrajectoryFlags flags;
  flags.is_contraction = false;
  flags.is_norm_continuous = true;
  flags.is_exact = false;
  return NormTrajectory(to_spec_string(model) + " orbit", evaluate, flags, 1e-12, {}, sampler);
}

}  // namespace entrytime
