#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "entrytime/numerics.hpp"
#include "entrytime/trajectory.hpp"

namespace entrytime {

/// T(t)f = e^{-νt} f, so ‖T(t)‖ = e^{-νt}.
struct ScalarDecay {
  double nu = 1.0;
};

/// Right shift on L²(ℝ₊, Gaussian measure): ‖T(t)‖ = e^{-t²/4}.
struct GaussianShift {};

/// Left shift on L²[0, L] with extinction: ‖T(t)‖ = 1 for t < L, 0 afterwards.
struct NilpotentShift {
  double length = 1.0;
};

/// Synthetic: ‖T(t)‖ = e^{-νt} for t < L, 0 afterwards.
struct DampedNilpotent {
  double nu = 1.0;
  double length = 1.0;
};

/// Riemann–Liouville fractional integration J^t on L²[0,1], discretized on n cells.
struct FractionalIntegration {
  int grid_size = 400;
};

/// T(t) = e^{tA} for a square real generator A.
struct MatrixSemigroup {
  Matrix generator;
};

using ModelKind =
    std::variant<ScalarDecay, GaussianShift, NilpotentShift, DampedNilpotent, FractionalIntegration, MatrixSemigroup>;

/// A validated semigroup model. Parameters out of range throw InvalidModel.
class SemigroupModel {
 public:
  explicit SemigroupModel(ModelKind kind, std::uint64_t power_seed = kDefaultPowerSeed);

  const ModelKind& kind() const noexcept { return kind_; }
  /// The ModelSpec keyword: "scalar-decay", "matrix", ...
  std::string kind_name() const;
  /// Closed-form norm available (everything but matrices and fractional integration).
  bool is_analytic() const noexcept;
  std::uint64_t power_seed() const noexcept { return power_seed_; }

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&kind_);
  }

 private:
  ModelKind kind_;
  std::uint64_t power_seed_;
};

/// ‖T(t)‖ straight from the model (no memo). Throws InvalidArgument for t < 0 or NaN.
double norm_at(const SemigroupModel& model, double t);

/// Flags of the model's trajectory; matrix contraction is decided by sampling.
TrajectoryFlags model_flags(const SemigroupModel& model);

/// The norm trajectory of a model; numeric kinds are memoized.
NormTrajectory make_trajectory(const SemigroupModel& model);

/// t ↦ ‖e^{tA}x‖ for a matrix model and a unit vector x (‖x‖ = 1 within 1e-12).
NormTrajectory make_vector_trajectory(const SemigroupModel& model, std::span<const double> x);

/// Default accuracy of operator norms taken inside matrix trajectories.
inline constexpr double kTrajectoryNormTol = 1e-13;

// --- Fractional integration -------------------------------------------------

/// Cell boundaries x_0 = 0 < ... < x_n = 1: geometrically graded (ratio 0.85)
/// toward s = 0, uniform elsewhere.
std::vector<double> fractional_mesh(int n);

/// L²-weighted collocation matrix D K D⁻¹ of J^t, K_ij = ∫_{cell j} (s_i-u)^{t-1} du / Γ(t)
/// at cell midpoints s_i, D = diag(√width). Its spectral norm is the discrete ‖J^t‖.
Matrix fractional_integration_matrix(double t, int n);

/// Discrete ‖J^t‖ on n cells; 1 at t = 0. Requires t ≥ 0 and n ≥ 16.
double fractional_integration_norm(double t, int n);

struct FractionalNormCheck {
  double value = 0.0;
  /// |norm(n) - norm(n/2)|
  double error_estimate = 0.0;
  /// error_estimate ≤ 5% of value
  bool resolved = true;
};

FractionalNormCheck fractional_integration_norm_checked(double t, int n);

}  // namespace entrytime
