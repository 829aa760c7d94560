#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace entrytime {

/// Dense real matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::initializer_list<double> entries);
  /// Throws InvalidModel on ragged or empty input.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_ && rows_ > 0; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Matrix operator*(const Matrix& rhs) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix scaled(double factor) const;
  Matrix transposed() const;

  /// y = M x
  void apply(std::span<const double> x, std::span<double> y) const;
  /// y = M^T x
  void apply_transposed(std::span<const double> x, std::span<double> y) const;

  double max_abs() const noexcept;
  /// Maximum absolute column sum.
  double one_norm() const noexcept;
  double frobenius_norm() const noexcept;
  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// e^{tA} by scaling and squaring with a truncated Taylor series.
/// Throws InvalidModel for a non-square or non-finite A, InvalidArgument
/// for t < 0 or non-finite t.
Matrix matrix_exponential(const Matrix& a, double t);

inline constexpr std::uint64_t kDefaultPowerSeed = 0x5eedULL;
inline constexpr int kPowerIterationCap = 10000;

struct SingularValueEstimate {
  double sigma = 0.0;
  /// Unit right singular vector estimate; usable as a warm start.
  std::vector<double> right_vector;
  int iterations = 0;
};

/// Matrices with at most this many columns go through one-sided Jacobi.
inline constexpr std::size_t kJacobiMaxColumns = 32;

/// Largest singular value. Up to kJacobiMaxColumns columns it comes from a
/// one-sided Jacobi SVD, which does not care how close σ₁ and σ₂ are.
/// Wider matrices use Lanczos on M^T M with full reorthogonalization, started
/// from `start` (or a seeded pseudo-random vector when `start` is empty) and
/// restarted from the Ritz vector every 512 steps. It stops once the Ritz
/// residual is below tol times the estimate. Throws NumericsFailure, carrying
/// the last estimate, after `max_iterations` products with M^T M.
SingularValueEstimate largest_singular_value(const Matrix& m, double tol,
                                             std::span<const double> start = {},
                                             std::uint64_t seed = kDefaultPowerSeed,
                                             int max_iterations = kPowerIterationCap);

/// Spectral norm ‖M‖₂.
double operator_norm(const Matrix& m, double tol = 1e-13, std::uint64_t seed = kDefaultPowerSeed);

/// Γ(x) for x > 0 (Lanczos approximation, reflection below 1/2).
double gamma_eval(double x);
/// log Γ(x) for x > 0; finite for arguments where Γ itself overflows.
double log_gamma(double x);

/// Deterministic unit vector of dimension n drawn from a seeded generator.
std::vector<double> seeded_unit_vector(std::size_t n, std::uint64_t seed);

}  // namespace entrytime
