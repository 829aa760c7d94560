#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "entrytime/model_spec.hpp"
#include "entrytime/models.hpp"
#include "entrytime/numerics.hpp"

namespace testing_support {

using entrytime::Matrix;

/// Stable triangular generator: diagonal in [-3, -0.5], off-diagonal in [-2, 2].
inline Matrix random_triangular(std::uint64_t seed, std::size_t n = 4, bool upper = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> diag(-3.0, -0.5);
  std::uniform_real_distribution<double> off(-2.0, 2.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        a(i, j) = diag(rng);
      } else if ((upper && j > i) || (!upper && j < i)) {
        a(i, j) = off(rng);
      }
    }
  }
  return a;
}

inline Matrix random_dense(std::uint64_t seed, std::size_t rows, std::size_t cols, double lo = -2.0, double hi = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  Matrix a(rows, cols);
  for (double& x : a.data()) x = d(rng);
  return a;
}

inline std::vector<double> random_unit(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  double s = 0.0;
  for (double& v : x) {
    v = g(rng);
    s += v * v;
  }
  for (double& v : x) v /= std::sqrt(s);
  return x;
}

/// The models every suite-wide property runs over. Fractional integration uses a
/// small mesh to keep the suite fast.
inline std::vector<std::string> suite_specs() {
  return {"scalar-decay nu=1",
          "scalar-decay nu=2",
          "gaussian-shift",
          "nilpotent-shift L=1",
          "damped-nilpotent nu=1 L=1",
          "matrix [[-1,10],[0,-1]]",
          "matrix [[-1,0],[0,-2]]",
          "matrix [[0,1],[0,0]]",
          "fractional-integration n=64"};
}

// --- Independent references, deliberately not using the library kernels ---

/// e^{tA} by classical RK4 on X' = AX with n_steps steps.
inline Matrix expm_rk4(const Matrix& a, double t, int n_steps = 4000) {
  const std::size_t n = a.rows();
  Matrix x = Matrix::identity(n);
  const double h = t / n_steps;
  auto mul = [&](const Matrix& m) {
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) out(i, j) += a(i, k) * m(k, j);
    return out;
  };
  auto axpy = [&](const Matrix& m, const Matrix& d, double s) {
    Matrix out = m;
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += s * d.data()[i];
    return out;
  };
  for (int s = 0; s < n_steps; ++s) {
    const Matrix k1 = mul(x);
    const Matrix k2 = mul(axpy(x, k1, h / 2));
    const Matrix k3 = mul(axpy(x, k2, h / 2));
    const Matrix k4 = mul(axpy(x, k3, h));
    for (std::size_t i = 0; i < x.data().size(); ++i) {
      x.data()[i] += h / 6 * (k1.data()[i] + 2 * k2.data()[i] + 2 * k3.data()[i] + k4.data()[i]);
    }
  }
  return x;
}

/// Largest eigenvalue of a symmetric matrix by cyclic two-sided Jacobi rotations.
inline double symmetric_max_eigenvalue(Matrix g) {
  const std::size_t n = g.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += g(p, q) * g(p, q);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (g(p, q) == 0.0) continue;
        const double theta = 0.5 * std::atan2(2 * g(p, q), g(q, q) - g(p, p));
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (std::size_t k = 0; k < n; ++k) {
          const double gkp = g(k, p);
          const double gkq = g(k, q);
          g(k, p) = c * gkp - s * gkq;
          g(k, q) = s * gkp + c * gkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double gpk = g(p, k);
          const double gqk = g(q, k);
          g(p, k) = c * gpk - s * gqk;
          g(q, k) = s * gpk + c * gqk;
        }
      }
    }
  }
  double best = g(0, 0);
  for (std::size_t i = 1; i < n; ++i) best = std::max(best, g(i, i));
  return best;
}

/// ‖M‖₂ as the square root of the top eigenvalue of MᵀM.
inline double spectral_norm_reference(const Matrix& m) {
  Matrix g(m.cols(), m.cols());
  for (std::size_t i = 0; i < m.cols(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      for (std::size_t k = 0; k < m.rows(); ++k) g(i, j) += m(k, i) * m(k, j);
  return std::sqrt(std::max(0.0, symmetric_max_eigenvalue(g)));
}

}  // namespace testing_support
