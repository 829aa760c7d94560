#include "entrytime/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "entrytime/errors.hpp"
#include "entrytime/extended.hpp"

namespace entrytime {

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string format_extended(const ExtendedReal& x) {
  return x.is_infinite() ? "inf" : format_number(x.value());
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<std::vector<double>> copy;
  for (const auto& r : rows) copy.emplace_back(r);
  *this = from_rows(copy);
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::initializer_list<double> entries) {
  Matrix m(entries.size(), entries.size());
  std::size_t i = 0;
  for (double e : entries) {
    m(i, i) = e;
    ++i;
  }
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw InvalidModel("matrix must have at least one entry");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols_) throw InvalidModel("ragged matrix rows");
    std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * m.cols_));
  }
  return m;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw InvalidArgument("matrix product: dimension mismatch");
  Matrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    double* orow = &out.data_[i * out.cols_];
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = data_[i * cols_ + k];
      if (a == 0.0) continue;
      const double* brow = &rhs.data_[k * rhs.cols_];
      for (std::size_t j = 0; j < rhs.cols_; ++j) orow[j] += a * brow[j];
    }
  }
  return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw InvalidArgument("matrix sum: dimension mismatch");
  Matrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += rhs.data_[i];
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const { return *this + rhs.scaled(-1.0); }

Matrix Matrix::scaled(double factor) const {
  Matrix out = *this;
  for (double& v : out.data_) v *= factor;
  return out;
}

Matrix Matrix::transposed() const {
  Matrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

void Matrix::apply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* row = &data_[i * cols_];
    double acc = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void Matrix::apply_transposed(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = &data_[i * cols_];
    for (std::size_t j = 0; j < cols_; ++j) y[j] += row[j] * xi;
  }
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::one_norm() const noexcept {
  double best = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

double Matrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// Matrix exponential

Matrix matrix_exponential(const Matrix& a, double t) {
  if (!a.is_square()) throw InvalidModel("matrix_exponential: generator must be square");
  if (!a.all_finite()) throw InvalidModel("matrix_exponential: generator has non-finite entries");
  if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("matrix_exponential: t must be finite and >= 0");

  const std::size_t n = a.rows();
  Matrix x = a.scaled(t);
  const double norm = x.one_norm();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    x = x.scaled(std::ldexp(1.0, -squarings));
  }

  Matrix sum = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= 60; ++k) {
    term = (term * x).scaled(1.0 / k);
    sum = sum + term;
    if (term.one_norm() < 1e-16 * sum.one_norm()) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// ---------------------------------------------------------------------------
// Power iteration

std::vector<double> seeded_unit_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(n);
  double norm = 0.0;
  for (double& x : v) {
    // Map the raw 64-bit draw to [-1, 1) without the implementation-defined
    // distribution classes so the sequence is identical across standard libraries.
    x = static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    v.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
  } else {
    for (double& x : v) x /= norm;
  }
  return v;
}

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Hestenes one-sided Jacobi on an already scaled matrix.
SingularValueEstimate jacobi_largest_singular_value(const Matrix& b, int max_sweeps) {
  const std::size_t m = b.rows();
  const std::size_t n = b.cols();
  Matrix u = b;
  Matrix v = Matrix::identity(n);
  constexpr double kTol = 1e-15;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        double gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += u(i, p) * u(i, p);
          beta += u(i, q) * u(i, q);
          gamma += u(i, p) * u(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= kTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double up = u(i, p);
          const double uq = u(i, q);
          u(i, p) = c * up - s * uq;
          u(i, q) = s * up + c * uq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
  SingularValueEstimate out;
  out.iterations = sweep + 1;
  std::size_t best = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += u(i, j) * u(i, j);
    s = std::sqrt(s);
    if (s > out.sigma) {
      out.sigma = s;
      best = j;
    }
  }
  out.right_vector.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.right_vector[i] = v(i, best);
  return out;
}

/// Largest eigenvalue of the symmetric tridiagonal matrix (alpha, beta) by Sturm bisection.
double tridiagonal_largest_eigenvalue(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const std::size_t k = alpha.size();
  double lo = alpha[0];
  double hi = alpha[0];
  for (std::size_t i = 0; i < k; ++i) {
    const double off = (i > 0 ? std::abs(beta[i - 1]) : 0.0) + (i + 1 < k ? std::abs(beta[i]) : 0.0);
    lo = std::min(lo, alpha[i] - off);
    hi = std::max(hi, alpha[i] + off);
  }
  // Eigenvalues strictly below x.
  auto count_below = [&](double x) {
    std::size_t count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double b2 = i > 0 ? beta[i - 1] * beta[i - 1] : 0.0;
      d = alpha[i] - x - (i > 0 ? b2 / d : 0.0);
      if (d == 0.0) d = -1e-300;
      if (d < 0.0) ++count;
    }
    return count;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) == k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// Unit eigenvector of the tridiagonal matrix for eigenvalue theta, by inverse iteration.
std::vector<double> tridiagonal_eigenvector(const std::vector<double>& alpha, const std::vector<double>& beta,
                                            double theta) {
  const std::size_t k = alpha.size();
  std::vector<double> y(k, 1.0);
  if (k == 1) return y;
  const double shift = theta + 1e-14 * std::max(std::abs(theta), 1e-300);
  std::vector<double> c(k);
  std::vector<double> d(k);
  for (int it = 0; it < 3; ++it) {
    // Thomas algorithm on (T - shift I) x = y; tiny pivots are what inverse iteration wants.
    double piv = alpha[0] - shift;
    if (piv == 0.0) piv = 1e-300;
    c[0] = beta[0] / piv;
    d[0] = y[0] / piv;
    for (std::size_t i = 1; i < k; ++i) {
      piv = alpha[i] - shift - beta[i - 1] * c[i - 1];
      if (piv == 0.0) piv = 1e-300;
      c[i] = i + 1 < k ? beta[i] / piv : 0.0;
      d[i] = (y[i] - beta[i - 1] * d[i - 1]) / piv;
    }
    y[k - 1] = d[k - 1];
    for (std::size_t i = k - 1; i-- > 0;) y[i] = d[i] - c[i] * y[i + 1];
    double s = 0.0;
    for (double v : y) s = std::max(s, std::abs(v));
    if (!(s > 0.0) || !std::isfinite(s)) {
      y.assign(k, 0.0);
      y[k - 1] = 1.0;
      return y;
    }
    for (double& v : y) v /= s;
  }
  const double nrm = norm2(y);
  for (double& v : y) v /= nrm;
  return y;
}

}  // namespace

SingularValueEstimate largest_singular_value(const Matrix& m, double tol, std::span<const double> start,
                                             std::uint64_t seed, int max_iterations) {
  if (m.empty()) throw InvalidArgument("operator_norm: empty matrix");
  if (!(tol > 0.0)) throw InvalidArgument("operator_norm: tol must be positive");
  if (!m.all_finite()) throw InvalidArgument("operator_norm: non-finite entries");

  SingularValueEstimate out;
  const double scale = m.max_abs();
  if (scale == 0.0) {
    out.right_vector = seeded_unit_vector(m.cols(), seed);
    return out;
  }
  const Matrix b = m.scaled(1.0 / scale);
  if (m.cols() <= kJacobiMaxColumns) {
    SingularValueEstimate j = jacobi_largest_singular_value(b, 60);
    j.sigma *= scale;
    return j;
  }

  std::vector<double> x;
  if (start.size() == m.cols() && norm2(start) > 0.0) {
    x.assign(start.begin(), start.end());
    const double nx = norm2(x);
    for (double& v : x) v /= nx;
  } else {
    x = seeded_unit_vector(m.cols(), seed);
  }
  std::vector<double> y(m.rows());
  std::vector<double> z(m.cols());

  b.apply(x, y);
  if (norm2(y) == 0.0) {
    // Start vector in the null space: restart from the heaviest column.
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < b.rows(); ++i) s += b(i, j) * b(i, j);
      if (s > best_norm) {
        best_norm = s;
        best = j;
      }
    }
    std::fill(x.begin(), x.end(), 0.0);
    x[best] = 1.0;
    b.apply(x, y);
  }

  // Lanczos on BᵀB with full reorthogonalization. Unlike plain power iteration it
  // does not stall when the top singular values cluster (J^t near I, say).
  const std::size_t n = b.cols();
  const std::size_t max_dim = std::min<std::size_t>(n, 512);
  double theta = 0.0;
  int products = 0;
  while (true) {
    std::vector<std::vector<double>> q{x};
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> ritz;
    bool converged = false;
    for (std::size_t j = 0; j < max_dim; ++j) {
      b.apply(q[j], y);
      b.apply_transposed(y, z);
      ++products;
      double a = 0.0;
      for (std::size_t i = 0; i < n; ++i) a += q[j][i] * z[i];
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& qi : q) {
          double c = 0.0;
          for (std::size_t i = 0; i < n; ++i) c += qi[i] * z[i];
          for (std::size_t i = 0; i < n; ++i) z[i] -= c * qi[i];
        }
      }
      const double bnext = norm2(z);
      theta = tridiagonal_largest_eigenvalue(alpha, beta);
      ritz = tridiagonal_eigenvector(alpha, beta, theta);
      const double residual = bnext * std::abs(ritz.back());
      if (residual <= tol * theta || bnext <= 1e-300 || j + 1 == n) {
        converged = true;
        break;
      }
      if (j + 1 == max_dim || products >= max_iterations) break;
      beta.push_back(bnext);
      std::vector<double> next(n);
      for (std::size_t i = 0; i < n; ++i) next[i] = z[i] / bnext;
      q.push_back(std::move(next));
    }
    std::vector<double> v(n, 0.0);
    for (std::size_t k = 0; k < ritz.size(); ++k) {
      for (std::size_t i = 0; i < n; ++i) v[i] += ritz[k] * q[k][i];
    }
    const double nv = norm2(v);
    if (nv > 0.0) {
      for (double& e : v) e /= nv;
      x = std::move(v);
    }
    out.iterations = products;
    if (converged) {
      out.sigma = std::sqrt(std::max(theta, 0.0)) * scale;
      out.right_vector = std::move(x);
      return out;
    }
    if (products >= max_iterations) break;
  }
  throw NumericsFailure("operator_norm: Lanczos iteration did not converge", std::sqrt(std::max(theta, 0.0)) * scale);
}

double operator_norm(const Matrix& m, double tol, std::uint64_t seed) {
  return largest_singular_value(m, tol, {}, seed).sigma;
}

// ---------------------------------------------------------------------------
// Gamma function

namespace {

constexpr double kLanczosG = 7.0;
constexpr double kLanczosCoefficients[] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double z) {
  double a = kLanczosCoefficients[0];
  for (int i = 1; i < 9; ++i) a += kLanczosCoefficients[i] / (z + i);
  return a;
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw InvalidArgument("log_gamma: argument must be positive and finite");
  if (x < 0.5) {
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_sum(z));
}

double gamma_eval(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw InvalidArgument("gamma_eval: argument must be positive and finite");
  if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_eval(1.0 - x));
  if (x > 140.0) return std::exp(log_gamma(x));
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  // Split the power so t^(z+1/2) does not overflow before e^{-t} scales it down.
  const double half = std::pow(t, 0.5 * (z + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * lanczos_sum(z);
}

}  // namespace entrytime
