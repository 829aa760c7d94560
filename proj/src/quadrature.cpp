#include "entrytime/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "entrytime/errors.hpp"

namespace entrytime {

namespace {

// Kronrod 15-point abscissae; odd indices are the embedded 7-point Gauss nodes.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;

  bool operator<(const Panel& other) const { return error < other.error; }
};

class Integrand {
 public:
  explicit Integrand(const std::function<double(double)>& f) : f_(f) {}

  double operator()(double x) {
    ++evaluations;
    const double v = f_(x);
    if (std::isnan(v)) throw NumericsFailure("integrate_adaptive: integrand returned NaN", x);
    if (std::isinf(v)) saw_infinity = true;
    return v;
  }

  long evaluations = 0;
  bool saw_infinity = false;

 private:
  const std::function<double(double)>& f_;
};

Panel gauss_kronrod15(Integrand& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  double res_abs = std::abs(res_k);
  double fv1[7];
  double fv2[7];
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double absc = half * kXgk[jtw];
    const double f1 = f(centre - absc);
    const double f2 = f(centre + absc);
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    res_g += kWg[j] * (f1 + f2);
    res_k += kWgk[jtw] * (f1 + f2);
    res_abs += kWgk[jtw] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double absc = half * kXgk[jtwm1];
    const double f1 = f(centre - absc);
    const double f2 = f(centre + absc);
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    res_k += kWgk[jtwm1] * (f1 + f2);
    res_abs += kWgk[jtwm1] * (std::abs(f1) + std::abs(f2));
  }
  const double mean = 0.5 * res_k;
  double res_asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) res_asc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

  Panel p{a, b, res_k * half, std::abs((res_k - res_g) * half)};
  res_asc *= std::abs(half);
  res_abs *= std::abs(half);
  if (res_asc != 0.0 && p.error != 0.0) p.error = res_asc * std::min(1.0, std::pow(200.0 * p.error / res_asc, 1.5));
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * kEps)) p.error = std::max(50.0 * kEps * res_abs, p.error);
  return p;
}

struct IntervalResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

/// Adaptive bisection on [a, b]. With `graded`, the initial mesh is refined
/// geometrically toward `a` so an integrable singularity there starts resolved.
IntervalResult integrate_interval(Integrand& f, double a, double b, double abs_tol, double rel_tol,
                                  int max_subdivisions, bool graded) {
  std::priority_queue<Panel> heap;
  std::vector<double> nodes;
  if (graded) {
    constexpr int kLevels = 12;
    constexpr double kRatio = 0.125;
    nodes.push_back(a);
    for (int k = kLevels; k >= 1; --k) nodes.push_back(a + (b - a) * std::pow(kRatio, k));
    nodes.push_back(b);
  } else {
    nodes = {a, b};
  }
  double total = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    Panel p = gauss_kronrod15(f, nodes[i], nodes[i + 1]);
    total += p.value;
    total_error += p.error;
    heap.push(p);
  }

  int panels = static_cast<int>(heap.size());
  while (total_error > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (panels >= max_subdivisions || f.saw_infinity) return {total, total_error, false};
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    const double floor = 4.0 * kEps * std::max(std::abs(mid), std::numeric_limits<double>::min());
    if (!(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < floor) {
      // Panel cannot be split further in floating point.
      return {total, total_error, false};
    }
    heap.pop();
    const Panel left = gauss_kronrod15(f, worst.a, mid);
    const Panel right = gauss_kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum to shed the drift of the incremental updates.
  total = 0.0;
  total_error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_error += heap.top().error;
    heap.pop();
  }
  return {total, total_error, !f.saw_infinity};
}

void validate(const QuadratureSpec& spec) {
  if (!std::isfinite(spec.lower) || spec.lower < 0.0) throw InvalidArgument("quadrature: lower must be finite and >= 0");
  if (!(spec.upper > spec.lower)) throw InvalidArgument("quadrature: upper must exceed lower");
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0)) throw InvalidArgument("quadrature: tolerances must be positive");
  if (spec.max_subdivisions < 1) throw InvalidArgument("quadrature: max_subdivisions must be positive");
  if (!(spec.horizon_cap > 0.0)) throw InvalidArgument("quadrature: horizon_cap must be positive");
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, const QuadratureSpec& spec) {
  validate(spec);
  Integrand integrand(f);
  QuadratureResult out;

  const bool infinite_upper = std::isinf(spec.upper);
  if (!infinite_upper || spec.tail_policy == TailPolicy::ClosedCutoff) {
    const double upper = std::min(spec.upper, spec.lower + spec.horizon_cap);
    const IntervalResult r =
        integrate_interval(integrand, spec.lower, upper, spec.abs_tol, spec.rel_tol, spec.max_subdivisions, true);
    out.value = r.value;
    out.error_estimate = r.error;
    out.horizon = upper;
    out.evaluations = integrand.evaluations;
    if (r.converged && std::abs(r.value) <= spec.divergence_threshold) {
      out.kind = QuadratureResult::Kind::Value;
    } else if (integrand.saw_infinity || std::abs(r.value) > spec.divergence_threshold) {
      out.kind = QuadratureResult::Kind::Divergent;
    } else {
      out.kind = QuadratureResult::Kind::Inconclusive;
    }
    return out;
  }

  // Horizon doubling: segments [lower + 2^k - 1, lower + 2^{k+1} - 1].
  constexpr double kDecayed = 1.0 - 1e-3;
  constexpr double kStalled = 0.999;
  constexpr int kStallRun = 3;
  double partial = 0.0;
  double error = 0.0;
  double seg_lo = spec.lower;
  double seg_len = 1.0;
  double prev_inc = -1.0;
  double prev_ratio = std::numeric_limits<double>::infinity();
  double prev_drift = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int k = 0; k < 64; ++k) {
    const double seg_hi = seg_lo + seg_len;
    if (seg_hi - spec.lower > spec.horizon_cap) break;
    const IntervalResult r = integrate_interval(integrand, seg_lo, seg_hi, 0.25 * spec.abs_tol, spec.rel_tol,
                                                spec.max_subdivisions, k == 0);
    partial += r.value;
    error += r.error;
    out.value = partial;
    out.error_estimate = error;
    out.horizon = seg_hi;
    out.evaluations = integrand.evaluations;
    if (integrand.saw_infinity || std::abs(partial) > spec.divergence_threshold) {
      out.kind = QuadratureResult::Kind::Divergent;
      return out;
    }
    if (!r.converged) {
      out.kind = QuadratureResult::Kind::Inconclusive;
      return out;
    }

    const double inc = std::abs(r.value);
    if (prev_inc >= 0.0) {
      double ratio;
      if (prev_inc > 0.0) {
        ratio = inc / prev_inc;
      } else {
        ratio = inc == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      }
      stalled = (inc > 0.0 && ratio >= kStalled) ? stalled + 1 : 0;
      if (stalled >= kStallRun) {
        out.kind = QuadratureResult::Kind::Divergent;
        return out;
      }
      if (ratio < kDecayed && prev_ratio < kDecayed) {
        // Geometric extrapolation of the remaining segments. Its uncertainty comes
        // from the drift of the ratio, which vanishes for exponential and power-law tails.
        const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(partial));
        const double tail = inc * ratio / (1.0 - ratio);
        const double drift = std::max(std::abs(ratio - prev_ratio), prev_drift);
        const double uncertainty = inc * drift / ((1.0 - ratio) * (1.0 - ratio));
        if (tail <= tol || uncertainty <= tol) {
          out.kind = QuadratureResult::Kind::Value;
          out.value = partial + tail;
          out.error_estimate = error + std::min(tail, uncertainty);
          return out;
        }
      }
      if (std::isfinite(prev_ratio)) prev_drift = std::abs(ratio - prev_ratio);
      prev_ratio = ratio;
    }
    prev_inc = inc;
    seg_lo = seg_hi;
    seg_len *= 2.0;
  }
  out.kind = QuadratureResult::Kind::Inconclusive;
  return out;
}

}  // namespace entrytime
