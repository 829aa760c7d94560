#include "entrytime/pazy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "entrytime/errors.hpp"

namespace entrytime {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_p(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("WeightKind: p must be positive and finite");
}

/// Norm ≥ 1 on two neighbouring points of a 64-point grid over [a, a+1].
bool flat_at_one(const NormTrajectory& traj, double a) {
  constexpr int kPoints = 64;
  bool previous = false;
  for (int i = 0; i < kPoints; ++i) {
    const bool at_one = traj.evaluate(a + static_cast<double>(i) / (kPoints - 1)) >= 1.0;
    if (at_one && previous) return true;
    previous = at_one;
  }
  return false;
}

PazyVerdict verdict_of(const QuadratureResult& q) {
  switch (q.kind) {
    case QuadratureResult::Kind::Value: return PazyVerdict::Value;
    case QuadratureResult::Kind::Divergent: return PazyVerdict::Divergent;
    case QuadratureResult::Kind::Inconclusive: break;
  }
  return PazyVerdict::Inconclusive;
}

bool any_value(const PazyCriterion& c) {
  return std::any_of(c.results.begin(), c.results.end(),
                     [](const PazyIntegral& r) { return r.verdict == PazyVerdict::Value; });
}

bool all_divergent(const PazyCriterion& c) {
  return !c.results.empty() && std::all_of(c.results.begin(), c.results.end(), [](const PazyIntegral& r) {
    return r.verdict == PazyVerdict::Divergent;
  });
}

}  // namespace

WeightKind WeightKind::norm_power(double p) {
  check_p(p);
  return {Type::NormPower, p};
}

WeightKind WeightKind::inverse_log_power(double p) {
  check_p(p);
  return {Type::InverseLogPower, p};
}

double WeightKind::F(double x) const {
  if (type == Type::NormPower) return std::exp(-p * x);
  if (x == 0.0) return kInf;
  return std::pow(x, -p);
}

std::string WeightKind::describe() const {
  std::ostringstream os;
  os << (type == Type::NormPower ? "NormPower(" : "InverseLogPower(") << p << ')';
  return os.str();
}

std::string to_string(PazyVerdict verdict) {
  switch (verdict) {
    case PazyVerdict::Value: return "Value";
    case PazyVerdict::Divergent: return "Divergent";
    case PazyVerdict::Inconclusive: return "Inconclusive";
    case PazyVerdict::CriterionInapplicable: return "CriterionInapplicable";
  }
  return "unknown";
}

std::string to_string(ImpliedClass c) {
  switch (c) {
    case ImpliedClass::None: return "None";
    case ImpliedClass::Stable: return "Stable";
    case ImpliedClass::Superstable: return "Superstable";
    case ImpliedClass::FiniteTimeExtinction: return "FiniteTimeExtinction";
  }
  return "unknown";
}

std::string to_string(PazyReport::Status status) {
  switch (status) {
    case PazyReport::Status::Evaluated: return "Evaluated";
    case PazyReport::Status::Inconclusive: return "Inconclusive";
    case PazyReport::Status::NotApplicable: return "NotApplicable";
  }
  return "unknown";
}

QuadratureSpec pazy_quadrature_spec() {
  QuadratureSpec spec;
  spec.rel_tol = 1e-8;
  return spec;
}

std::vector<double> PazyGrid::default_limit_trace() {
  std::vector<double> p;
  for (int k = 1; k <= 10; ++k) p.push_back(std::ldexp(1.0, -k));
  return p;
}

PazyIntegral pazy_integral(const NormTrajectory& traj, const WeightKind& w, double a, const QuadratureSpec& spec,
                           const SearchConfig& cfg) {
  check_p(w.p);
  if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("pazy_integral: a must be finite and >= 0");
  cfg.validate();

  PazyIntegral out;
  out.lower = a;
  const bool log_weight = w.type == WeightKind::Type::InverseLogPower;
  if (log_weight && flat_at_one(traj, a)) {
    out.verdict = PazyVerdict::CriterionInapplicable;
    out.upper = kInf;
    return out;
  }

  const std::optional<double> boundary = extinction_boundary(traj, cfg, a);
  out.upper = boundary ? *boundary : kInf;
  if (boundary && *boundary <= a) {
    out.verdict = PazyVerdict::Value;
    return out;
  }

  bool hit_one = false;
  auto integrand = [&](double t) -> double {
    if (log_weight) {
      const double lv = traj.log_evaluate(t);
      if (lv == -kInf) return 0.0;
      if (lv >= 0.0) {
        hit_one = true;
        return kInf;
      }
      return std::pow(-lv, -w.p);
    }
    const double v = traj.evaluate(t);
    if (v <= cfg.norm_floor) return 0.0;
    return std::pow(v, w.p);
  };

  QuadratureSpec q = spec;
  q.lower = a;
  q.upper = out.upper;
  const QuadratureResult r = integrate_adaptive(integrand, q);
  out.verdict = verdict_of(r);
  if (hit_one && out.verdict == PazyVerdict::Divergent) out.verdict = PazyVerdict::CriterionInapplicable;
  out.value = out.verdict == PazyVerdict::Divergent ? kInf : r.value;
  out.error_estimate = r.error_estimate;
  out.horizon = r.horizon;
  out.evaluations = r.evaluations;
  return out;
}

PazyReport pazy_criteria(const NormTrajectory& traj, double a_user, const PazyGrid& grid, const QuadratureSpec& spec,
                         const SearchConfig& cfg) {
  if (!(a_user >= 0.0) || !std::isfinite(a_user)) throw InvalidArgument("pazy_criteria: a must be finite and >= 0");
  if (grid.norm_power.empty() || grid.inverse_log.empty() || grid.limit_trace.empty()) {
    throw InvalidArgument("pazy_criteria: empty p grid");
  }

  PazyReport report;
  report.criteria[0] = {"i", WeightKind::Type::NormPower, grid.norm_power, {}, false, ImpliedClass::Stable};
  report.criteria[1] = {"ii", WeightKind::Type::InverseLogPower, grid.inverse_log, {}, false, ImpliedClass::Stable};
  report.criteria[2] = {"iii", WeightKind::Type::InverseLogPower, {1.0}, {}, false, ImpliedClass::Superstable};
  report.criteria[3] = {"iv", WeightKind::Type::InverseLogPower, grid.limit_trace, {}, false,
                        ImpliedClass::FiniteTimeExtinction};

  const EntryTime t0 = final_entry_time(traj, 0, cfg);
  if (t0.time.is_infinite()) {
    report.status = PazyReport::Status::NotApplicable;
    report.t0 = kInf;
    report.a = kInf;
    report.limit_estimate = kInf;
    report.trace_sup = kInf;
    return report;
  }
  report.t0 = t0.time.value();
  report.a = std::max(a_user, report.t0) + 1e-6;

  for (PazyCriterion& c : report.criteria) {
    for (double p : c.p_values) {
      const WeightKind w = c.weight == WeightKind::Type::NormPower ? WeightKind::norm_power(p)
                                                                   : WeightKind::inverse_log_power(p);
      c.results.push_back(pazy_integral(traj, w, report.a, spec, cfg));
    }
  }

  PazyCriterion& i = report.criteria[0];
  PazyCriterion& ii = report.criteria[1];
  PazyCriterion& iii = report.criteria[2];
  PazyCriterion& iv = report.criteria[3];
  i.fires = any_value(i);
  ii.fires = any_value(ii);
  iii.fires = any_value(iii);

  // (iv) is a statement about p ↓ 0: it needs the smallest p to converge and no divergence on the way.
  report.limit_estimate = kInf;
  report.trace_sup = -kInf;
  bool trace_diverges = false;
  double smallest_p = kInf;
  for (std::size_t k = 0; k < iv.results.size(); ++k) {
    const PazyIntegral& r = iv.results[k];
    if (r.verdict == PazyVerdict::Divergent) trace_diverges = true;
    if (r.verdict != PazyVerdict::Value) continue;
    report.trace_sup = std::max(report.trace_sup, r.value);
    if (iv.p_values[k] < smallest_p) {
      smallest_p = iv.p_values[k];
      report.limit_estimate = r.value;
    }
  }
  if (!std::isfinite(report.trace_sup)) report.trace_sup = kInf;
  const double min_p = *std::min_element(iv.p_values.begin(), iv.p_values.end());
  iv.fires = !trace_diverges && smallest_p == min_p;

  for (const PazyCriterion& c : report.criteria) {
    if (c.fires && static_cast<int>(c.implies) > static_cast<int>(report.strongest)) report.strongest = c.implies;
  }

  // The criteria are sufficient conditions, so a failing one says nothing, except
  // (i): exponential stability forces ∫‖T‖^p < ∞ for every p.
  if ((ii.fires || iii.fires || iv.fires) && all_divergent(i)) {
    report.contradictions.push_back("a stability criterion fires while (i) diverges at every p");
  }

  bool any_informative = false;
  for (const PazyCriterion& c : report.criteria) {
    for (const PazyIntegral& r : c.results) {
      if (r.verdict == PazyVerdict::Value || r.verdict == PazyVerdict::Divergent) any_informative = true;
    }
  }
  report.status = any_informative ? PazyReport::Status::Evaluated : PazyReport::Status::Inconclusive;
  return report;
}

SandwichResult ftrick_sandwich(const EntryTimeTable& table, const NormTrajectory& traj, const WeightKind& w,
                               const QuadratureSpec& spec, const SearchConfig& cfg) {
  for (const ExtendedReal& t : table.t) {
    if (t.is_infinite()) throw InvalidArgument("ftrick_sandwich: table has infinite entries");
  }
  if (!traj.flags().is_contraction) throw InvalidArgument("ftrick_sandwich: contraction trajectory required");
  if (table.t.front().value() != 0.0) throw InvalidArgument("ftrick_sandwich: t_0 must be 0");

  SandwichResult out;
  for (int r = 0; r <= table.r_max; ++r) {
    const double u = table.u[static_cast<std::size_t>(r)].value();
    out.lower += u * w.F(r + 1.0);
    const double f = w.F(static_cast<double>(r));
    out.upper = std::isinf(f) ? kInf : out.upper + u * f;
  }
  const PazyIntegral integral = pazy_integral(traj, w, 0.0, spec, cfg);
  out.integral_verdict = integral.verdict;
  out.integral = integral.verdict == PazyVerdict::Value ? integral.value : kInf;
  out.slack = 1e-4 * (1.0 + (std::isfinite(out.upper) ? out.upper : 0.0));
  const bool known = integral.verdict == PazyVerdict::Value || integral.verdict == PazyVerdict::Divergent;
  out.pass = known && out.lower - out.slack <= out.integral && out.integral <= out.upper + out.slack;
  return out;
}

}  // namespace entrytime
