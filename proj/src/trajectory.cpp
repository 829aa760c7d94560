#include "entrytime/trajectory.hpp"

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "entrytime/errors.hpp"

namespace entrytime {

NormTrajectory::NormTrajectory(std::string name, Evaluator evaluate, TrajectoryFlags flags, double eval_error_bound,
                               Evaluator log_evaluate, Sampler sampler)
    : name_(std::move(name)),
      evaluate_(std::move(evaluate)),
      log_evaluate_(std::move(log_evaluate)),
      sampler_(std::move(sampler)),
      flags_(flags),
      eval_error_bound_(eval_error_bound) {
  if (!evaluate_) throw InvalidArgument("NormTrajectory: evaluator required");
  if (!(eval_error_bound_ >= 0.0)) throw InvalidArgument("NormTrajectory: eval_error_bound must be >= 0");
}

double NormTrajectory::evaluate(double t) const {
  if (!(t >= 0.0)) throw InvalidArgument("NormTrajectory: t must be >= 0");
  const double v = evaluate_(t);
  if (std::isnan(v)) throw NumericsFailure("NormTrajectory: evaluation produced NaN", t);
  return v;
}

double NormTrajectory::log_evaluate(double t) const {
  if (!(t >= 0.0)) throw InvalidArgument("NormTrajectory: t must be >= 0");
  if (log_evaluate_) return log_evaluate_(t);
  const double v = evaluate(t);
  return v > 0.0 ? std::log(v) : -INFINITY;
}

std::vector<double> NormTrajectory::sample(double start, double step, std::size_t count) const {
  if (!(start >= 0.0) || !(step > 0.0)) throw InvalidArgument("NormTrajectory::sample: bad grid");
  if (sampler_) return sampler_(start, step, count);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = evaluate(start + static_cast<double>(i) * step);
  return out;
}

NormTrajectory NormTrajectory::with_flags(TrajectoryFlags flags) const {
  NormTrajectory copy = *this;
  copy.flags_ = flags;
  return copy;
}

namespace {

struct MemoKey {
  int exponent;
  std::int64_t mantissa;
  bool operator==(const MemoKey&) const = default;
};

struct MemoKeyHash {
  std::size_t operator()(const MemoKey& k) const noexcept {
    return std::hash<std::int64_t>{}(k.mantissa) ^ (static_cast<std::size_t>(k.exponent) * 0x9e3779b97f4a7c15ULL);
  }
};

MemoKey memo_key(double t) {
  if (t == 0.0) return {0, 0};
  const int e = static_cast<int>(std::floor(std::log10(std::abs(t))));
  const double scaled = t * std::pow(10.0, 11 - e);
  return {e, std::llround(scaled)};
}

struct Memo {
  std::mutex mutex;
  std::unordered_map<MemoKey, double, MemoKeyHash> values;
};

}  // namespace

NormTrajectory::Evaluator memoize(NormTrajectory::Evaluator evaluate) {
  constexpr std::size_t kMaxEntries = 1u << 20;
  auto memo = std::make_shared<Memo>();
  return [memo, evaluate = std::move(evaluate)](double t) {
    const MemoKey key = memo_key(t);
    {
      std::lock_guard lock(memo->mutex);
      if (auto it = memo->values.find(key); it != memo->values.end()) return it->second;
    }
    const double v = evaluate(t);
    std::lock_guard lock(memo->mutex);
    if (memo->values.size() >= kMaxEntries) memo->values.clear();
    memo->values.emplace(key, v);
    return v;
  };
}

SubmultiplicativityReport validate_submultiplicativity(const NormTrajectory& traj,
                                                       std::span<const std::pair<double, double>> grid) {
  SubmultiplicativityReport report;
  report.slack = 1e-8 + 2.0 * traj.eval_error_bound();
  for (const auto& [s, t] : grid) {
    const double violation = traj.evaluate(s + t) - traj.evaluate(s) * traj.evaluate(t);
    if (violation > report.max_violation) {
      report.max_violation = violation;
      report.worst_s = s;
      report.worst_t = t;
    }
    ++report.pairs_checked;
  }
  report.pass = report.max_violation <= report.slack;
  return report;
}

std::vector<std::pair<double, double>> default_submultiplicativity_grid() {
  constexpr double kPoints[] = {0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0};
  std::vector<std::pair<double, double>> grid;
  for (double s : kPoints)
    for (double t : kPoints) grid.emplace_back(s, t);
  return grid;
}

}  // namespace entrytime
