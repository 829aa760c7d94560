#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "entrytime/cli.hpp"
#include "entrytime/errors.hpp"

namespace entrytime::cli {

namespace {

using Json = nlohmann::ordered_json;

/// 12 significant digits, so the document does not depend on the last bits of a result.
Json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

Json num(const ExtendedReal& x) { return x.is_infinite() ? Json("inf") : num(x.value()); }

Json search_json(const SearchConfig& c) {
  Json j;
  j["time_tol"] = num(c.time_tol);
  j["grid_step"] = num(c.grid_step);
  j["horizon_start"] = num(c.horizon_start);
  j["horizon_cap"] = num(c.horizon_cap);
  j["norm_floor"] = num(c.norm_floor);
  return j;
}

Json thresholds_json(const ClassifyThresholds& t) {
  Json j;
  j["eps_super"] = num(t.eps_super);
  j["eps_tailsum"] = num(t.eps_tailsum);
  j["eps_trend"] = num(t.eps_trend);
  j["plateau_window"] = t.plateau_window;
  return j;
}

Json table_json(const EntryTimeTable& table, const std::string& csv_name) {
  Json j;
  j["csv"] = csv_name;
  j["r_max"] = table.r_max;
  Json t = Json::array();
  Json u = Json::array();
  Json status = Json::array();
  for (const auto& x : table.t) t.push_back(num(x));
  for (const auto& x : table.u) u.push_back(num(x));
  for (const auto s : table.status) status.push_back(to_string(s));
  j["t"] = std::move(t);
  j["u"] = std::move(u);
  j["status"] = std::move(status);
  j["extinction_time"] = table.extinction_time ? num(*table.extinction_time) : Json(nullptr);
  j["monotonicity_defect"] = num(table.monotonicity_defect);
  return j;
}

Json classification_json(const Classification& c) {
  Json j;
  j["verdict"] = to_string(c.verdict);
  j["nu"] = num(c.nu);
  j["k"] = num(c.k);
  j["k_error"] = num(c.k_error);
  j["inconclusive"] = c.inconclusive;
  j["stable_test_passed"] = c.stable_test_passed;
  j["superstable_test_passed"] = c.superstable_test_passed;
  j["extinction_test_passed"] = c.extinction_test_passed;
  const TailStatistics& s = c.diagnostics;
  Json d;
  d["r_max"] = s.r_max;
  d["second_half_start"] = s.second_half_start;
  d["last_u"] = num(s.last_u);
  d["tail_mean"] = num(s.tail_mean);
  d["tail_sum"] = num(s.tail_sum);
  d["window_sum"] = num(s.window_sum);
  d["trend_slope"] = num(s.trend_slope);
  d["growth_elasticity"] = num(s.growth_elasticity);
  d["any_infinite"] = s.any_infinite;
  d["any_horizon_exceeded"] = s.any_horizon_exceeded;
  d["any_inconclusive"] = s.any_inconclusive;
  j["diagnostics"] = std::move(d);
  return j;
}

Json growth_json(const GrowthEstimate& g) {
  Json j;
  j["omega_large_t"] = num(g.omega_large_t);
  j["omega_inf_grid"] = num(g.omega_inf_grid);
  j["omega_entry"] = num(g.omega_entry);
  j["agreement_spread"] = num(g.agreement_spread);
  j["all_minus_infinity"] = g.all_minus_infinity;
  j["t_large"] = num(g.t_large);
  return j;
}

Json indices_json(const StabilityIndices& s) {
  Json j;
  j["nu_hat"] = num(s.nu_hat);
  j["k_partial_sum"] = num(s.k_partial_sum);
  j["k_hat_sum"] = num(s.k_hat_sum);
  j["sum_converged"] = s.sum_converged;
  j["k_hat_overshoot"] = num(s.k_hat_overshoot);
  Json grid = Json::array();
  for (std::size_t i = 0; i < s.nu_grid.size(); ++i) {
    Json cell;
    cell["nu"] = num(s.nu_grid[i]);
    cell["log_m"] = num(s.log_m[i]);
    grid.push_back(std::move(cell));
  }
  j["overshoot_grid"] = std::move(grid);
  j["skipped_nu"] = s.skipped_nu;
  return j;
}

Json integral_json(double p, const PazyIntegral& r) {
  Json j;
  j["p"] = num(p);
  j["verdict"] = to_string(r.verdict);
  j["value"] = num(r.value);
  j["error_estimate"] = num(r.error_estimate);
  j["upper"] = num(r.upper);
  j["horizon"] = num(r.horizon);
  return j;
}

Json pazy_json(const PazyReport& p) {
  Json j;
  j["status"] = to_string(p.status);
  j["a"] = num(p.a);
  j["t0"] = num(p.t0);
  Json criteria = Json::array();
  for (const PazyCriterion& c : p.criteria) {
    Json cj;
    cj["criterion"] = c.name;
    cj["weight"] = c.weight == WeightKind::Type::NormPower ? "NormPower" : "InverseLogPower";
    cj["fires"] = c.fires;
    cj["implies"] = to_string(c.implies);
    Json results = Json::array();
    for (std::size_t i = 0; i < c.results.size(); ++i) results.push_back(integral_json(c.p_values[i], c.results[i]));
    cj["integrals"] = std::move(results);
    criteria.push_back(std::move(cj));
  }
  j["criteria"] = std::move(criteria);
  j["limit_estimate"] = num(p.limit_estimate);
  j["trace_sup"] = num(p.trace_sup);
  j["strongest"] = to_string(p.strongest);
  j["contradictions"] = p.contradictions;
  return j;
}

}  // namespace

std::string report_json(const AnalysisReport& report, const std::string& csv_name) {
  Json j;
  j["tool"] = {{"name", "entrytime"}, {"version", kToolVersion}};
  j["model"] = {{"spec", report.model_spec}, {"kind", report.model_kind}};
  Json config;
  config["r_max"] = report.options.r_max;
  config["seed"] = report.options.seed;
  config["search"] = search_json(report.options.search);
  config["classify"] = thresholds_json(report.options.thresholds);
  config["pazy_a"] = num(report.options.pazy_a);
  config["skip_pazy"] = report.options.skip_pazy;
  j["config"] = std::move(config);
  j["trajectory"] = {{"is_contraction", report.flags.is_contraction},
                     {"is_norm_continuous", report.flags.is_norm_continuous},
                     {"is_exact", report.flags.is_exact},
                     {"is_inconclusive", report.flags.is_inconclusive},
                     {"eval_error_bound", num(report.eval_error_bound)}};
  j["entry_times"] = table_json(report.table, csv_name);
  j["classification"] = classification_json(report.classification);
  j["growth"] = growth_json(report.growth);
  j["indices"] = indices_json(report.indices);
  j["pazy"] = report.pazy ? pazy_json(*report.pazy) : Json(nullptr);
  j["consistency"] = report.consistency;
  return j.dump(2) + "\n";
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InvalidArgument("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InvalidArgument("cannot move report into place: " + path.string());
  }
}

}  // namespace entrytime::cli
