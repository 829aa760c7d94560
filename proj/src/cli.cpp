#include "entrytime/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entrytime/errors.hpp"
#include "entrytime/model_spec.hpp"

namespace entrytime::cli {

namespace {

namespace fs = std::filesystem;

int strength(Verdict v) {
  switch (v) {
    case Verdict::Unstable: return 0;
    case Verdict::Stable: return 1;
    case Verdict::Superstable: return 2;
    case Verdict::FiniteTimeExtinction: return 3;
  }
  return 0;
}

int strength(ImpliedClass c) {
  switch (c) {
    case ImpliedClass::None: return 0;
    case ImpliedClass::Stable: return 1;
    case ImpliedClass::Superstable: return 2;
    case ImpliedClass::FiniteTimeExtinction: return 3;
  }
  return 0;
}

std::uint64_t seed_from_env() {
  const char* raw = std::getenv("ENTRYTIME_SEED");
  if (raw == nullptr || *raw == '\0') return kDefaultPowerSeed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 0);
  if (end == raw || *end != '\0') throw InvalidArgument(std::string("ENTRYTIME_SEED is not an integer: ") + raw);
  return v;
}

void validate_options(const AnalyzeOptions& o) {
  o.search.validate();
  o.thresholds.validate();
  if (o.r_max < 1) throw InvalidArgument("--rmax must be >= 1");
  if (o.r_max < 2 * o.thresholds.plateau_window) {
    throw InvalidArgument("--rmax must be at least twice --plateau-window");
  }
  if (!(o.pazy_a >= 0.0) || !std::isfinite(o.pazy_a)) throw InvalidArgument("--pazy-a must be finite and >= 0");
}

/// Adds every tuning flag shared by analyze and sweep.
void add_tuning_flags(CLI::App* app, AnalyzeOptions& o) {
  app->add_option("--rmax", o.r_max, "Largest entry-time index r")->capture_default_str();
  app->add_option("--time-tol", o.search.time_tol, "Bisection tolerance on t")->capture_default_str();
  app->add_option("--grid-step", o.search.grid_step, "Scan grid step")->capture_default_str();
  app->add_option("--horizon-start", o.search.horizon_start, "Initial search window")->capture_default_str();
  app->add_option("--horizon-cap", o.search.horizon_cap, "Largest time searched")->capture_default_str();
  app->add_option("--norm-floor", o.search.norm_floor, "Norms at or below this count as zero")->capture_default_str();
  app->add_option("--eps-super", o.thresholds.eps_super, "Plateau level for superstability")->capture_default_str();
  app->add_option("--eps-tailsum", o.thresholds.eps_tailsum, "Tail sum for extinction")->capture_default_str();
  app->add_option("--eps-trend", o.thresholds.eps_trend, "Rate elasticity for superstability")->capture_default_str();
  app->add_option("--plateau-window", o.thresholds.plateau_window, "Trailing u_r averaged")->capture_default_str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericsFailure*>(&e) != nullptr) return kExitNumerics;
  if (dynamic_cast<const Error*>(&e) != nullptr) return kExitBadInput;
  return kExitNumerics;
}

/// Spec strings, files, and directories of files, in a fixed order.
std::vector<std::string> collect_specs(const std::vector<std::string>& inputs) {
  std::vector<std::string> specs;
  for (const std::string& in : inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(in)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) specs.push_back(read_model_file(f));
    } else if (fs::is_regular_file(in, ec)) {
      specs.push_back(read_model_file(in));
    } else {
      specs.push_back(in);
    }
  }
  return specs;
}

int run_analyze(const AnalyzeOptions& o, const std::string& model_text, const std::string& model_file,
                const std::string& out_prefix, std::ostream& out, std::ostream& err) {
  try {
    validate_options(o);
    if (model_text.empty() == model_file.empty()) throw InvalidArgument("give exactly one of --model, --model-file");
    const std::string spec = model_file.empty() ? model_text : read_model_file(model_file);
    const SemigroupModel model = build_model_from_spec(spec, o.seed);
    const AnalysisReport report = analyze_model(model, o);

    const fs::path csv_path = out_prefix + ".entry.csv";
    write_atomically(csv_path, report.table.to_csv());
    write_atomically(out_prefix + ".json", report_json(report, csv_path.filename().string()));

    out << to_spec_string(model) << ": " << to_string(report.classification.verdict);
    if (report.classification.verdict == Verdict::Stable) out << " nu=" << format_number(report.classification.nu);
    if (report.classification.verdict == Verdict::FiniteTimeExtinction) {
      out << " k=" << format_number(report.classification.k);
    }
    out << '\n';
    for (const std::string& note : report.consistency) err << "warning: " << note << '\n';
    if (report.inconclusive()) {
      err << "classification is inconclusive\n";
      return kExitInconclusive;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int run_sweep(const AnalyzeOptions& base, const std::vector<std::string>& inputs, const std::string& out_prefix,
              std::ostream& out, std::ostream& err) {
  std::vector<std::string> specs;
  try {
    validate_options(base);
    specs = collect_specs(inputs);
    if (specs.empty()) throw InvalidArgument("--models named no models");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }

  AnalyzeOptions o = base;
  o.skip_pazy = true;
  std::ostringstream csv;
  csv << "model_index,model,row,r,t_r,u_r,status,verdict,nu,k\n";
  int failures = 0;
  int last_failure = kExitOk;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    std::string name = specs[i];
    try {
      const SemigroupModel model = build_model_from_spec(specs[i], o.seed);
      name = to_spec_string(model);
      const AnalysisReport report = analyze_model(model, o);
      const EntryTimeTable& t = report.table;
      for (std::size_t r = 0; r < t.t.size(); ++r) {
        csv << i << ',' << csv_field(name) << ",entry," << r << ',' << format_extended(t.t[r]) << ','
            << (r < t.u.size() ? format_extended(t.u[r]) : "") << ',' << to_string(t.status[r]) << ",,,\n";
      }
      const Classification& c = report.classification;
      csv << i << ',' << csv_field(name) << ",summary,,,," << (report.inconclusive() ? "inconclusive" : "ok") << ','
          << to_string(c.verdict) << ',' << (c.verdict == Verdict::Stable ? format_number(c.nu) : "") << ','
          << (c.verdict == Verdict::FiniteTimeExtinction ? format_number(c.k) : "") << '\n';
      out << name << ": " << to_string(c.verdict) << '\n';
    } catch (const std::exception& e) {
      ++failures;
      last_failure = exit_code_for(e);
      err << "error: " << name << ": " << e.what() << '\n';
      csv << i << ',' << csv_field(name) << ",summary,,,," << csv_field(std::string("error: ") + e.what()) << ",,,\n";
    }
  }
  try {
    write_atomically(out_prefix + ".sweep.csv", csv.str());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return failures == static_cast<int>(specs.size()) ? last_failure : kExitOk;
}

}  // namespace

AnalysisReport analyze_model(const SemigroupModel& model, const AnalyzeOptions& options) {
  validate_options(options);
  AnalysisReport report;
  report.model_spec = to_spec_string(model);
  report.model_kind = model.kind_name();
  report.options = options;

  const NormTrajectory traj = make_trajectory(model);
  report.flags = traj.flags();
  report.eval_error_bound = traj.eval_error_bound();
  report.table = entry_time_table(traj, options.r_max, options.search);
  report.classification = classify(report.table, options.thresholds);
  const std::vector<double> grid = default_growth_grid(report.table);
  report.growth = growth_characteristic(traj, report.table, grid, options.thresholds);
  const std::vector<double> nus = default_nu_grid();
  report.indices = stability_and_extinction_indices(traj, report.table, nus, options.thresholds);

  if (!options.skip_pazy) {
    report.pazy = pazy_criteria(traj, options.pazy_a, PazyGrid{}, pazy_quadrature_spec(), options.search);
    for (const std::string& c : report.pazy->contradictions) report.consistency.push_back(c);
    for (const PazyCriterion& c : report.pazy->criteria) {
      if (c.fires && strength(c.implies) > strength(report.classification.verdict)) {
        report.consistency.push_back("criterion (" + c.name + ") implies " + to_string(c.implies) +
                                     " but the entry times give " + to_string(report.classification.verdict));
      }
    }
  }
  return report;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entry-time analysis of C0-semigroups given by their norm trajectories."};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  AnalyzeOptions analyze_opts;
  std::string model_text;
  std::string model_file;
  std::string analyze_out = "entrytime";
  CLI::App* analyze = app.add_subcommand("analyze", "Entry times, classification, growth and Pazy criteria of one model");
  analyze->add_option("--model", model_text, "Model spec, e.g. \"scalar-decay nu=2\" or \"matrix [[-1,10],[0,-1]]\"");
  analyze->add_option("--model-file", model_file, "File holding one model spec");
  add_tuning_flags(analyze, analyze_opts);
  analyze->add_option("--pazy-a", analyze_opts.pazy_a, "Lower limit of the Pazy integrals (raised to t_0)")
      ->capture_default_str();
  analyze->add_flag("--skip-pazy", analyze_opts.skip_pazy, "Skip the Pazy criteria");
  analyze->add_option("--out", analyze_out, "Output prefix: <out>.json and <out>.entry.csv")->capture_default_str();

  AnalyzeOptions sweep_opts;
  std::vector<std::string> sweep_models;
  std::string sweep_out = "sweep";
  CLI::App* sweep = app.add_subcommand("sweep", "Entry times and verdicts of many models in one long CSV");
  sweep->add_option("--models", sweep_models, "Model specs, model files, or directories of model files")
      ->required();
  add_tuning_flags(sweep, sweep_opts);
  sweep->add_option("--out", sweep_out, "Output prefix: <out>.sweep.csv")->capture_default_str();
  sweep->footer(
      "Columns: model_index,model,row,r,t_r,u_r,status,verdict,nu,k\n"
      "  row = entry: one line per r = 0..rmax+1 (u_r empty on the last), verdict/nu/k empty\n"
      "  row = summary: one line per model; status is ok, inconclusive or the error; nu for Stable, k for extinction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    analyze_opts.seed = seed_from_env();
    sweep_opts.seed = analyze_opts.seed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }

  if (analyze->parsed()) return run_analyze(analyze_opts, model_text, model_file, analyze_out, out, err);
  return run_sweep(sweep_opts, sweep_models, sweep_out, out, err);
}

}  // namespace entrytime::cli
