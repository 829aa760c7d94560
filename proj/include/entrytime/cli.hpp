#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "entrytime/classify.hpp"
#include "entrytime/entry_times.hpp"
#include "entrytime/models.hpp"
#include "entrytime/pazy.hpp"

namespace entrytime::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitBadInput = 2,  // SpecError, InvalidArgument, InvalidModel, bad flags
  kExitNumerics = 3,
  kExitInconclusive = 4,
};

struct AnalyzeOptions {
  int r_max = 60;
  SearchConfig search;
  ClassifyThresholds thresholds;
  double pazy_a = 0.0;
  bool skip_pazy = false;
  std::uint64_t seed = kDefaultPowerSeed;
};

struct AnalysisReport {
  std::string model_spec;
  std::string model_kind;
  AnalyzeOptions options;
  TrajectoryFlags flags;
  double eval_error_bound = 0.0;
  EntryTimeTable table;
  Classification classification;
  GrowthEstimate growth;
  StabilityIndices indices;
  std::optional<PazyReport> pazy;
  /// Pazy criteria implying a class stronger than the verdict, or contradicting each other.
  std::vector<std::string> consistency;

  bool inconclusive() const { return classification.inconclusive || flags.is_inconclusive; }
};

/// Runs the whole pipeline on one model.
AnalysisReport analyze_model(const SemigroupModel& model, const AnalyzeOptions& options);

/// The report document with fixed key order; numbers at 12 significant digits, ±inf as strings.
std::string report_json(const AnalysisReport& report, const std::string& csv_name);

/// Writes through a temporary file and a rename.
void write_atomically(const std::filesystem::path& path, const std::string& content);

/// Entry point of the `entrytime` tool. Diagnostics go to `err`.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace entrytime::cli
