#ifndef ELASTHEAT_RUNNER_HPP
#define ELASTHEAT_RUNNER_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "elastheat/config.hpp"

namespace elastheat {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

struct RunOptions {
  int jobs = 1;
  std::string out_dir_override;
  bool write_data = true;
};

struct RunResult {
  nlohmann::json report;
  bool all_pass = false;
  std::string report_path;
};

/// Executes the requested suites in dependency order (mesh, assembly,
/// constants, kernel, estimates, green), writes the JSON report and CSV
/// data, and keeps going past per-suite failures so independent suites
/// still report.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& opts = {});

struct CompareResult {
  bool match = true;
  std::vector<std::string> differences;
};

/// Field-wise diff of two run reports with a relative threshold on numbers.
/// Timing subtrees are ignored. Schema mismatches are an error.
CompareResult compare_reports(const nlohmann::json& a, const nlohmann::json& b,
                              double rel_tol = 0.0);

/// Report serialization with the timing subtree removed (the byte-identity
/// comparison form).
std::string report_without_timing(const nlohmann::json& report);

}  // namespace elastheat

#endif
