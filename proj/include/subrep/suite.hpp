#pragma once

// Bundled property checks over seeded random instances. `subrep suite` runs
// them and writes one CSV summary, one CSV table per check and a JSON report.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace subrep {

struct CheckResult {
  int id = 0;
  std::string slug;   // file stem of the detail table
  std::string title;
  bool passed = false;
  int checks = 0;
  int failures = 0;
  std::string detail;
  std::string header;              // CSV header of the detail table
  std::vector<std::string> rows;   // CSV rows
};

struct SuiteResult {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool passed() const;
};

inline constexpr std::uint64_t kDefaultSuiteSeed = 20240611;

/// decompose, criteria, stability, cconv, all.
std::vector<std::string> suite_names();
/// Ids of the checks a suite runs; throws ValidationError for unknown names.
std::vector<int> suite_checks(const std::string& name);

CheckResult run_check(int id, std::uint64_t seed);
SuiteResult run_suite(const std::string& name, std::uint64_t seed = kDefaultSuiteSeed);

/// Writes summary.csv, <slug>.csv per check and suite.json into `dir`
/// (created if missing). Throws ValidationError when `dir` is not writable.
void write_suite(const SuiteResult& result, const std::filesystem::path& dir);

}  // namespace subrep
