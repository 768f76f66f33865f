#pragma once

// Scenario files: a space, a list of raw subspace bases and one task. A run
// always yields a report, even when the task fails; the exit code says how.

#include "subrep/serialize.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace subrep {

enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitValidation = 2, kExitNumeric = 3, kExitOutsideBudget = 4 };

struct Scenario {
  AmbientSpace space{1};
  std::vector<Subspace> subspaces;
  bool cyclic = false;
  std::string task;
  io::json params = io::json::object();
  std::uint64_t seed = 0;
  Tolerances tol;
  io::json canonical;  // normalized scenario, hashed into the report

  SubspaceSystem system() const { return SubspaceSystem(space, subspaces, cyclic); }
};

struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

/// Validates against the schema; throws ValidationError naming the field.
Scenario parse_scenario(const io::json& doc, const ScenarioOverrides& over = {});
Scenario load_scenario(const std::filesystem::path& file, const ScenarioOverrides& over = {});

/// JSON schema of scenario files.
io::json scenario_schema();
std::vector<std::string> task_names();

struct RunOutcome {
  int exit_code = kExitOk;
  io::json report;
  std::string csv;  // empty unless the task has a tabular row
};

RunOutcome run_scenario(const Scenario& sc);

/// Parses, runs and captures every failure mode as a report.
RunOutcome run_scenario_file(const std::filesystem::path& file, const ScenarioOverrides& over = {});

/// Report text as written to disk: two-space indented JSON and a newline.
std::string report_text(const io::json& report);

}  // namespace subrep
