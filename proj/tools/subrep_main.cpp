// subrep: run scenario files and bundled check suites.

#include "subrep/parallel.hpp"
#include "subrep/scenario.hpp"
#include "subrep/suite.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

bool write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) return false;
  f << text;
  return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace subrep;

  CLI::App app{"Systems of subspaces: decompositions, margins, stability checks"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  double tol = 0.0;
  int threads = 0;
  auto add_common = [&](CLI::App* sub, bool with_tol) {
    sub->add_option("--seed", seed, "Override the scenario or suite seed");
    if (with_tol) sub->add_option("--tol", tol, "Override the solver tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--threads", threads, "Worker threads (default: SUBREP_THREADS, else 1)")->check(CLI::NonNegativeNumber);
  };

  std::string scenario_file, out_file;
  CLI::App* run = app.add_subcommand("run", "Run one scenario file");
  run->add_option("file", scenario_file, "Scenario JSON")->required();
  run->add_option("--out", out_file, "Report path (default: stdout)");
  add_common(run, true);

  std::string suite_name, out_dir;
  CLI::App* suite = app.add_subcommand("suite", "Run a bundled check suite");
  suite->add_option("name", suite_name, "decompose | criteria | stability | cconv | all")->required();
  suite->add_option("--out-dir", out_dir, "Directory for summary.csv, tables and suite.json")->required();
  add_common(suite, false);

  app.add_subcommand("schema", "Print the scenario JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }
  if (threads > 0) set_default_threads(threads);

  try {
    if (app.got_subcommand("schema")) {
      std::cout << scenario_schema().dump(2) << "\n";
      return kExitOk;
    }

    if (run->parsed()) {
      ScenarioOverrides over;
      if (run->count("--seed")) over.seed = seed;
      if (run->count("--tol")) over.tol = tol;
      const RunOutcome res = run_scenario_file(scenario_file, over);
      const std::string text = report_text(res.report);
      if (out_file.empty()) {
        std::cout << text;
        if (!res.csv.empty()) std::cout << res.csv;
      } else {
        if (!write_text(out_file, text)) {
          std::cerr << "subrep: cannot write " << out_file << "\n";
          return kExitValidation;
        }
        if (!res.csv.empty()) {
          const std::filesystem::path csv = std::filesystem::path(out_file).replace_extension(".csv");
          if (!write_text(csv, res.csv)) {
            std::cerr << "subrep: cannot write " << csv.string() << "\n";
            return kExitValidation;
          }
        }
      }
      if (res.report.contains("error")) std::cerr << "subrep: " << res.report["error"]["message"].get<std::string>() << "\n";
      return res.exit_code;
    }

    const std::uint64_t s = suite->count("--seed") ? seed : kDefaultSuiteSeed;
    suite_checks(suite_name);  // reject unknown names before any work
    // Fail on an unusable output directory before the long run.
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !write_text(std::filesystem::path(out_dir) / "summary.csv", "")) {
      std::cerr << "subrep: cannot write into " << out_dir << "\n";
      return kExitValidation;
    }
    const SuiteResult result = run_suite(suite_name, s);
    write_suite(result, out_dir);
    for (const auto& c : result.checks)
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.id << " " << c.title << ": " << c.detail << "\n";
    return result.passed() ? kExitOk : kExitInternal;
  } catch (const ValidationError& e) {
    std::cerr << "subrep: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericError& e) {
    std::cerr << "subrep: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const BudgetError& e) {
    std::cerr << "subrep: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "subrep: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
