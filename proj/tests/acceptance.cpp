// Acceptance gate. Runs `subrep suite all` twice at each of 1, 2 and 8
// worker threads, reads criteria 1-10 from the first run's summary and
// checks criterion 11 by comparing every output file byte for byte. The
// verdict lines also go to <scratch-dir>/acceptance.txt.
//
// usage: subrep_acceptance <path-to-subrep> <scratch-dir>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

std::map<std::string, std::string> dir_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) out[e.path().filename().string()] = slurp(e.path());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: subrep_acceptance <subrep> <scratch-dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = argv[2];
  fs::remove_all(work);
  fs::create_directories(work);

  struct Run {
    int threads;
    int rep;
    fs::path dir;
    int code;
  };
  std::vector<Run> runs;
  for (int threads : {1, 2, 8}) {
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = work / ("t" + std::to_string(threads) + "_" + std::to_string(rep));
      const std::string cmd = cli + " suite all --seed 20240611 --threads " + std::to_string(threads) + " --out-dir " +
                              dir.string() + " > " + (dir.string() + ".log") + " 2>&1";
      const int status = std::system(cmd.c_str());
      runs.push_back({threads, rep, dir, WIFEXITED(status) ? WEXITSTATUS(status) : -1});
    }
  }

  bool all_ok = true;
  std::ofstream log(work / "acceptance.txt");
  auto line = [&](bool ok, int id, const std::string& text) {
    char head[32];
    std::snprintf(head, sizeof head, "%s criterion %2d: ", ok ? "PASS" : "FAIL", id);
    std::cout << head << text << "\n";
    log << head << text << "\n";
    all_ok = all_ok && ok;
  };

  // Criteria 1-10 from the reference run.
  std::map<int, std::vector<std::string>> rows;
  std::istringstream summary(slurp(runs.front().dir / "summary.csv"));
  std::string ln;
  std::getline(summary, ln);  // header
  while (std::getline(summary, ln)) {
    const auto f = fields(ln);
    if (f.size() >= 6) rows[std::atoi(f[0].c_str())] = f;
  }
  for (int id = 1; id <= 10; ++id) {
    const auto it = rows.find(id);
    if (it == rows.end()) {
      line(false, id, "missing from summary.csv (suite exit code " + std::to_string(runs.front().code) + ")");
      continue;
    }
    const auto& f = it->second;
    line(f[2] == "true", id, f[1] + " [" + f[3] + " checks, " + f[4] + " failures] " + f[5]);
  }

  // Criterion 11: identical bytes across repeats and thread counts.
  const auto ref = dir_bytes(runs.front().dir);
  bool same = !ref.empty();
  std::string why;
  for (const auto& r : runs) {
    if (r.code != runs.front().code) {
      same = false;
      why += " exit code differs at threads=" + std::to_string(r.threads) + ";";
    }
    if (dir_bytes(r.dir) != ref) {
      same = false;
      why += " output differs at threads=" + std::to_string(r.threads) + " repeat " + std::to_string(r.rep) + ";";
    }
  }
  line(same, 11,
       "determinism: 6 runs of `subrep suite all` (threads 1, 2, 8; two each), " + std::to_string(ref.size()) +
           " files compared" + (same ? ", byte-identical" : ":" + why));

  return all_ok ? 0 : 1;
}
