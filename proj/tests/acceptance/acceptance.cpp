// One PASS/FAIL line per acceptance criterion. Thresholds are the suite
// defaults; --expect-fail lists criteria whose failure is already analysed.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "besovkit/experiments.hpp"

using namespace besovkit;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::string suite;
  std::vector<std::string> checks;  // empty: every check of the suite
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c = {
      {1, "Whitney invariants", "whitney-invariants", {"sandwich", "disjoint", "overlap"}},
      {2, "partition of unity", "whitney-invariants", {"partition", "support"}},
      {3, "extension bounds", "extension-bounds", {}},
      {4, "homogeneity under dilation", "homogeneity", {}},
      {5, "modulus of an indicator, closed form", "modulus-closed-form", {}},
      {6, "difference/spline identity", "hidr-identity", {}},
      {7, "triangular-array inequality", "todo3", {}},
      {8, "trace coefficient embedding", "trace-embedding", {}},
      {9, "atom round trip", "atom-roundtrip", {}},
      {10, "re-expansion into smooth atoms", "reexpand", {}},
      {11, "trace round trip", "trace-roundtrip", {}},
      {12, "characteristic function sharpness", "chi-profile", {}},
      {13, "h-set condition", "hset-sum", {}},
      {14, "boundary shells", "geom-shells", {}},
  };
  return c;
}

std::set<int> parse_ids(const std::string& text) {
  std::set<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(std::stoi(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria 1-14"};
  std::string only;
  std::string expect_fail;
  std::string csv_dir;
  long long seed = -1;
  bool parallel = false;
  app.add_option("--only", only, "comma list of criteria to run");
  app.add_option("--expect-fail", expect_fail, "comma list of criteria known to fail");
  app.add_option("--csv-dir", csv_dir, "write each suite's CSV into this directory");
  app.add_option("--seed", seed, "config seed (default 1)");
  app.add_flag("--parallel", parallel, "parallel suites");
  CLI11_PARSE(app, argc, argv);

  const std::set<int> selected = parse_ids(only);
  const std::set<int> expected = parse_ids(expect_fail);
  Config cfg;
  if (seed >= 0) cfg.set("seed", std::to_string(seed));
  RunOptions opt;
  opt.parallel = parallel;
  opt.threads = RunOptions::default_threads();

  std::map<std::string, ExperimentResult> results;
  int failed = 0;
  int unexpected = 0;
  int fixed = 0;
  for (const auto& c : criteria()) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    if (!results.count(c.suite)) {
      try {
        results[c.suite] = run_experiment(c.suite, cfg, opt);
      } catch (const std::exception& e) {
        ExperimentResult r;
        r.name = c.suite;
        r.checks.push_back({"error", false, e.what()});
        results[c.suite] = r;
      }
      if (!csv_dir.empty()) {
        std::ofstream out(csv_dir + "/" + c.suite + ".csv");
        results[c.suite].write_csv(out);
      }
    }
    const auto& r = results[c.suite];
    bool pass = true;
    std::string detail;
    for (const auto& chk : r.checks) {
      if (!c.checks.empty() && std::find(c.checks.begin(), c.checks.end(), chk.name) == c.checks.end()) {
        continue;
      }
      pass = pass && chk.pass;
      detail += (detail.empty() ? "" : "; ") + chk.name + (chk.pass ? " ok" : " FAILED") + " [" + chk.detail + "]";
    }
    if (r.checks.empty()) pass = false;
    char head[96];
    std::snprintf(head, sizeof head, "criterion %2d %s  %s (%s, %.1f s)", c.id, pass ? "PASS" : "FAIL",
                  c.title.c_str(), c.suite.c_str(), r.seconds);
    std::cout << head << ": " << detail;
    if (!pass && expected.count(c.id)) std::cout << "  <- known failure";
    if (pass && expected.count(c.id)) std::cout << "  <- listed as known failure but passed";
    std::cout << '\n' << std::flush;
    if (!pass) {
      ++failed;
      if (!expected.count(c.id)) ++unexpected;
    } else if (expected.count(c.id)) {
      ++fixed;
    }
  }
  std::cout << "summary: " << failed << " failing criteria, " << unexpected << " not listed as known failures";
  if (fixed) std::cout << ", " << fixed << " listed failures now pass";
  std::cout << '\n';
  return unexpected == 0 && fixed == 0 ? 0 : 1;
}
