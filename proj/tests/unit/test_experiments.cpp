#include <cmath>
#include <sstream>

#include "besovkit/experiments.hpp"
#include "doctest.h"

using namespace besovkit;

namespace {

Config parse(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in, "test.cfg");
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream out;
  r.write_csv(out);
  return out.str();
}

}  // namespace

TEST_CASE("config sections and lookup") {
  const auto cfg = parse(
      "# global\n"
      "seed = 42\n"
      "points = 10   ; trailing comment\n"
      "[todo3]\n"
      "arrays = 5\n"
      "alpha = 1, 2, inf\n"
      "domains = square, lshape\n");
  CHECK(cfg.seed() == 42);
  CHECK(cfg.get_int("todo3", "arrays", 0) == 5);
  CHECK(cfg.get_int("todo3", "points", 0) == 10);  // falls back to the global key
  CHECK(cfg.get_int("other", "arrays", 7) == 7);   // section keys stay private
  const auto alpha = cfg.get_list("todo3", "alpha", {});
  REQUIRE(alpha.size() == 3);
  CHECK(alpha[1] == 2.0);
  CHECK(std::isinf(alpha[2]));
  CHECK(cfg.get_words("todo3", "domains", {}) == std::vector<std::string>{"square", "lshape"});
  CHECK(Config{}.seed() == 1);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse("[open\n"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("a = 1\nnot a pair\n"), "test.cfg:2: expected key = value", ConfigError);
  CHECK_THROWS_AS(parse("= 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("x = abc\n").get_double("", "x", 0), ConfigError);
  CHECK_THROWS_AS(parse("x = 1.5\n").get_int("", "x", 0), ConfigError);
  CHECK_THROWS_AS(parse("seed = -3\n").seed(), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/besovkit.cfg"), ConfigError);
}

TEST_CASE("experiment registry") {
  const auto& names = experiment_names();
  CHECK(names.size() == 14);
  for (const char* n : {"whitney-invariants", "extension-bounds", "homogeneity", "hidr-identity", "todo3",
                        "atom-roundtrip", "reexpand", "trace-roundtrip", "chi-profile", "hset-sum",
                        "geom-shells", "gn-check"}) {
    CHECK(is_experiment(n));
  }
  CHECK_FALSE(is_experiment("nope"));
  CHECK_THROWS_AS(run_experiment("nope", Config{}, {}), std::invalid_argument);
}

TEST_CASE("same seed gives byte-identical CSV") {
  Config a;
  a.set("seed", "7");
  a.set("todo3.arrays", "12");
  const auto r1 = run_experiment("todo3", a, {});
  const auto r2 = run_experiment("todo3", a, {});
  CHECK(r1.pass());
  CHECK(csv_of(r1) == csv_of(r2));
  CHECK(csv_of(r1).rfind("# experiment=todo3\n# seed=7\n", 0) == 0);

  RunOptions par;
  par.parallel = true;
  par.threads = 3;
  CHECK(csv_of(run_experiment("todo3", a, par)) == csv_of(r1));

  Config b = a;
  b.set("seed", "8");
  CHECK(csv_of(run_experiment("todo3", b, {})) != csv_of(r1));
}

TEST_CASE("parallel runs match sequential runs") {
  Config cfg;
  cfg.set("trace-embedding.arrays", "40");
  RunOptions par;
  par.parallel = true;
  par.threads = 4;
  CHECK(csv_of(run_experiment("trace-embedding", cfg, {})) == csv_of(run_experiment("trace-embedding", cfg, par)));
}

TEST_CASE("failing thresholds are reported") {
  Config cfg;
  cfg.set("hset-sum.closed_form_tolerance", "-1");
  const auto r = run_experiment("hset-sum", cfg, {});
  CHECK_FALSE(r.pass());
  REQUIRE(r.check("closed_form") != nullptr);
  CHECK_FALSE(r.check("closed_form")->pass);
  CHECK(r.check("classification")->pass);
  CHECK(r.summary().rfind("FAIL hset-sum:", 0) == 0);
  CHECK_THROWS_AS(run_experiment("chi-profile", parse("[chi-profile]\nsigma = x\n"), {}), ConfigError);
}
