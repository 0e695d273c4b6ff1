#include "besovkit/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "suites.hpp"

namespace besovkit {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "inf" || t == "infinity" || t == "+inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used == t.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& origin) {
  Config cfg;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.set(section.empty() ? key : section + "." + key, trim(line.substr(eq + 1)));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse(in, path);
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

const std::string* Config::find(const std::string& section, const std::string& key) const {
  if (!section.empty()) {
    const auto it = entries_.find(section + "." + key);
    if (it != entries_.end()) return &it->second;
  }
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
  const auto* v = find(section, key);
  return v ? *v : fallback;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  const auto* v = find(section, key);
  return v ? parse_number(*v, key) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
  const auto* v = find(section, key);
  if (!v) return fallback;
  const double d = parse_number(*v, key);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError("config: '" + key + "' expects an integer");
  return static_cast<int>(d);
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key,
                                     const std::vector<double>& fallback) const {
  const auto* v = find(section, key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : split_commas(*v)) out.push_back(parse_number(item, key));
  if (out.empty()) throw ConfigError("config: '" + key + "' is an empty list");
  return out;
}

std::vector<std::string> Config::get_words(const std::string& section, const std::string& key,
                                           const std::vector<std::string>& fallback) const {
  const auto* v = find(section, key);
  if (!v) return fallback;
  auto out = split_commas(*v);
  if (out.empty()) throw ConfigError("config: '" + key + "' is an empty list");
  return out;
}

std::uint64_t Config::seed() const {
  const auto* v = find("", "seed");
  if (!v) return 1;
  const std::string t = trim(*v);
  try {
    std::size_t used = 0;
    const auto s = std::stoull(t, &used);
    if (used == t.size() && t.front() != '-') return s;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: 'seed' expects a nonnegative integer, got '" + *v + "'");
}

// ---------------------------------------------------------------------------

bool ExperimentResult::pass() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* ExperimentResult::check(const std::string& n) const {
  for (const auto& c : checks) {
    if (c.name == n) return &c;
  }
  return nullptr;
}

std::string ExperimentResult::summary() const {
  std::string out = (pass() ? "PASS " : "FAIL ") + name + ":";
  for (const auto& c : checks) out += " " + c.name + "=" + (c.pass ? "ok" : "FAILED");
  return out;
}

void ExperimentResult::write_csv(std::ostream& out) const {
  out << "# experiment=" << name << '\n';
  for (const auto& [k, v] : parameters) out << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
  for (const auto& c : checks) {
    out << "# check " << c.name << '=' << (c.pass ? "pass" : "fail") << ' ' << c.detail << '\n';
  }
}

unsigned RunOptions::default_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BESOVKIT_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

// ---------------------------------------------------------------------------

namespace detail {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_bool(bool b) { return b ? "1" : "0"; }

Suite::Suite(const Config& c, std::string n, RunOptions o) : config(c), name(std::move(n)), options(o) {
  result.name = name;
  result.parameters.emplace_back("seed", std::to_string(config.seed()));
}

double Suite::num(const std::string& key, double fallback) {
  const double v = config.get_double(name, key, fallback);
  result.parameters.emplace_back(key, fmt(v));
  return v;
}

int Suite::integer(const std::string& key, int fallback) {
  const int v = config.get_int(name, key, fallback);
  result.parameters.emplace_back(key, std::to_string(v));
  return v;
}

std::vector<double> Suite::list(const std::string& key, const std::vector<double>& fallback) {
  const auto v = config.get_list(name, key, fallback);
  std::string text;
  for (double x : v) text += (text.empty() ? "" : ";") + fmt(x);
  result.parameters.emplace_back(key, text);
  return v;
}

std::vector<int> Suite::ints(const std::string& key, const std::vector<int>& fallback) {
  std::vector<double> fb(fallback.begin(), fallback.end());
  const auto v = config.get_list(name, key, fb);
  std::vector<int> out;
  std::string text;
  for (double x : v) {
    if (x != std::floor(x)) throw ConfigError("config: '" + key + "' expects integers");
    out.push_back(static_cast<int>(x));
    text += (text.empty() ? "" : ";") + std::to_string(out.back());
  }
  result.parameters.emplace_back(key, text);
  return out;
}

std::vector<std::string> Suite::words(const std::string& key, const std::vector<std::string>& fallback) {
  const auto v = config.get_words(name, key, fallback);
  std::string text;
  for (const auto& x : v) text += (text.empty() ? "" : ";") + x;
  result.parameters.emplace_back(key, text);
  return v;
}

std::uint64_t Suite::seed(std::uint64_t salt) const {
  // splitmix64 step so nearby salts give unrelated streams
  std::uint64_t z = config.seed() + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void Suite::check(const std::string& n, bool pass, const std::string& detail) {
  result.checks.push_back({n, pass, detail});
}

}  // namespace detail

// ---------------------------------------------------------------------------

namespace {

using Runner = void (*)(detail::Suite&);

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> r = {
      {"whitney-invariants", detail::run_whitney_invariants},
      {"extension-bounds", detail::run_extension_bounds},
      {"homogeneity", detail::run_homogeneity},
      {"modulus-closed-form", detail::run_modulus_closed_form},
      {"hidr-identity", detail::run_hidr_identity},
      {"todo3", detail::run_todo3},
      {"trace-embedding", detail::run_trace_embedding},
      {"atom-roundtrip", detail::run_atom_roundtrip},
      {"reexpand", detail::run_reexpand},
      {"trace-roundtrip", detail::run_trace_roundtrip},
      {"chi-profile", detail::run_chi_profile},
      {"hset-sum", detail::run_hset_sum},
      {"geom-shells", detail::run_geom_shells},
      {"gn-check", detail::run_gn_check},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : registry()) n.push_back(k);
    return n;
  }();
  return names;
}

bool is_experiment(const std::string& name) {
  const auto& n = experiment_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

ExperimentResult run_experiment(const std::string& name, const Config& config, const RunOptions& options) {
  for (const auto& [n, runner] : registry()) {
    if (n != name) continue;
    detail::Suite suite(config, name, options);
    const auto t0 = std::chrono::steady_clock::now();
    runner(suite);
    suite.result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::move(suite.result);
  }
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

}  // namespace besovkit
