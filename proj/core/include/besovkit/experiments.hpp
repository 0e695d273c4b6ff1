#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace besovkit {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` text with `[section]` headers; `#` and `;` start
/// comments. Keys inside a section are stored as `section.key`.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// `section.key`, then the global `key`, then the fallback.
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  /// Comma-separated numbers; `inf` is accepted.
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& fallback) const;
  std::vector<std::string> get_words(const std::string& section, const std::string& key,
                                     const std::vector<std::string>& fallback) const;
  std::uint64_t seed() const;

 private:
  const std::string* find(const std::string& section, const std::string& key) const;
  std::map<std::string, std::string> entries_;
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::string name;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool pass() const;
  const Check* check(const std::string& name) const;
  /// `PASS <name>: check=ok ...` on one line.
  std::string summary() const;
  /// `# key=value` parameter lines, header row, data rows.
  void write_csv(std::ostream& out) const;
};

struct RunOptions {
  bool parallel = false;
  unsigned threads = 1;  // used when parallel

  /// Thread count for --parallel: hardware concurrency capped by BESOVKIT_THREADS.
  static unsigned default_threads();
};

const std::vector<std::string>& experiment_names();
bool is_experiment(const std::string& name);

/// Throws std::invalid_argument for unknown names and ConfigError for bad values.
ExperimentResult run_experiment(const std::string& name, const Config& config,
                                const RunOptions& options = {});

}  // namespace besovkit
