#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "besovkit/experiments.hpp"

namespace besovkit::detail {

std::string fmt(double v);
std::string fmt_bool(bool b);

struct Suite {
  const Config& config;
  std::string name;
  RunOptions options;
  ExperimentResult result;

  Suite(const Config& c, std::string n, RunOptions o);

  double num(const std::string& key, double fallback);
  int integer(const std::string& key, int fallback);
  std::vector<double> list(const std::string& key, const std::vector<double>& fallback);
  std::vector<int> ints(const std::string& key, const std::vector<int>& fallback);
  std::vector<std::string> words(const std::string& key, const std::vector<std::string>& fallback);
  /// Config seed mixed with a per-use salt.
  std::uint64_t seed(std::uint64_t salt) const;

  void columns(std::vector<std::string> cols) { result.columns = std::move(cols); }
  void row(std::vector<std::string> r) { result.rows.push_back(std::move(r)); }
  void check(const std::string& name, bool pass, const std::string& detail);
};

/// body(i) for i in [0, n); indices are claimed dynamically, so bodies must
/// write only their own slot. The first exception is rethrown.
template <class F>
void parallel_for(std::size_t n, const RunOptions& opt, F&& body) {
  const unsigned threads = opt.parallel ? std::max(1u, opt.threads) : 1u;
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void run_whitney_invariants(Suite& s);
void run_extension_bounds(Suite& s);
void run_geom_shells(Suite& s);
void run_homogeneity(Suite& s);
void run_modulus_closed_form(Suite& s);
void run_hidr_identity(Suite& s);
void run_gn_check(Suite& s);
void run_trace_embedding(Suite& s);
void run_todo3(Suite& s);
void run_atom_roundtrip(Suite& s);
void run_reexpand(Suite& s);
void run_trace_roundtrip(Suite& s);
void run_chi_profile(Suite& s);
void run_hset_sum(Suite& s);

}  // namespace besovkit::detail
