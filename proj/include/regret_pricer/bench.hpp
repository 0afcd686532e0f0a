#pragma once

// Random interval instances and the averaged experiment table.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regret_pricer/core.hpp"
#include "regret_pricer/robust.hpp"

namespace regret_pricer::bench {

// SplitMix64 addressed by counter: draw n of a stream seeded with s is
// mix(s + (n + 1) * 0x9E3779B97F4A7C15), i.e. the n-th output (0-based) of
// the reference SplitMix64 generator started at state s. Uniforms on [0, 1)
// take the top 53 bits: (z >> 11) * 2^-53.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t bits(std::uint64_t n) const;
  double uniform(std::uint64_t n) const;

 private:
  std::uint64_t seed_;
};

struct GeneratorParams {
  double x_min_lower = 10.0;
  double x_max_lower = 500.0;
  double delta = 30.0;
  int k = 5;
  std::uint64_t seed = 1;

  void validate() const;
};

// Entry e = i * k + j uses draw 2e for the lower bound,
// lower = x_min + (x_max - x_min) * U, and draw 2e + 1 for the width,
// upper = lower + delta * U.
IntervalUncertainty generate_instance(const GeneratorParams& p);

struct Preset {
  std::string name;
  double x_min_lower;
  double x_max_lower;
  double delta;
};

// table1-row1 .. table1-row4.
const std::vector<Preset>& presets();
std::optional<Preset> find_preset(const std::string& name);

struct RunRecord {
  std::uint64_t seed = 0;
  bool completed = false;
  std::string status;  // robust status, or "error"
  std::string error;
  double regret = 0.0;
  double lower_bound = 0.0;
  double revenue = 0.0;
  double welfare = 0.0;
  int sold = 0;
  int cuts = 0;
  int iterations = 0;
  double time_s = 0.0;
  bool lb_monotone = true;
  bool ub_monotone = true;
};

struct ExperimentRow {
  int k = 0;
  double optimal_regret = 0.0;
  double robust_revenue = 0.0;
  double robust_welfare = 0.0;
  double sold_items = 0.0;
  double time_s = 0.0;
  int reps = 0;  // completed runs the means are taken over
  std::map<std::string, int> status_counts;
  std::vector<RunRecord> runs;  // sorted by seed
};

struct ExperimentConfig {
  double x_min_lower = 10.0;
  double x_max_lower = 500.0;
  double delta = 30.0;
  std::vector<int> k_list;
  int reps = 10;
  std::uint64_t seed = 1;  // run r uses seed + r
  robust::RobustOptions robust;
  int jobs = 1;
};

// One row per k in k_list order. Failures are recorded per run and never
// abort the sweep; means run over completed runs in seed order.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

// Header K,optimal_regret,robust_revenue,robust_welfare,sold_items,time_s,reps
// and two decimals per value. Without timing the time column is written as
// 0.00 so the file depends on the inputs only.
std::string write_csv(const std::vector<ExperimentRow>& rows, bool include_timing = true);

// Inverse of write_csv for the table columns (run details are not stored).
std::vector<ExperimentRow> parse_csv(const std::string& text);

}  // namespace regret_pricer::bench
