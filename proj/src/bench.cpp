#include "regret_pricer/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "regret_pricer/errors.hpp"

namespace regret_pricer::bench {

std::uint64_t CounterRng::bits(std::uint64_t n) const {
  std::uint64_t z = seed_ + (n + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t n) const {
  return static_cast<double>(bits(n) >> 11) * 0x1.0p-53;
}

void GeneratorParams::validate() const {
  if (k <= 0) throw InvalidInput("k must be positive");
  if (!std::isfinite(x_min_lower) || !std::isfinite(x_max_lower) || !std::isfinite(delta)) {
    throw InvalidInput("generator parameters must be finite");
  }
  if (x_min_lower < 0.0 || x_min_lower > x_max_lower) {
    throw InvalidInput("need 0 <= x_min_lower <= x_max_lower");
  }
  if (delta < 0.0) throw InvalidInput("delta must be nonnegative");
}

IntervalUncertainty generate_instance(const GeneratorParams& p) {
  p.validate();
  const CounterRng rng(p.seed);
  Matrix lo(p.k, p.k), hi(p.k, p.k);
  for (int i = 0; i < p.k; ++i) {
    for (int j = 0; j < p.k; ++j) {
      const auto e = static_cast<std::uint64_t>(i) * p.k + j;
      lo(i, j) = p.x_min_lower + (p.x_max_lower - p.x_min_lower) * rng.uniform(2 * e);
      hi(i, j) = lo(i, j) + p.delta * rng.uniform(2 * e + 1);
    }
  }
  return IntervalUncertainty(ValuationMatrix(std::move(lo)), ValuationMatrix(std::move(hi)));
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table{
      {"table1-row1", 10.0, 500.0, 30.0},
      {"table1-row2", 10.0, 500.0, 50.0},
      {"table1-row3", 100.0, 500.0, 50.0},
      {"table1-row4", 100.0, 1000.0, 50.0},
  };
  return table;
}

std::optional<Preset> find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

namespace {

template <typename T>
bool nondecreasing(const std::vector<T>& v) {
  return std::is_sorted(v.begin(), v.end());
}

RunRecord run_one(const ExperimentConfig& c, int k, std::uint64_t seed) {
  RunRecord r;
  r.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    GeneratorParams p{c.x_min_lower, c.x_max_lower, c.delta, k, seed};
    const auto s = generate_instance(p);
    robust::RobustOptions opt = c.robust;
    opt.log = nullptr;
    const auto sol = robust::solve_robust(s, opt);
    r.completed = true;
    r.status = robust::to_string(sol.status);
    r.regret = sol.regret;
    r.lower_bound = sol.lower_bound;
    r.revenue = sol.solution.revenue;
    r.welfare = sol.solution.welfare;
    r.sold = sol.solution.sold_count;
    r.cuts = static_cast<int>(sol.cuts.size());
    r.iterations = sol.iterations;
    r.lb_monotone = nondecreasing(sol.lb_trace);
    std::vector<double> ub = sol.ub_trace;
    std::reverse(ub.begin(), ub.end());
    r.ub_monotone = nondecreasing(ub);
  } catch (const std::exception& e) {
    r.completed = false;
    r.status = "error";
    r.error = e.what();
  }
  r.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  if (config.reps < 1) throw InvalidInput("reps must be at least 1");
  for (int k : config.k_list) {
    GeneratorParams{config.x_min_lower, config.x_max_lower, config.delta, k, config.seed}.validate();
  }

  struct Task {
    std::size_t row;
    int k;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t row = 0; row < config.k_list.size(); ++row) {
    for (int r = 0; r < config.reps; ++r) {
      tasks.push_back({row, config.k_list[row], config.seed + static_cast<std::uint64_t>(r)});
    }
  }
  std::vector<RunRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      records[t] = run_one(config, tasks[t].k, tasks[t].seed);
    }
  };
  const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(tasks.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<ExperimentRow> rows(config.k_list.size());
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    rows[tasks[t].row].runs.push_back(records[t]);
  }
  for (std::size_t row = 0; row < rows.size(); ++row) {
    auto& out = rows[row];
    out.k = config.k_list[row];
    std::sort(out.runs.begin(), out.runs.end(),
              [](const RunRecord& a, const RunRecord& b) { return a.seed < b.seed; });
    for (const auto& r : out.runs) {
      ++out.status_counts[r.status];
      if (!r.completed) continue;
      ++out.reps;
      out.optimal_regret += r.regret;
      out.robust_revenue += r.revenue;
      out.robust_welfare += r.welfare;
      out.sold_items += r.sold;
      out.time_s += r.time_s;
    }
    if (out.reps > 0) {
      const double n = out.reps;
      out.optimal_regret /= n;
      out.robust_revenue /= n;
      out.robust_welfare /= n;
      out.sold_items /= n;
      out.time_s /= n;
    }
  }
  return rows;
}

namespace {

std::string fixed2(double v) {
  // Avoid printing -0.00 for tiny negative noise.
  if (std::abs(v) < 0.005) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

constexpr const char* kHeader = "K,optimal_regret,robust_revenue,robust_welfare,sold_items,time_s,reps";

}  // namespace

std::string write_csv(const std::vector<ExperimentRow>& rows, bool include_timing) {
  std::string out = kHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.k) + ',' + fixed2(r.optimal_regret) + ',' + fixed2(r.robust_revenue) +
           ',' + fixed2(r.robust_welfare) + ',' + fixed2(r.sold_items) + ',' +
           fixed2(include_timing ? r.time_s : 0.0) + ',' + std::to_string(r.reps) + '\n';
  }
  return out;
}

std::vector<ExperimentRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw InvalidInput("unexpected CSV header");
  std::vector<ExperimentRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (cells.size() != 7) throw InvalidInput("CSV row needs 7 fields: " + line);
    ExperimentRow r;
    try {
      r.k = std::stoi(cells[0]);
      r.optimal_regret = std::stod(cells[1]);
      r.robust_revenue = std::stod(cells[2]);
      r.robust_welfare = std::stod(cells[3]);
      r.sold_items = std::stod(cells[4]);
      r.time_s = std::stod(cells[5]);
      r.reps = std::stoi(cells[6]);
    } catch (const std::logic_error&) {
      throw InvalidInput("malformed CSV row: " + line);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace regret_pricer::bench
