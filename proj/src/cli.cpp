#include "regret_pricer/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "regret_pricer/bench.hpp"
#include "regret_pricer/det.hpp"
#include "regret_pricer/errors.hpp"
#include "regret_pricer/heuristic.hpp"
#include "regret_pricer/instance_io.hpp"
#include "regret_pricer/oracle.hpp"
#include "regret_pricer/robust.hpp"

namespace regret_pricer::cli {
namespace {

using io::json;

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("REGRET_PRICER_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::logic_error&) {
    }
    throw InvalidInput(std::string("REGRET_PRICER_SEED is not an unsigned integer: ") + env);
  }
  return 1;
}

std::vector<int> parse_k_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string cell; std::getline(ss, cell, ',');) {
    if (cell.empty()) continue;
    try {
      std::size_t used = 0;
      const int k = std::stoi(cell, &used);
      if (used != cell.size() || k <= 0) throw std::invalid_argument(cell);
      out.push_back(k);
    } catch (const std::logic_error&) {
      throw InvalidInput("--k-list entries must be positive integers, got '" + cell + "'");
    }
  }
  return out;
}

// ---- gen ----

struct GenArgs {
  int k = 0;
  double xmin = 10.0;
  double xmax = 500.0;
  double delta = 30.0;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
};

int cmd_gen(const GenArgs& a) {
  bench::GeneratorParams p{a.xmin, a.xmax, a.delta, a.k, resolve_seed(a.seed)};
  io::write_file(a.out, io::dump(io::instance_json(bench::generate_instance(p))));
  return kOk;
}

// ---- solve ----

struct SolveArgs {
  std::string instance;
  std::string mode = "robust";
  double eps = robust::kDefaultGap;
  double time_limit = 120.0;
  int max_iterations = 200;
  std::string scenario;
  std::string out = "-";
  std::string dump_model;
  bool verbose = false;
  bool no_timing = false;
};

json layout_json(const InstanceLayout& layout) {
  return {{"buyer_origin", layout.buyer_origin}, {"item_origin", layout.item_origin}};
}

json solution_json(const PricingSolution& s, const InstanceLayout& layout) {
  json pairs = json::array();
  for (const auto& [i, j] : s.allocation.pairs()) pairs.push_back({i, j});
  return {{"allocation", pairs},
          {"prices", io::number_array(s.prices)},
          {"utilities", io::number_array(s.utilities)},
          {"revenue", io::number(s.revenue)},
          {"welfare", io::number(s.welfare)},
          {"sold", count_sold(s.allocation, &layout)}};
}

// Point valuations for det/heuristic: the instance itself, or the chosen
// bound / external file for interval instances.
ValuationMatrix pick_scenario(const NormalizedInstance& inst, const RawInstance& raw,
                              const std::string& scenario, const std::string& mode) {
  if (!inst.is_interval()) {
    if (!scenario.empty() && scenario != "lower" && scenario != "upper") {
      throw InvalidInput("--scenario is only meaningful for interval instances");
    }
    return std::get<ValuationMatrix>(inst.data);
  }
  const auto& s = std::get<IntervalUncertainty>(inst.data);
  if (scenario.empty()) {
    throw InvalidInput("mode " + mode +
                       " needs a point scenario for an interval instance: pass --scenario "
                       "lower|upper|<file>");
  }
  if (scenario == "lower") return s.lower();
  if (scenario == "upper") return s.upper();
  RawInstance other = io::parse_instance(io::load_json(scenario));
  if (other.upper) throw InvalidInput(scenario + " must be a deterministic instance");
  if (other.n_buyers != raw.n_buyers || other.m_items != raw.m_items ||
      other.demands != raw.demands) {
    throw InvalidInput(scenario + " does not match the instance dimensions");
  }
  const auto norm = normalize_instance(other);
  const auto& x = std::get<ValuationMatrix>(norm.data);
  for (int i = 0; i < x.k(); ++i) {
    for (int j = 0; j < x.k(); ++j) {
      if (x(i, j) < s.lower()(i, j) - kFeasibilityTol || x(i, j) > s.upper()(i, j) + kFeasibilityTol) {
        throw InvalidInput(scenario + " lies outside the interval bounds at (" + std::to_string(i) +
                           "," + std::to_string(j) + ")");
      }
    }
  }
  return x;
}

IntervalUncertainty as_interval(const NormalizedInstance& inst) {
  if (inst.is_interval()) return std::get<IntervalUncertainty>(inst.data);
  return IntervalUncertainty::degenerate(std::get<ValuationMatrix>(inst.data));
}

int cmd_solve(const SolveArgs& a) {
  const RawInstance raw = io::parse_instance(io::load_json(a.instance));
  const NormalizedInstance inst = normalize_instance(raw);
  if (a.eps < 0.0) throw InvalidInput("--eps must be nonnegative");
  if (a.time_limit <= 0.0) throw InvalidInput("--time-limit must be positive");

  json result;
  result["mode"] = a.mode;
  result["k"] = inst.k();
  result["layout"] = layout_json(inst.layout);
  std::optional<double> regret;
  std::string status;
  bool limit_hit = false;
  PricingSolution solution;
  const auto start = std::chrono::steady_clock::now();

  if (a.mode == "robust" || a.mode == "oracle") {
    const IntervalUncertainty s = as_interval(inst);
    robust::RobustSolution rs;
    if (a.mode == "robust") {
      robust::RobustOptions opt;
      opt.gap = a.eps;
      opt.max_iterations = a.max_iterations;
      opt.time_limit = std::chrono::duration<double>(a.time_limit);
      if (a.verbose) opt.log = &std::cerr;
      rs = robust::solve_robust(s, opt);
      if (!a.dump_model.empty()) {
        io::write_file(a.dump_model, robust::build_master(s, rs.cuts).model.to_text());
      }
    } else {
      rs = oracle::brute_force_robust(s);
    }
    solution = rs.solution;
    regret = rs.regret;
    status = robust::to_string(rs.status);
    limit_hit = rs.status != robust::RobustStatus::optimal;
    result["reference"] = "lower";
    result["solution"] = solution_json(solution, inst.layout);
    result["regret"] = io::number(rs.regret);
    result["lower_bound"] = io::number(rs.lower_bound);
    result["lb_trace"] = io::number_array(rs.lb_trace);
    result["ub_trace"] = io::number_array(rs.ub_trace);
    result["cuts"] = rs.cuts.size();
    result["iterations"] = rs.iterations;
  } else if (a.mode == "det" || a.mode == "heuristic") {
    const ValuationMatrix x = pick_scenario(inst, raw, a.scenario, a.mode);
    if (a.mode == "det") {
      det::DetOptions opt;
      opt.time_limit = std::chrono::duration<double>(a.time_limit);
      if (!a.dump_model.empty()) {
        io::write_file(a.dump_model, det::build_deterministic_milp(x).model.to_text());
      }
      const auto d = det::solve_deterministic(x, opt);
      solution = d.solution;
      status = milp::to_string(d.status);
      limit_hit = d.status != milp::SolveStatus::optimal;
      result["bound"] = io::number(d.bound);
      result["nodes"] = d.nodes;
    } else {
      const auto h = heuristic::heuristic_solve(x);
      solution = h.solution;
      status = heuristic::to_string(h.status);
      limit_hit = h.status != heuristic::HeuristicStatus::converged;
      result["passes"] = h.passes;
      result["removed_items"] = h.removed_items;
    }
    result["reference"] = inst.is_interval() ? a.scenario : std::string("valuations");
    result["solution"] = solution_json(solution, inst.layout);
  } else {
    throw InvalidInput("--mode must be robust, det, heuristic or oracle");
  }
  result["status"] = status;
  if (!a.no_timing) {
    result["time_s"] =
        io::number(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }

  io::write_file(a.out, io::dump(result));
  std::ostream& summary = a.out == "-" ? std::cerr : std::cout;
  summary << "mode=" << a.mode << " value=" << fmt9(solution.revenue)
          << " regret=" << (regret ? fmt9(*regret) : std::string("n/a"))
          << " sold=" << count_sold(solution.allocation, &inst.layout) << '\n';
  if (limit_hit) {
    std::cerr << "solver stopped with status " << status << '\n';
    return kSolverLimit;
  }
  return kOk;
}

// ---- verify ----

struct VerifyArgs {
  std::string instance;
  std::string result;
  double eps = robust::kDefaultGap;
};

int cmd_verify(const VerifyArgs& a) {
  const RawInstance raw = io::parse_instance(io::load_json(a.instance));
  const NormalizedInstance inst = normalize_instance(raw);
  const json r = io::load_json(a.result);
  const int k = inst.k();

  UtilityVector u;
  Allocation q(k);
  std::vector<double> prices;
  double revenue = 0.0;
  std::string mode, reference;
  std::optional<double> regret;
  try {
    mode = r.at("mode").get<std::string>();
    reference = r.at("reference").get<std::string>();
    if (r.at("k").get<int>() != k) throw InvalidInput("result k differs from the instance");
    const json& s = r.at("solution");
    u = s.at("utilities").get<std::vector<double>>();
    prices = s.at("prices").get<std::vector<double>>();
    revenue = s.at("revenue").get<double>();
    if (static_cast<int>(u.size()) != k || static_cast<int>(prices.size()) != k) {
      throw InvalidInput("result vectors do not have length k");
    }
    for (const auto& pair : s.at("allocation")) {
      const int i = pair.at(0).get<int>();
      const int j = pair.at(1).get<int>();
      if (i < 0 || i >= k || j < 0 || j >= k) throw InvalidInput("allocation index out of range");
      q.assign(i, j);
    }
    if (r.contains("regret")) regret = r.at("regret").get<double>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("result schema mismatch: ") + e.what());
  } catch (const Error& e) {
    throw InvalidInput(std::string("result schema mismatch: ") + e.what());
  }

  bool all_pass = true;
  auto report = [&](const std::string& name, bool pass, const std::string& detail = {}) {
    std::cout << (pass ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) std::cout << ": " << detail;
    std::cout << '\n';
    all_pass = all_pass && pass;
  };

  const bool robust_mode = mode == "robust" || mode == "oracle";
  ValuationMatrix x_ref;
  std::optional<IntervalUncertainty> s;
  if (robust_mode) {
    s = as_interval(inst);
    x_ref = s->lower();
    const auto rep = check_robust(u, q, *s);
    report("robust-feasible", rep.feasible, rep.violation);
  } else {
    x_ref = pick_scenario(inst, raw, reference == "valuations" ? std::string() : reference, mode);
  }
  {
    const auto rep = check_ic(u, q, x_ref);
    report("ic-feasible", rep.feasible, rep.violation);
  }

  const double tol = 1e-6;
  try {
    const auto expect = recover_prices(u, q, x_ref, s ? s->upper() : x_ref);
    int bad = -1;
    for (int j = 0; j < k && bad < 0; ++j) {
      const double scale = 1.0 + std::abs(expect[j]);
      if (std::abs(expect[j] - prices[j]) > tol * scale) bad = j;
    }
    report("prices", bad < 0,
           bad < 0 ? std::string()
                   : "item " + std::to_string(bad) + " reported " + fmt9(prices[bad]) +
                         ", recovered " + fmt9(expect[bad]));
  } catch (const InfeasibleError& e) {
    report("prices", false, e.what());
  }
  const double value = value_under_scenario(u, q, x_ref);
  report("revenue", std::abs(value - revenue) <= tol * (1.0 + std::abs(value)),
         "reported " + fmt9(revenue) + ", recomputed " + fmt9(value));

  if (robust_mode) {
    if (!regret) {
      report("regret", false, "result has no regret field");
    } else if (k > robust::kDefaultRegretCap) {
      std::cout << "SKIP regret: k=" << k << " above the exact-evaluation cap "
                << robust::kDefaultRegretCap << '\n';
    } else {
      const double exact = robust::evaluate_regret_exact(u, q, *s);
      report("regret", std::abs(exact - *regret) <= a.eps,
             "reported " + fmt9(*regret) + ", exact " + fmt9(exact));
    }
  }
  return all_pass ? kOk : kVerifyFailed;
}

// ---- bench ----

struct BenchArgs {
  std::string preset;
  std::optional<double> xmin, xmax, delta;
  std::string k_list = "5,10";
  int reps = 10;
  double eps = robust::kDefaultGap;
  double time_limit = 120.0;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out = "-";
  std::string runs_dir;
  bool no_timing = false;
};

json run_json(const bench::RunRecord& r, int k, bool timing) {
  json j{{"k", k},
         {"seed", r.seed},
         {"status", r.status},
         {"completed", r.completed},
         {"regret", io::number(r.regret)},
         {"lower_bound", io::number(r.lower_bound)},
         {"revenue", io::number(r.revenue)},
         {"welfare", io::number(r.welfare)},
         {"sold", r.sold},
         {"cuts", r.cuts},
         {"iterations", r.iterations}};
  if (!r.error.empty()) j["error"] = r.error;
  if (timing) j["time_s"] = io::number(r.time_s);
  return j;
}

int cmd_bench(const BenchArgs& a) {
  bench::ExperimentConfig c;
  if (!a.preset.empty()) {
    const auto p = bench::find_preset(a.preset);
    if (!p) throw InvalidInput("unknown preset '" + a.preset + "' (table1-row1..table1-row4)");
    c.x_min_lower = p->x_min_lower;
    c.x_max_lower = p->x_max_lower;
    c.delta = p->delta;
  }
  if (a.xmin) c.x_min_lower = *a.xmin;
  if (a.xmax) c.x_max_lower = *a.xmax;
  if (a.delta) c.delta = *a.delta;
  c.k_list = parse_k_list(a.k_list);
  c.reps = a.reps;
  c.seed = resolve_seed(a.seed);
  c.jobs = a.jobs;
  if (a.eps < 0.0) throw InvalidInput("--eps must be nonnegative");
  if (a.time_limit <= 0.0) throw InvalidInput("--time-limit must be positive");
  c.robust.gap = a.eps;
  c.robust.time_limit = std::chrono::duration<double>(a.time_limit);

  const auto rows = bench::run_experiment(c);
  io::write_file(a.out, bench::write_csv(rows, !a.no_timing));

  bool limit_hit = false;
  for (const auto& row : rows) {
    for (const auto& r : row.runs) {
      if (r.status != "optimal") {
        limit_hit = true;
        std::cerr << "k=" << row.k << " seed=" << r.seed << " status=" << r.status
                  << (r.error.empty() ? "" : " error=" + r.error) << '\n';
      }
      if (!a.runs_dir.empty()) {
        std::filesystem::create_directories(a.runs_dir);
        const auto path = std::filesystem::path(a.runs_dir) /
                          ("k" + std::to_string(row.k) + "_seed" + std::to_string(r.seed) + ".json");
        io::write_file(path.string(), io::dump(run_json(r, row.k, !a.no_timing)));
      }
    }
  }
  return limit_hit ? kSolverLimit : kOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Robust, exact and heuristic envy-free item pricing"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a random interval instance");
  g->add_option("--k", gen.k, "Number of buyers and items")->required()->check(CLI::PositiveNumber);
  g->add_option("--xmin", gen.xmin, "Smallest lower bound");
  g->add_option("--xmax", gen.xmax, "Largest lower bound");
  g->add_option("--delta", gen.delta, "Largest interval width");
  g->add_option("--seed", gen.seed, "Seed (default: $REGRET_PRICER_SEED, else 1)");
  g->add_option("--out", gen.out, "Output file, - for stdout");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Price an instance");
  s->add_option("--instance", solve.instance, "Instance JSON")->required();
  s->add_option("--mode", solve.mode, "robust | det | heuristic | oracle")
      ->check(CLI::IsMember({"robust", "det", "heuristic", "oracle"}));
  s->add_option("--eps", solve.eps, "Absolute gap between the regret bounds");
  s->add_option("--time-limit", solve.time_limit, "Seconds");
  s->add_option("--max-iterations", solve.max_iterations, "Cut-generation iterations")
      ->check(CLI::PositiveNumber);
  s->add_option("--scenario", solve.scenario,
                "lower | upper | <file>: point valuations for det/heuristic on interval data");
  s->add_option("--out", solve.out, "Result JSON, - for stdout");
  s->add_option("--dump-model", solve.dump_model, "Write the (final) MILP in text form");
  s->add_flag("--verbose", solve.verbose, "Per-iteration log on stderr");
  s->add_flag("--no-timing", solve.no_timing, "Omit wall time so output depends on inputs only");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Check a result against its instance");
  v->add_option("--instance", verify.instance, "Instance JSON")->required();
  v->add_option("--result", verify.result, "Result JSON")->required();
  v->add_option("--eps", verify.eps, "Allowed regret mismatch");

  BenchArgs bench_args;
  auto* b = app.add_subcommand("bench", "Averaged robust results over random instances");
  b->add_option("--preset", bench_args.preset, "table1-row1 .. table1-row4");
  b->add_option("--xmin", bench_args.xmin, "Smallest lower bound");
  b->add_option("--xmax", bench_args.xmax, "Largest lower bound");
  b->add_option("--delta", bench_args.delta, "Largest interval width");
  b->add_option("--k-list", bench_args.k_list, "Comma-separated sizes");
  b->add_option("--reps", bench_args.reps, "Repetitions per size")->check(CLI::PositiveNumber);
  b->add_option("--eps", bench_args.eps, "Absolute gap");
  b->add_option("--time-limit", bench_args.time_limit, "Seconds per instance");
  b->add_option("--seed", bench_args.seed, "Base seed; run r uses seed + r");
  b->add_option("--jobs", bench_args.jobs, "Worker threads")->check(CLI::PositiveNumber);
  b->add_option("--out", bench_args.out, "CSV file, - for stdout");
  b->add_option("--runs-dir", bench_args.runs_dir, "Also write one JSON file per run");
  b->add_flag("--no-timing", bench_args.no_timing, "Write 0.00 in the time column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*s) return cmd_solve(solve);
    if (*v) return cmd_verify(verify);
    if (*b) return cmd_bench(bench_args);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace regret_pricer::cli
