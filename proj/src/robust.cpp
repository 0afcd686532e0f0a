#include "regret_pricer/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "regret_pricer/det.hpp"
#include "regret_pricer/errors.hpp"
#include "regret_pricer/oracle.hpp"

namespace regret_pricer::robust {

using milp::Relation;
using milp::Term;

const char* to_string(RobustStatus status) {
  switch (status) {
    case RobustStatus::optimal:
      return "optimal";
    case RobustStatus::gap_limit:
      return "gap-limit";
    case RobustStatus::time_limit:
      return "time-limit";
  }
  return "unknown";
}

MasterModel build_master(const IntervalUncertainty& s, const std::vector<Cut>& cuts) {
  const int k = s.k();
  const auto& lo = s.lower();
  const auto& hi = s.upper();
  MasterModel mm;
  mm.k = k;
  auto& m = mm.model;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      mm.q.push_back(m.add_binary("q[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
    }
  }
  for (int i = 0; i < k; ++i) mm.u.push_back(m.add_continuous("u[" + std::to_string(i) + "]"));
  mm.theta = m.add_continuous("theta");

  for (int i = 0; i < k; ++i) {
    std::vector<Term> row;
    for (int j = 0; j < k; ++j) row.push_back({mm.q_at(i, j), 1.0});
    m.add_constraint("row[" + std::to_string(i) + "]", std::move(row), Relation::less_equal, 1.0);
  }
  for (int j = 0; j < k; ++j) {
    std::vector<Term> col;
    for (int i = 0; i < k; ++i) col.push_back({mm.q_at(i, j), 1.0});
    m.add_constraint("col[" + std::to_string(j) + "]", std::move(col), Relation::less_equal, 1.0);
  }
  // The diagonal pairs compare a buyer with itself under one scenario and
  // are identically satisfied, so only i != j rows are generated.
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      std::vector<Term> terms{{mm.u[j], 1.0}, {mm.u[i], -1.0}};
      for (int item = 0; item < k; ++item) {
        const double c = hi(j, item) - lo(i, item);
        if (c != 0.0) terms.push_back({mm.q_at(i, item), -c});
      }
      m.add_constraint("ric[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                       std::move(terms), Relation::greater_equal, 0.0);
    }
  }
  for (int i = 0; i < k; ++i) {
    std::vector<Term> terms{{mm.u[i], 1.0}};
    for (int j = 0; j < k; ++j) {
      if (lo(i, j) != 0.0) terms.push_back({mm.q_at(i, j), -lo(i, j)});
    }
    m.add_constraint("price[" + std::to_string(i) + "]", std::move(terms), Relation::less_equal,
                     0.0);
  }
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    const Cut& cut = cuts[c];
    std::vector<Term> terms{{mm.theta, 1.0}};
    double rhs = 0.0;
    for (const auto& [i, j] : cut.q_prime.pairs()) {
      rhs += hi(i, j);
      const double slope = lo(i, j) - hi(i, j);
      if (slope != 0.0) terms.push_back({mm.q_at(i, j), -slope});
    }
    for (double up : cut.u_prime) rhs -= up;
    m.add_constraint("cut[" + std::to_string(c) + "]", std::move(terms), Relation::greater_equal,
                     rhs);
  }

  std::vector<Term> objective{{mm.theta, 1.0}};
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (lo(i, j) != 0.0) objective.push_back({mm.q_at(i, j), -lo(i, j)});
    }
  }
  for (int i = 0; i < k; ++i) objective.push_back({mm.u[i], 1.0});
  m.set_objective(milp::Sense::minimize, std::move(objective));
  return mm;
}

ValuationMatrix worst_case_scenario(const Allocation& q_hat, const IntervalUncertainty& s) {
  const int k = s.k();
  if (q_hat.k() != k) throw InvalidInput("allocation and uncertainty set sizes differ");
  Matrix x(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) x(i, j) = q_hat(i, j) ? s.lower()(i, j) : s.upper()(i, j);
  }
  return ValuationMatrix(std::move(x));
}

namespace {

// Minimal robust-feasible utilities for a fixed allocation; replaces the
// master's floating-point u when the exact system is feasible.
std::optional<UtilityVector> minimal_robust_utilities(const Allocation& q,
                                                      const IntervalUncertainty& s) {
  const int k = s.k();
  std::vector<double> weight(static_cast<std::size_t>(k) * k, 0.0);
  for (const auto& [i, item] : q.pairs()) {
    for (int j = 0; j < k; ++j) {
      weight[static_cast<std::size_t>(i) * k + j] = s.upper()(j, item) - s.lower()(i, item);
    }
  }
  auto u = det::minimal_difference_solution(k, weight);
  if (!u) return u;
  for (int i = 0; i < k; ++i) {
    const auto item = q.item_of(i);
    const double cap = item ? s.lower()(i, *item) : 0.0;
    if ((*u)[i] > cap + kFeasibilityTol) return std::nullopt;
  }
  return u;
}

}  // namespace

RobustSolution solve_robust(const IntervalUncertainty& s, const RobustOptions& options) {
  if (options.gap < 0.0) throw InvalidInput("gap must be nonnegative");
  const auto start = std::chrono::steady_clock::now();
  auto remaining = [&] {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return options.time_limit - elapsed;
  };

  const int k = s.k();
  RobustSolution result;
  double lb = -std::numeric_limits<double>::infinity();
  double ub = std::numeric_limits<double>::infinity();
  UtilityVector best_u;
  Allocation best_q;
  RobustStatus status = RobustStatus::gap_limit;

  for (int iteration = 1;; ++iteration) {
    if (iteration > 1 && remaining().count() <= 0.0) {
      status = RobustStatus::time_limit;
      break;
    }
    const MasterModel master = build_master(s, result.cuts);
    milp::SolveOptions mo;
    mo.gap = options.master_gap;
    mo.time_limit = std::max(remaining(), std::chrono::duration<double>(0.0));
    const auto ms = milp::solve(master.model, mo);
    if (!ms.has_solution()) {
      if (ms.status == milp::SolveStatus::infeasible) {
        throw InternalError("master problem reported infeasible; q = 0, u = 0 is always feasible");
      }
      status = RobustStatus::time_limit;
      break;
    }
    if (ms.status != milp::SolveStatus::optimal) {
      status = RobustStatus::time_limit;
      break;
    }
    result.iterations = iteration;

    const double master_value = ms.objective_value;
    if (master_value > lb) lb = master_value;

    Allocation q_hat(k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (ms.value(master.q_at(i, j)) > 0.5) q_hat.assign(i, j);
      }
    }
    UtilityVector u_hat;
    if (auto exact = minimal_robust_utilities(q_hat, s)) {
      u_hat = std::move(*exact);
    } else {
      for (int i = 0; i < k; ++i) u_hat.push_back(std::max(0.0, ms.value(master.u[i])));
    }

    const ValuationMatrix scenario = worst_case_scenario(q_hat, s);
    det::DetOptions dopt;
    dopt.gap = options.subproblem_gap;
    dopt.time_limit = std::max(remaining(), std::chrono::duration<double>(0.0));
    const auto sub = det::solve_deterministic(scenario, dopt);
    const double sub_value = sub.solution.revenue;
    const double candidate_regret = sub_value - value_under_scenario(u_hat, q_hat, scenario);
    if (candidate_regret < ub) {
      ub = candidate_regret;
      best_u = u_hat;
      best_q = q_hat;
    }
    result.lb_trace.push_back(lb);
    result.ub_trace.push_back(ub);
    if (options.log) {
      *options.log << "iter=" << iteration << " lb=" << lb << " ub=" << ub
                   << " cuts=" << result.cuts.size() << " master=" << master_value
                   << " sub=" << sub_value << '\n';
    }
    if (sub.status != milp::SolveStatus::optimal) {
      status = RobustStatus::time_limit;
      break;
    }
    // Relative slack absorbs rounding in the master objective (gap = 0 would
    // otherwise chase differences of a few ulps).
    if (ub - lb <= options.gap + kFeasibilityTol * (1.0 + std::max(std::abs(ub), std::abs(lb)))) {
      status = RobustStatus::optimal;
      break;
    }
    if (iteration >= options.max_iterations) {
      status = RobustStatus::gap_limit;
      break;
    }
    result.cuts.push_back({sub.solution.utilities, sub.solution.allocation});
  }

  if (best_q.k() != k) {
    throw Error("robust solve stopped before the first iteration completed");
  }
  result.solution = make_pricing_solution(best_u, best_q, s.lower(), s.upper());
  result.regret = ub;
  result.lower_bound = lb;
  result.status = status;
  return result;
}

double evaluate_regret_exact(const UtilityVector& u, const Allocation& q,
                             const IntervalUncertainty& s, int cap) {
  if (s.k() > cap) {
    throw CapExceeded("exact regret evaluation for k=" + std::to_string(s.k()) +
                      " exceeds cap " + std::to_string(cap));
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& x : oracle::enumerate_vertex_scenarios(s)) {
    const double opt = det::solve_deterministic_enumerate(x, std::max(cap, s.k())).revenue;
    worst = std::max(worst, opt - value_under_scenario(u, q, x));
  }
  return worst;
}

}  // namespace regret_pricer::robust
