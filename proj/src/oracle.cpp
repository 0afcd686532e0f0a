#include "regret_pricer/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "regret_pricer/det.hpp"
#include "regret_pricer/errors.hpp"
#include "regret_pricer/milp.hpp"

namespace regret_pricer::oracle {

using milp::Relation;
using milp::Term;

std::vector<ValuationMatrix> enumerate_vertex_scenarios(const IntervalUncertainty& s) {
  const int k = s.k();
  std::vector<std::pair<int, int>> free;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (s.lower()(i, j) != s.upper()(i, j)) free.emplace_back(i, j);
    }
  }
  if (static_cast<int>(free.size()) > kMaxVertexBits) {
    throw CapExceeded(std::to_string(free.size()) + " free interval entries exceed the vertex cap " +
                      std::to_string(kMaxVertexBits));
  }
  const std::size_t count = std::size_t{1} << free.size();
  std::vector<ValuationMatrix> out;
  out.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    Matrix x = s.lower().matrix();
    for (std::size_t b = 0; b < free.size(); ++b) {
      if (mask >> b & 1U) {
        const auto [i, j] = free[b];
        x(i, j) = s.upper()(i, j);
      }
    }
    out.emplace_back(std::move(x));
  }
  return out;
}

namespace {

struct Candidate {
  Allocation q;
  UtilityVector u;
  double regret = 0.0;
};

// Minimizes t = M_q + Sum u over the robust-feasible u for a fixed q, where
// M_q is the largest opt(X_v) - Sum q X_v. Every epigraph row has the same
// left-hand side t - Sum u, so only the row with the largest right-hand side
// can bind and the others are omitted.
std::optional<Candidate> best_for_allocation(const Allocation& q, const IntervalUncertainty& s,
                                             const std::vector<ValuationMatrix>& vertices,
                                             const std::vector<double>& opt) {
  const int k = s.k();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    double sold = 0.0;
    for (const auto& [i, j] : q.pairs()) sold += vertices[v](i, j);
    worst = std::max(worst, opt[v] - sold);
  }

  milp::MilpModel m;
  std::vector<milp::VarId> u;
  for (int i = 0; i < k; ++i) {
    const auto item = q.item_of(i);
    const double cap = item ? s.lower()(i, *item) : 0.0;
    u.push_back(m.add_continuous("u[" + std::to_string(i) + "]", 0.0, cap));
  }
  const auto t = m.add_continuous("t", -milp::kInf, milp::kInf);
  for (const auto& [i, item] : q.pairs()) {
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      m.add_constraint("ric[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                       {{u[j], 1.0}, {u[i], -1.0}}, Relation::greater_equal,
                       s.upper()(j, item) - s.lower()(i, item));
    }
  }
  // Unmatched rows i contribute u_j - u_i >= 0.
  for (int i = 0; i < k; ++i) {
    if (q.item_of(i)) continue;
    for (int j = 0; j < k; ++j) {
      if (j != i) {
        m.add_constraint("ric[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                         {{u[j], 1.0}, {u[i], -1.0}}, Relation::greater_equal, 0.0);
      }
    }
  }
  std::vector<Term> epi{{t, 1.0}};
  for (int i = 0; i < k; ++i) epi.push_back({u[i], -1.0});
  m.add_constraint("epi", std::move(epi), Relation::greater_equal, worst);
  m.set_objective(milp::Sense::minimize, {{t, 1.0}});

  const auto sol = milp::lp_solve(m);
  if (sol.status == milp::SolveStatus::infeasible) return std::nullopt;
  if (sol.status != milp::SolveStatus::optimal) {
    throw InternalError(std::string("oracle LP returned ") + milp::to_string(sol.status));
  }
  Candidate c;
  c.q = q;
  for (int i = 0; i < k; ++i) c.u.push_back(std::max(0.0, sol.value(u[i])));
  c.regret = sol.objective_value;
  return c;
}

}  // namespace

robust::RobustSolution brute_force_robust(const IntervalUncertainty& s, int cap) {
  const int k = s.k();
  if (k > cap) {
    throw CapExceeded("brute-force robust solve for k=" + std::to_string(k) + " exceeds cap " +
                      std::to_string(cap));
  }
  const auto vertices = enumerate_vertex_scenarios(s);
  std::vector<double> opt;
  opt.reserve(vertices.size());
  for (const auto& x : vertices) {
    opt.push_back(det::solve_deterministic_enumerate(x, std::max(cap, k)).revenue);
  }

  std::optional<Candidate> best;
  det::CandidateRank best_rank;
  for (const auto& q : enumerate_partial_permutations(k)) {
    auto c = best_for_allocation(q, s, vertices, opt);
    if (!c) continue;
    const det::CandidateRank rank = det::rank_of(c->u, c->q, s.lower());
    bool better = !best;
    if (!better) {
      const double tol = 1e-9 * (1.0 + std::abs(best->regret));
      if (c->regret < best->regret - tol) {
        better = true;
      } else if (c->regret <= best->regret + tol) {
        better = det::outranks(rank, c->q, best_rank, best->q);
      }
    }
    if (better) {
      best = std::move(c);
      best_rank = rank;
    }
  }
  if (!best) throw InternalError("no robust-feasible allocation; the empty one always is");

  robust::RobustSolution r;
  r.solution = make_pricing_solution(best->u, best->q, s.lower(), s.upper());
  r.regret = best->regret;
  r.lower_bound = best->regret;
  r.lb_trace = {best->regret};
  r.ub_trace = {best->regret};
  r.iterations = 1;
  r.status = robust::RobustStatus::optimal;
  return r;
}

double regret_under_discrete_set(const UtilityVector& u, const Allocation& q,
                                 const DiscreteScenarioSet& d) {
  double worst = -std::numeric_limits<double>::infinity();
  const auto& scenarios = d.scenarios();
  for (std::size_t v = 0; v < scenarios.size(); ++v) {
    const auto report = check_ic(u, q, scenarios[v]);
    if (!report) {
      throw InfeasibleError("candidate is not envy-free in scenario " + std::to_string(v) + ": " +
                            report.violation);
    }
    const double opt = det::solve_deterministic_enumerate(scenarios[v]).revenue;
    worst = std::max(worst, regret(u, q, scenarios[v], opt));
  }
  return worst;
}

}  // namespace regret_pricer::oracle
