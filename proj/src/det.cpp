#include "regret_pricer/det.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "regret_pricer/errors.hpp"

namespace regret_pricer::det {

using milp::Relation;
using milp::Term;

DeterministicModel build_deterministic_milp(const ValuationMatrix& x) {
  DeterministicModel dm;
  const int k = x.k();
  dm.k = k;
  auto& m = dm.model;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      dm.q.push_back(m.add_binary("q[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
    }
  }
  for (int i = 0; i < k; ++i) dm.u.push_back(m.add_continuous("u[" + std::to_string(i) + "]"));

  for (int i = 0; i < k; ++i) {
    std::vector<Term> row;
    for (int j = 0; j < k; ++j) row.push_back({dm.q_at(i, j), 1.0});
    m.add_constraint("row[" + std::to_string(i) + "]", std::move(row), Relation::less_equal, 1.0);
  }
  for (int j = 0; j < k; ++j) {
    std::vector<Term> col;
    for (int i = 0; i < k; ++i) col.push_back({dm.q_at(i, j), 1.0});
    m.add_constraint("col[" + std::to_string(j) + "]", std::move(col), Relation::less_equal, 1.0);
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      std::vector<Term> terms{{dm.u[j], 1.0}, {dm.u[i], -1.0}};
      for (int item = 0; item < k; ++item) {
        const double c = x(j, item) - x(i, item);
        if (c != 0.0) terms.push_back({dm.q_at(i, item), -c});
      }
      m.add_constraint("ic[" + std::to_string(i) + "][" + std::to_string(j) + "]", std::move(terms),
                       Relation::greater_equal, 0.0);
    }
  }
  for (int i = 0; i < k; ++i) {
    std::vector<Term> terms{{dm.u[i], 1.0}};
    for (int j = 0; j < k; ++j) {
      if (x(i, j) != 0.0) terms.push_back({dm.q_at(i, j), -x(i, j)});
    }
    m.add_constraint("price[" + std::to_string(i) + "]", std::move(terms), Relation::less_equal,
                     0.0);
  }

  std::vector<Term> objective;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (x(i, j) != 0.0) objective.push_back({dm.q_at(i, j), x(i, j)});
    }
  }
  for (int i = 0; i < k; ++i) objective.push_back({dm.u[i], -1.0});
  m.set_objective(milp::Sense::maximize, std::move(objective));
  return dm;
}

std::optional<UtilityVector> minimal_difference_solution(int k, const std::vector<double>& weight) {
  UtilityVector u(k, 0.0);
  for (int round = 0; round < k; ++round) {
    bool changed = false;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        const double cand = u[i] + weight[static_cast<std::size_t>(i) * k + j];
        if (cand > u[j] + 1e-12) {
          u[j] = cand;
          changed = true;
        }
      }
    }
    if (!changed) return u;
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i != j && u[i] + weight[static_cast<std::size_t>(i) * k + j] > u[j] + kFeasibilityTol) {
        return std::nullopt;
      }
    }
  }
  return u;
}

std::optional<UtilityVector> min_utilities_for_allocation(const Allocation& q,
                                                          const ValuationMatrix& x) {
  const int k = x.k();
  if (q.k() != k) throw InvalidInput("allocation and valuation sizes differ");
  std::vector<double> weight(static_cast<std::size_t>(k) * k, 0.0);
  for (const auto& [i, item] : q.pairs()) {
    for (int j = 0; j < k; ++j) weight[static_cast<std::size_t>(i) * k + j] = x(j, item) - x(i, item);
  }
  return minimal_difference_solution(k, weight);
}

std::optional<UtilityVector> supporting_utilities(const Allocation& q, const ValuationMatrix& x) {
  auto u = min_utilities_for_allocation(q, x);
  if (!u) return u;
  for (int i = 0; i < q.k(); ++i) {
    const auto item = q.item_of(i);
    const double cap = item ? x(i, *item) : 0.0;
    if ((*u)[i] > cap + kFeasibilityTol) return std::nullopt;
  }
  return u;
}

CandidateRank rank_of(const UtilityVector& u, const Allocation& q, const ValuationMatrix& x_ref) {
  CandidateRank r;
  r.revenue = value_under_scenario(u, q, x_ref);
  for (const auto& [i, j] : q.pairs()) {
    if (x_ref(i, j) - u[i] > kFeasibilityTol) ++r.priced_sales;
    ++r.pairs;
  }
  return r;
}

bool outranks(const CandidateRank& a, const Allocation& qa, const CandidateRank& b,
              const Allocation& qb) {
  if (std::abs(a.revenue - b.revenue) > kFeasibilityTol * (1.0 + std::abs(b.revenue))) {
    return a.revenue > b.revenue;
  }
  if (a.priced_sales != b.priced_sales) return a.priced_sales > b.priced_sales;
  if (a.pairs != b.pairs) return a.pairs < b.pairs;
  return pairs_less(qa, qb);
}

namespace {

// Drops (i, j) pairs that carry neither value nor utility: the buyer is
// indifferent and the item is better reported as unsold.
void drop_empty_sales(Allocation& q, UtilityVector& u, const ValuationMatrix& x) {
  for (const auto& [i, j] : q.pairs()) {
    if (x(i, j) <= kFeasibilityTol && u[i] <= kFeasibilityTol) {
      q.unassign_buyer(i);
      u[i] = 0.0;
    }
  }
}

}  // namespace

DetResult solve_deterministic(const ValuationMatrix& x, const DetOptions& options) {
  const auto dm = build_deterministic_milp(x);
  milp::SolveOptions so;
  so.gap = options.gap;
  so.node_limit = options.node_limit;
  so.time_limit = options.time_limit;
  const auto sol = milp::solve(dm.model, so);
  if (!sol.has_solution()) {
    // q = 0, u = 0 is always feasible, so this is a solver failure.
    throw InternalError(std::string("deterministic pricing model returned ") +
                        milp::to_string(sol.status));
  }

  const int k = x.k();
  Allocation q(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (sol.value(dm.q_at(i, j)) > 0.5) q.assign(i, j);
    }
  }
  UtilityVector u;
  if (auto exact = supporting_utilities(q, x)) {
    u = std::move(*exact);
  } else {
    for (int i = 0; i < k; ++i) u.push_back(std::max(0.0, sol.value(dm.u[i])));
  }
  drop_empty_sales(q, u, x);

  DetResult result;
  result.solution = make_pricing_solution(u, q, x);
  result.status = sol.status;
  result.bound = sol.bound;
  result.nodes = sol.nodes_explored;
  return result;
}

PricingSolution solve_deterministic_enumerate(const ValuationMatrix& x, int cap) {
  const int k = x.k();
  if (k > cap) {
    throw CapExceeded("enumeration over " + std::to_string(k) + "x" + std::to_string(k) +
                      " exceeds cap " + std::to_string(cap));
  }
  std::optional<Allocation> best_q;
  UtilityVector best_u;
  CandidateRank best_rank;
  for (const auto& q : enumerate_partial_permutations(k)) {
    auto u = supporting_utilities(q, x);
    if (!u) continue;
    const CandidateRank rank = rank_of(*u, q, x);
    if (!best_q || outranks(rank, q, best_rank, *best_q)) {
      best_q = q;
      best_u = std::move(*u);
      best_rank = rank;
    }
  }
  // The empty allocation is always supported.
  return make_pricing_solution(best_u, *best_q, x);
}

}  // namespace regret_pricer::det
