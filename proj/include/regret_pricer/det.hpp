#pragma once

// Exact revenue-maximizing envy-free prices for a known valuation matrix.

#include <chrono>
#include <optional>
#include <vector>

#include "regret_pricer/core.hpp"
#include "regret_pricer/milp.hpp"

namespace regret_pricer::det {

inline constexpr int kDefaultEnumerationCap = 5;

// Variable handles of the deterministic pricing program. Constraint names:
// row[i], col[j] (matching), ic[i][j] for i != j (envy-freeness),
// price[i] (u_i <= Sum_j q_ij x_ij, i.e. nonnegative price and zero utility
// for an empty bundle).
struct DeterministicModel {
  milp::MilpModel model;
  int k = 0;
  std::vector<milp::VarId> q;  // row-major, k * k
  std::vector<milp::VarId> u;

  milp::VarId q_at(int buyer, int item) const { return q[static_cast<std::size_t>(buyer) * k + item]; }
};

// max Sum_i (Sum_j q_ij x_ij - u_i) over binary q and u >= 0.
DeterministicModel build_deterministic_milp(const ValuationMatrix& x);

struct DetOptions {
  double gap = 0.0;
  long node_limit = 10'000'000;
  std::chrono::duration<double> time_limit{milp::kInf};
};

struct DetResult {
  PricingSolution solution;
  milp::SolveStatus status = milp::SolveStatus::optimal;
  double bound = 0.0;  // best proven upper bound on revenue
  long nodes = 0;
};

// Solves the MILP, then recomputes the minimal supporting utilities for the
// chosen allocation exactly. Pairs with zero valuation and zero price are
// dropped so the empty sale is reported as unsold.
DetResult solve_deterministic(const ValuationMatrix& x, const DetOptions& options = {});

// Componentwise-minimal u >= 0 with u_j >= u_i + weight[i * k + j] for all
// i != j, or nullopt when the constraint graph has a positive cycle.
std::optional<UtilityVector> minimal_difference_solution(int k, const std::vector<double>& weight);

// Componentwise-minimal u >= 0 with u_j - u_i >= Sum_k q_ik (x_jk - x_ik) for
// all i != j. Longest paths from a virtual source by Bellman-Ford over k + 1
// nodes; nullopt iff the constraint graph has a positive cycle.
std::optional<UtilityVector> min_utilities_for_allocation(const Allocation& q,
                                                          const ValuationMatrix& x);

// As above, additionally requiring u_i <= x_i,item(i) (nonnegative price) and
// u_i = 0 for unmatched buyers. Since the minimal solution is below every
// other solution, failing these caps means no supporting prices exist.
std::optional<UtilityVector> supporting_utilities(const Allocation& q, const ValuationMatrix& x);

// Ordering used to pick among equal-revenue optima: higher revenue, then more
// items sold at a positive price, then fewer matched pairs, then the
// lexicographically smallest pair list.
struct CandidateRank {
  double revenue = 0.0;
  int priced_sales = 0;
  int pairs = 0;
};
CandidateRank rank_of(const UtilityVector& u, const Allocation& q, const ValuationMatrix& x_ref);
bool outranks(const CandidateRank& a, const Allocation& qa, const CandidateRank& b,
              const Allocation& qb);

// Exhaustive search over all partial permutations. Throws CapExceeded for
// k above cap.
PricingSolution solve_deterministic_enumerate(const ValuationMatrix& x,
                                              int cap = kDefaultEnumerationCap);

}  // namespace regret_pricer::det
