#pragma once

// Fast envy-free pricing: fix a maximum-weight assignment, start from prices
// equal to the matched valuations and lower them until nobody envies.

#include "regret_pricer/core.hpp"

namespace regret_pricer::heuristic {

// Maximum-weight perfect matching (Hungarian algorithm). Among optimal
// matchings returns the lexicographically smallest pair list.
Allocation max_weight_assignment(const ValuationMatrix& x);

double matching_weight(const Allocation& q, const ValuationMatrix& x);

enum class HeuristicStatus { converged, not_converged, failed };

const char* to_string(HeuristicStatus status);

struct HeuristicResult {
  PricingSolution solution;
  HeuristicStatus status = HeuristicStatus::converged;
  int passes = 0;
  int removed_items = 0;
};

// 0 selects the default of 4 * k * k passes.
HeuristicResult heuristic_solve(const ValuationMatrix& x, int max_passes = 0);

}  // namespace regret_pricer::heuristic
