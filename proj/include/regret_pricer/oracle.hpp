#pragma once

// Brute-force ground truth for small instances. Nothing here touches the
// cut-generation loop; the only shared pieces are the core predicates, the
// enumeration path of det and the LP solver.

#include <vector>

#include "regret_pricer/core.hpp"
#include "regret_pricer/robust.hpp"

namespace regret_pricer::oracle {

inline constexpr int kMaxVertexBits = 16;
inline constexpr int kDefaultBruteForceCap = 3;

// All vertex scenarios of s. Only entries with lower < upper carry a bit;
// entry e (row-major over the non-degenerate entries) is bit e of a binary
// counter running from 0 to 2^bits - 1, bit 0 being the least significant.
// Bit value 0 selects the lower bound. Degenerate intervals therefore give a
// single scenario. Throws CapExceeded beyond kMaxVertexBits free entries.
std::vector<ValuationMatrix> enumerate_vertex_scenarios(const IntervalUncertainty& s);

// Exact min-max regret over robust-feasible (u, q): for every partial
// permutation q an LP over (u >= 0, t) minimizes t subject to the robust
// envy rows, u_i <= lower_i,item(i) (u_i = 0 when unmatched) and
// t >= opt(X_v) - value(u, q, X_v) at every vertex X_v. The best q under
// det's tie rule (on the lower-bound scenario) is returned; lb_trace and
// ub_trace hold the single final value, iterations = 1, no cuts.
// Throws CapExceeded when k > cap.
robust::RobustSolution brute_force_robust(const IntervalUncertainty& s,
                                          int cap = kDefaultBruteForceCap);

// max over scenarios of (deterministic optimum - candidate value). Throws
// InfeasibleError naming the first scenario at which (u, q) is not
// envy-free, CapExceeded when k exceeds the enumeration cap.
double regret_under_discrete_set(const UtilityVector& u, const Allocation& q,
                                 const DiscreteScenarioSet& d);

}  // namespace regret_pricer::oracle
