#pragma once

// Min-max regret prices under interval uncertainty by cut generation.
//
// The master problem chooses a robust-feasible (u, q) together with a bound
// theta on the best revenue attainable in the adversarial scenario; every
// iteration probes the scenario that is worst for the master's allocation
// (lower bounds on sold pairs, upper bounds elsewhere), solves the
// deterministic pricing problem there, and turns that optimum into a new
// cut on theta.

#include <chrono>
#include <iosfwd>
#include <vector>

#include "regret_pricer/core.hpp"
#include "regret_pricer/milp.hpp"

namespace regret_pricer::robust {

inline constexpr double kDefaultGap = 0.05;
inline constexpr int kDefaultRegretCap = 3;

// A deterministic optimum (u', q') collected from a sub-problem.
struct Cut {
  UtilityVector u_prime;
  Allocation q_prime;
};

enum class RobustStatus { optimal, gap_limit, time_limit };

const char* to_string(RobustStatus status);

struct RobustSolution {
  PricingSolution solution;  // prices recovered at the lower bounds
  double regret = 0.0;       // final upper bound
  double lower_bound = 0.0;  // final lower bound
  std::vector<double> lb_trace;
  std::vector<double> ub_trace;
  std::vector<Cut> cuts;
  int iterations = 0;
  RobustStatus status = RobustStatus::optimal;
};

// Constraint names: row[i], col[j], ric[i][j] (i != j), price[i], cut[c].
struct MasterModel {
  milp::MilpModel model;
  int k = 0;
  std::vector<milp::VarId> q;  // row-major
  std::vector<milp::VarId> u;
  milp::VarId theta;

  milp::VarId q_at(int buyer, int item) const { return q[static_cast<std::size_t>(buyer) * k + item]; }
};

// min theta - Sum_i (Sum_j q_ij lower_ij - u_i) subject to the matching rows,
// the robust envy rows, u_i <= Sum_j q_ij lower_ij, and for each cut
// theta >= Sum_ij q'_ij (upper_ij + (lower_ij - upper_ij) q_ij) - Sum_i u'_i.
MasterModel build_master(const IntervalUncertainty& s, const std::vector<Cut>& cuts);

// x_ij = lower_ij where q_hat_ij = 1, upper_ij otherwise.
ValuationMatrix worst_case_scenario(const Allocation& q_hat, const IntervalUncertainty& s);

struct RobustOptions {
  // Stop once UB - LB <= gap (plus a 1e-9 relative rounding slack).
  double gap = kDefaultGap;
  int max_iterations = 200;
  std::chrono::duration<double> time_limit{120.0};
  double master_gap = 0.0;
  double subproblem_gap = 0.0;
  // One line per iteration when set:
  //   iter=<n> lb=<v> ub=<v> cuts=<n> master=<v> sub=<v>
  std::ostream* log = nullptr;
};

RobustSolution solve_robust(const IntervalUncertainty& s, const RobustOptions& options = {});

// Exact worst-case regret of a fixed candidate: maximum over all vertex
// scenarios of (deterministic optimum - candidate value). Throws
// CapExceeded when k > cap.
double evaluate_regret_exact(const UtilityVector& u, const Allocation& q,
                             const IntervalUncertainty& s, int cap = kDefaultRegretCap);

}  // namespace regret_pricer::robust
