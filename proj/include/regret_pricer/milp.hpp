#pragma once

// Mixed-binary linear programming: a bounded-variable simplex for the LP
// relaxation and best-bound branch-and-bound over the binary variables.

#include <chrono>
#include <compare>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace regret_pricer::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kIntegralityTol = 1e-7;
inline constexpr double kConstraintTol = 1e-9;

struct VarId {
  int index = -1;
  friend auto operator<=>(const VarId&, const VarId&) = default;
};

enum class VarKind { continuous, binary };
enum class Relation { less_equal, greater_equal, equal };
enum class Sense { minimize, maximize };

struct Term {
  VarId var;
  double coef = 0.0;
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  VarKind kind = VarKind::continuous;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
};

struct Objective {
  Sense sense = Sense::minimize;
  std::vector<Term> terms;
  double constant = 0.0;
};

class MilpModel {
 public:
  VarId add_continuous(std::string name, double lower = 0.0, double upper = kInf);
  VarId add_binary(std::string name);
  void add_constraint(std::string name, std::vector<Term> terms, Relation relation, double rhs);
  void set_objective(Sense sense, std::vector<Term> terms, double constant = 0.0);

  // Replaces the bounds of an existing variable (binaries stay within [0, 1]).
  void set_bounds(VarId var, double lower, double upper);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Objective& objective() const { return objective_; }
  int num_binaries() const;

  // Number of constraints whose name starts with prefix.
  int count_constraints(std::string_view prefix) const;

  // Throws InvalidInput when bounds or coefficients are malformed.
  void validate() const;

  // Plain-text dump, one item per line:
  //   objective <min|max> <constant> [<coef> <var>]...
  //   var <name> <continuous|binary> <lower> <upper>
  //   con <name> [<coef> <var>]... <<=|>=|=> <rhs>
  std::string to_text() const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  Objective objective_;
};

enum class SolveStatus { optimal, infeasible, unbounded, gap_limit, iteration_limit };

const char* to_string(SolveStatus status);

struct MilpSolution {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<double> values;  // indexed by VarId::index; empty without a solution
  double objective_value = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
  long nodes_explored = 0;
  long simplex_iterations = 0;
  // Global bound after each node, in the model's sense.
  std::vector<double> bound_trace;

  bool has_solution() const { return !values.empty(); }
  double value(VarId var) const { return values.at(var.index); }
};

struct SolveOptions {
  double gap = 0.0;  // absolute
  long node_limit = 10'000'000;
  std::chrono::duration<double> time_limit{kInf};
  bool record_bound_trace = false;
};

// LP relaxation (binaries relaxed to [0, 1]). Deterministic: Dantzig pricing
// with a switch to Bland's rule after 2 * (rows + columns) pivots without
// objective progress. Throws NumericalError on repeated tiny pivots.
MilpSolution lp_solve(const MilpModel& model);

// Branch-and-bound over the binaries. Best-bound node selection (newest
// node first among equal bounds); branches on the fractional binary closest
// to 0.5, lowest index on ties. A node limit ends with iteration_limit, a
// time limit with gap_limit; both keep the incumbent if one exists.
MilpSolution solve(const MilpModel& model, const SolveOptions& options = {});

}  // namespace regret_pricer::milp
