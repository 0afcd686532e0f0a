#include "regret_pricer/milp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <sstream>
#include <utility>

#include "regret_pricer/errors.hpp"
#include "simplex.hpp"

namespace regret_pricer::milp {

using detail::LpForm;
using detail::LpStatus;
using detail::SimplexTableau;
using detail::make_lp_form;

VarId MilpModel::add_continuous(std::string name, double lower, double upper) {
  variables_.push_back({std::move(name), lower, upper, VarKind::continuous});
  return VarId{static_cast<int>(variables_.size()) - 1};
}

VarId MilpModel::add_binary(std::string name) {
  variables_.push_back({std::move(name), 0.0, 1.0, VarKind::binary});
  return VarId{static_cast<int>(variables_.size()) - 1};
}

void MilpModel::add_constraint(std::string name, std::vector<Term> terms, Relation relation,
                               double rhs) {
  for (const auto& t : terms) {
    if (t.var.index < 0 || t.var.index >= static_cast<int>(variables_.size())) {
      throw InvalidInput("constraint " + name + " references an unknown variable");
    }
  }
  constraints_.push_back({std::move(name), std::move(terms), relation, rhs});
}

void MilpModel::set_objective(Sense sense, std::vector<Term> terms, double constant) {
  for (const auto& t : terms) {
    if (t.var.index < 0 || t.var.index >= static_cast<int>(variables_.size())) {
      throw InvalidInput("objective references an unknown variable");
    }
  }
  objective_ = {sense, std::move(terms), constant};
}

void MilpModel::set_bounds(VarId var, double lower, double upper) {
  auto& v = variables_.at(var.index);
  if (v.kind == VarKind::binary && (lower < 0.0 || upper > 1.0)) {
    throw InvalidInput("binary variable " + v.name + " must keep bounds within [0, 1]");
  }
  v.lower = lower;
  v.upper = upper;
}

int MilpModel::num_binaries() const {
  return static_cast<int>(std::count_if(variables_.begin(), variables_.end(), [](const Variable& v) {
    return v.kind == VarKind::binary;
  }));
}

int MilpModel::count_constraints(std::string_view prefix) const {
  return static_cast<int>(
      std::count_if(constraints_.begin(), constraints_.end(), [&](const Constraint& c) {
        return std::string_view(c.name).substr(0, prefix.size()) == prefix;
      }));
}

void MilpModel::validate() const {
  for (const auto& v : variables_) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
      throw InvalidInput("variable " + v.name + " has invalid bounds");
    }
    if (v.kind == VarKind::binary && (v.lower < 0.0 || v.upper > 1.0)) {
      throw InvalidInput("binary variable " + v.name + " has bounds outside [0, 1]");
    }
  }
  auto check_terms = [](const std::vector<Term>& terms, const std::string& where) {
    for (const auto& t : terms) {
      if (!std::isfinite(t.coef)) throw InvalidInput("non-finite coefficient in " + where);
    }
  };
  for (const auto& c : constraints_) {
    check_terms(c.terms, c.name);
    if (!std::isfinite(c.rhs)) throw InvalidInput("non-finite right-hand side in " + c.name);
  }
  check_terms(objective_.terms, "objective");
  if (!std::isfinite(objective_.constant)) throw InvalidInput("non-finite objective constant");
}

std::string MilpModel::to_text() const {
  std::ostringstream os;
  os.precision(17);
  auto name = [&](VarId v) -> const std::string& { return variables_[v.index].name; };
  os << "objective " << (objective_.sense == Sense::maximize ? "max" : "min") << ' '
     << objective_.constant;
  for (const auto& t : objective_.terms) os << ' ' << t.coef << ' ' << name(t.var);
  os << '\n';
  for (const auto& v : variables_) {
    os << "var " << v.name << ' ' << (v.kind == VarKind::binary ? "binary" : "continuous") << ' '
       << v.lower << ' ' << v.upper << '\n';
  }
  for (const auto& c : constraints_) {
    os << "con " << c.name;
    for (const auto& t : c.terms) os << ' ' << t.coef << ' ' << name(t.var);
    os << ' '
       << (c.relation == Relation::less_equal      ? "<="
           : c.relation == Relation::greater_equal ? ">="
                                                   : "=")
       << ' ' << c.rhs << '\n';
  }
  return os.str();
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::unbounded:
      return "unbounded";
    case SolveStatus::gap_limit:
      return "gap-limit";
    case SolveStatus::iteration_limit:
      return "iteration-limit";
  }
  return "unknown";
}

namespace {

SolveStatus from_lp(LpStatus st) {
  switch (st) {
    case LpStatus::optimal:
      return SolveStatus::optimal;
    case LpStatus::infeasible:
      return SolveStatus::infeasible;
    case LpStatus::unbounded:
      return SolveStatus::unbounded;
    case LpStatus::iteration_limit:
      return SolveStatus::iteration_limit;
  }
  return SolveStatus::iteration_limit;
}

// Largest violation of a variable bound or constraint at x.
double max_violation(const MilpModel& model, const std::vector<double>& x) {
  double worst = 0.0;
  const auto& vars = model.variables();
  for (std::size_t j = 0; j < vars.size(); ++j) {
    worst = std::max({worst, vars[j].lower - x[j], x[j] - vars[j].upper});
  }
  for (const auto& c : model.constraints()) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * x[t.var.index];
    const double scale = 1.0 + std::abs(c.rhs);
    double v = 0.0;
    if (c.relation != Relation::greater_equal) v = std::max(v, lhs - c.rhs);
    if (c.relation != Relation::less_equal) v = std::max(v, c.rhs - lhs);
    worst = std::max(worst, v / scale);
  }
  return worst;
}

double model_objective(const LpForm& form, double internal) {
  return form.sign * internal + form.constant;
}

}  // namespace

MilpSolution lp_solve(const MilpModel& model) {
  const auto form = make_lp_form(model);
  SimplexTableau tableau(form);
  MilpSolution sol;
  sol.status = from_lp(tableau.solve());
  sol.simplex_iterations = tableau.iterations();
  if (sol.status == SolveStatus::optimal) {
    sol.values = tableau.structural_values();
    sol.objective_value = model_objective(*form, tableau.objective());
    sol.bound = sol.objective_value;
  }
  return sol;
}

namespace {

struct Node {
  double key = 0.0;  // parent's relaxation value (internal minimization)
  long id = 0;
  std::vector<std::pair<int, double>> fixings;
  std::shared_ptr<const SimplexTableau> warm;  // parent's optimal tableau
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.key != b.key) return a.key > b.key;
    return a.id < b.id;
  }
};

constexpr std::size_t kWarmStartBudget = std::size_t{512} << 20;

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& model, const SolveOptions& options)
      : model_(model), options_(options), form_(make_lp_form(model)) {
    const auto& vars = model.variables();
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (vars[j].kind == VarKind::binary) binaries_.push_back(static_cast<int>(j));
    }
  }

  MilpSolution run() {
    const auto start = std::chrono::steady_clock::now();
    MilpSolution sol;

    root_ = std::make_shared<SimplexTableau>(form_);
    const LpStatus root_status = root_->solve();
    sol.simplex_iterations = root_->iterations();
    sol.nodes_explored = 1;
    if (root_status != LpStatus::optimal) {
      sol.status = from_lp(root_status);
      return sol;
    }
    {
      SimplexTableau copy = *root_;
      evaluate(std::move(copy), {});
    }

    SolveStatus status = SolveStatus::optimal;
    while (true) {
      const double bound = global_bound();
      if (options_.record_bound_trace) sol.bound_trace.push_back(model_objective(*form_, bound));
      if (frontier_.empty()) break;
      if (std::isfinite(incumbent_) && incumbent_ - bound <= options_.gap) break;
      if (sol.nodes_explored >= options_.node_limit) {
        status = SolveStatus::iteration_limit;
        break;
      }
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      if (elapsed > options_.time_limit) {
        status = SolveStatus::gap_limit;
        break;
      }

      Node node = frontier_.top();
      frontier_.pop();
      if (node.warm && node.warm.use_count() == 1) warm_bytes_ -= node.warm->memory_bytes();
      if (node.key >= incumbent_ - prune_margin()) {
        pruned_min_ = std::min(pruned_min_, node.key);
        continue;
      }
      ++sol.nodes_explored;

      SimplexTableau tableau = node.warm ? *node.warm : *root_;
      const long before = tableau.iterations();
      if (node.warm) {
        const auto& [var, value] = node.fixings.back();
        tableau.fix_variable(var, value);
      } else {
        for (const auto& [var, value] : node.fixings) tableau.fix_variable(var, value);
      }
      node.warm.reset();
      LpStatus st = tableau.reoptimize();
      sol.simplex_iterations += tableau.iterations() - before;
      if (st == LpStatus::iteration_limit || st == LpStatus::unbounded) {
        tableau = cold_solve(node.fixings, st);
        sol.simplex_iterations += tableau.iterations();
      }
      if (st == LpStatus::infeasible) continue;
      if (st != LpStatus::optimal) throw NumericalError("node relaxation could not be solved");
      evaluate(std::move(tableau), std::move(node.fixings));
    }

    const double bound = global_bound();
    sol.bound = model_objective(*form_, bound);
    if (!std::isfinite(incumbent_)) {
      sol.status = status == SolveStatus::optimal ? SolveStatus::infeasible : status;
      if (sol.status != SolveStatus::infeasible) sol.bound = model_objective(*form_, bound);
      else sol.bound = std::numeric_limits<double>::quiet_NaN();
      return sol;
    }
    sol.status = status;
    sol.values = incumbent_x_;
    sol.objective_value = model_objective(*form_, incumbent_);
    if (max_violation(model_, sol.values) > 1e-6) {
      throw NumericalError("branch-and-bound incumbent violates the model beyond 1e-6");
    }
    return sol;
  }

 private:
  double prune_margin() const { return std::max(options_.gap, 1e-9); }

  double global_bound() const {
    double b = std::min(incumbent_, pruned_min_);
    if (!frontier_.empty()) b = std::min(b, frontier_.top().key);
    return b;
  }

  SimplexTableau cold_solve(const std::vector<std::pair<int, double>>& fixings, LpStatus& st) {
    auto form = std::make_shared<LpForm>(*form_);
    for (const auto& [var, value] : fixings) form->lower[var] = form->upper[var] = value;
    SimplexTableau tableau(form);
    st = tableau.solve();
    return tableau;
  }

  void evaluate(SimplexTableau tableau, std::vector<std::pair<int, double>> fixings) {
    const double z = tableau.objective();
    if (z >= incumbent_ - prune_margin()) {
      pruned_min_ = std::min(pruned_min_, z);
      return;
    }
    std::vector<double> x = tableau.structural_values();
    int branch = -1;
    double best_distance = kInf;
    for (int b : binaries_) {
      const double v = x[b];
      if (std::abs(v - std::round(v)) <= kIntegralityTol) continue;
      const double distance = std::abs(v - 0.5);
      if (distance < best_distance - 1e-12) {
        best_distance = distance;
        branch = b;
      }
    }
    if (branch < 0) {
      for (int b : binaries_) x[b] = std::round(x[b]);
      incumbent_ = z;
      incumbent_x_ = std::move(x);
      return;
    }

    std::shared_ptr<const SimplexTableau> warm;
    const std::size_t bytes = tableau.memory_bytes();
    if (warm_bytes_ + bytes <= kWarmStartBudget) {
      warm = std::make_shared<const SimplexTableau>(std::move(tableau));
      warm_bytes_ += bytes;
    }
    for (double value : {0.0, 1.0}) {
      Node child;
      child.key = z;
      child.id = next_id_++;
      child.fixings = fixings;
      child.fixings.emplace_back(branch, value);
      child.warm = warm;
      frontier_.push(std::move(child));
    }
  }

  const MilpModel& model_;
  const SolveOptions& options_;
  std::shared_ptr<const LpForm> form_;
  std::vector<int> binaries_;
  std::shared_ptr<SimplexTableau> root_;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> frontier_;
  double incumbent_ = kInf;
  double pruned_min_ = kInf;
  std::vector<double> incumbent_x_;
  long next_id_ = 1;
  std::size_t warm_bytes_ = 0;
};

}  // namespace

MilpSolution solve(const MilpModel& model, const SolveOptions& options) {
  if (options.gap < 0.0) throw InvalidInput("gap must be nonnegative");
  if (model.variables().empty()) {
    MilpSolution sol;
    const auto form = make_lp_form(model);
    if (form->empty_row_violated) return sol;
    sol.status = SolveStatus::optimal;
    sol.objective_value = sol.bound = model.objective().constant;
    return sol;
  }
  return BranchAndBound(model, options).run();
}

}  // namespace regret_pricer::milp
