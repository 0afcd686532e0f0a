#pragma once

// Dense-tableau bounded-variable simplex used by the MILP driver. Not part
// of the public interface.

#include <cstddef>
#include <memory>
#include <vector>

#include "regret_pricer/milp.hpp"

namespace regret_pricer::milp::detail {

// Minimization form of a MilpModel: rows A x + s = b, one slack per row with
// bounds [0, inf) for <=, (-inf, 0] for >=, [0, 0] for =.
struct LpForm {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // rows x cols, row-major
  std::vector<double> b;
  std::vector<double> slack_lower;
  std::vector<double> slack_upper;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> cost;
  double sign = 1.0;        // +1 for minimize, -1 for maximize
  double constant = 0.0;    // objective constant, model sense
  bool empty_row_violated = false;
};

// Binaries are relaxed to their [0, 1] box. Rows without coefficients are
// dropped after checking 0 <rel> rhs.
std::shared_ptr<const LpForm> make_lp_form(const MilpModel& model);

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

class SimplexTableau {
 public:
  explicit SimplexTableau(std::shared_ptr<const LpForm> form);

  // Two-phase primal simplex from the slack basis.
  LpStatus solve();

  // Fixes a structural variable at value while keeping the current basis;
  // follow with reoptimize().
  void fix_variable(int var, double value);

  // Dual simplex from a dual-feasible basis, then a primal clean-up pass.
  LpStatus reoptimize();

  // Minimization objective without the constant.
  double objective() const;
  std::vector<double> structural_values() const;
  long iterations() const { return iterations_; }
  std::size_t memory_bytes() const;

 private:
  enum State : unsigned char { kBasic, kLower, kUpper, kZero };

  double& at(int r, int c) { return t_[static_cast<std::size_t>(r) * stride_ + c]; }
  double at(int r, int c) const { return t_[static_cast<std::size_t>(r) * stride_ + c]; }
  double nonbasic_value(int c) const;
  bool is_fixed(int c) const { return lo_[c] == up_[c]; }

  void set_costs(const std::vector<double>& cost);
  void pivot(int row, int col);
  void refresh_basic_values();
  LpStatus primal();
  LpStatus dual();
  void drop_artificials();
  void note_pivot_magnitude(double magnitude);

  std::shared_ptr<const LpForm> form_;
  int m_ = 0;
  int n_ = 0;       // structural columns
  int ncols_ = 0;   // structural + slack + artificial
  int stride_ = 0;  // ncols_ + 1; the last column holds B^-1 b
  std::vector<double> t_;
  std::vector<double> beta_;
  std::vector<double> d_;
  std::vector<double> cost_;
  std::vector<double> lo_;
  std::vector<double> up_;
  std::vector<int> basis_;
  std::vector<State> state_;
  long iterations_ = 0;
  int weak_pivots_ = 0;
};

}  // namespace regret_pricer::milp::detail
