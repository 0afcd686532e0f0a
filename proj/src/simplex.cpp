#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "regret_pricer/errors.hpp"

namespace regret_pricer::milp::detail {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kWeakPivot = 1e-7;
constexpr int kMaxWeakPivots = 25;
constexpr double kFeasTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kProgressTol = 1e-12;
constexpr double kTieTol = 1e-12;

}  // namespace

std::shared_ptr<const LpForm> make_lp_form(const MilpModel& model) {
  model.validate();
  auto form = std::make_shared<LpForm>();
  const auto& vars = model.variables();
  form->cols = static_cast<int>(vars.size());
  for (const auto& v : vars) {
    if (v.kind == VarKind::binary) {
      form->lower.push_back(std::max(v.lower, 0.0));
      form->upper.push_back(std::min(v.upper, 1.0));
    } else {
      form->lower.push_back(v.lower);
      form->upper.push_back(v.upper);
    }
  }
  const auto& obj = model.objective();
  form->sign = obj.sense == Sense::maximize ? -1.0 : 1.0;
  form->constant = obj.constant;
  form->cost.assign(form->cols, 0.0);
  for (const auto& t : obj.terms) form->cost[t.var.index] += form->sign * t.coef;

  std::vector<double> row(form->cols);
  for (const auto& con : model.constraints()) {
    std::fill(row.begin(), row.end(), 0.0);
    for (const auto& t : con.terms) row[t.var.index] += t.coef;
    const bool empty = std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; });
    if (empty) {
      const bool ok = (con.relation == Relation::less_equal && 0.0 <= con.rhs + kConstraintTol) ||
                      (con.relation == Relation::greater_equal && 0.0 >= con.rhs - kConstraintTol) ||
                      (con.relation == Relation::equal && std::abs(con.rhs) <= kConstraintTol);
      if (!ok) form->empty_row_violated = true;
      continue;
    }
    form->a.insert(form->a.end(), row.begin(), row.end());
    form->b.push_back(con.rhs);
    switch (con.relation) {
      case Relation::less_equal:
        form->slack_lower.push_back(0.0);
        form->slack_upper.push_back(kInf);
        break;
      case Relation::greater_equal:
        form->slack_lower.push_back(-kInf);
        form->slack_upper.push_back(0.0);
        break;
      case Relation::equal:
        form->slack_lower.push_back(0.0);
        form->slack_upper.push_back(0.0);
        break;
    }
    ++form->rows;
  }
  return form;
}

SimplexTableau::SimplexTableau(std::shared_ptr<const LpForm> form) : form_(std::move(form)) {
  const LpForm& f = *form_;
  m_ = f.rows;
  n_ = f.cols;

  std::vector<State> structural_state(n_);
  std::vector<double> x(n_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (std::isfinite(f.lower[j])) {
      structural_state[j] = kLower;
      x[j] = f.lower[j];
    } else if (std::isfinite(f.upper[j])) {
      structural_state[j] = kUpper;
      x[j] = f.upper[j];
    } else {
      structural_state[j] = kZero;
    }
  }

  std::vector<double> slack_value(m_);
  std::vector<bool> needs_artificial(m_, false);
  int artificials = 0;
  for (int r = 0; r < m_; ++r) {
    double v = f.b[r];
    for (int j = 0; j < n_; ++j) v -= f.a[static_cast<std::size_t>(r) * n_ + j] * x[j];
    slack_value[r] = v;
    if (v < f.slack_lower[r] - kFeasTol || v > f.slack_upper[r] + kFeasTol) {
      needs_artificial[r] = true;
      ++artificials;
    }
  }

  ncols_ = n_ + m_ + artificials;
  stride_ = ncols_ + 1;
  t_.assign(static_cast<std::size_t>(m_) * stride_, 0.0);
  lo_.assign(ncols_, 0.0);
  up_.assign(ncols_, kInf);
  state_.assign(ncols_, kLower);
  basis_.assign(m_, -1);
  beta_.assign(m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    lo_[j] = f.lower[j];
    up_[j] = f.upper[j];
    state_[j] = structural_state[j];
  }

  int next_artificial = n_ + m_;
  for (int r = 0; r < m_; ++r) {
    for (int j = 0; j < n_; ++j) at(r, j) = f.a[static_cast<std::size_t>(r) * n_ + j];
    const int slack = n_ + r;
    at(r, slack) = 1.0;
    at(r, ncols_) = f.b[r];
    lo_[slack] = f.slack_lower[r];
    up_[slack] = f.slack_upper[r];
    if (!needs_artificial[r]) {
      basis_[r] = slack;
      state_[slack] = kBasic;
      beta_[r] = slack_value[r];
      continue;
    }
    const bool below = slack_value[r] < f.slack_lower[r];
    const double target = below ? f.slack_lower[r] : f.slack_upper[r];
    state_[slack] = below || lo_[slack] == up_[slack] ? kLower : kUpper;
    const double residual = slack_value[r] - target;
    const double sigma = residual < 0.0 ? -1.0 : 1.0;
    if (sigma < 0.0) {
      for (int c = 0; c < stride_; ++c) at(r, c) = -at(r, c);
    }
    const int art = next_artificial++;
    at(r, art) = 1.0;
    basis_[r] = art;
    state_[art] = kBasic;
    beta_[r] = std::abs(residual);
  }
}

double SimplexTableau::nonbasic_value(int c) const {
  switch (state_[c]) {
    case kLower:
      return lo_[c];
    case kUpper:
      return up_[c];
    default:
      return 0.0;
  }
}

void SimplexTableau::set_costs(const std::vector<double>& cost) {
  cost_ = cost;
  d_ = cost;
  for (int r = 0; r < m_; ++r) {
    const double cb = cost_[basis_[r]];
    if (cb == 0.0) continue;
    for (int c = 0; c < ncols_; ++c) d_[c] -= cb * at(r, c);
  }
}

void SimplexTableau::note_pivot_magnitude(double magnitude) {
  if (magnitude < kWeakPivot) {
    if (++weak_pivots_ > kMaxWeakPivots) {
      throw NumericalError("simplex: " + std::to_string(weak_pivots_) +
                           " consecutive pivots below " + std::to_string(kWeakPivot));
    }
  } else {
    weak_pivots_ = 0;
  }
}

void SimplexTableau::pivot(int row, int col) {
  double* pr = &t_[static_cast<std::size_t>(row) * stride_];
  const double inv = 1.0 / pr[col];
  std::vector<int> nz;
  nz.reserve(stride_);
  for (int c = 0; c < stride_; ++c) {
    if (pr[c] != 0.0) {
      pr[c] *= inv;
      nz.push_back(c);
    }
  }
  pr[col] = 1.0;
  for (int r = 0; r < m_; ++r) {
    if (r == row) continue;
    double* ri = &t_[static_cast<std::size_t>(r) * stride_];
    const double factor = ri[col];
    if (factor == 0.0) continue;
    for (int c : nz) ri[c] -= factor * pr[c];
    ri[col] = 0.0;
  }
  const double dfactor = d_[col];
  if (dfactor != 0.0) {
    for (int c : nz) {
      if (c < ncols_) d_[c] -= dfactor * pr[c];
    }
    d_[col] = 0.0;
  }
}

void SimplexTableau::refresh_basic_values() {
  for (int r = 0; r < m_; ++r) {
    double v = at(r, ncols_);
    for (int c = 0; c < ncols_; ++c) {
      if (state_[c] == kBasic) continue;
      const double x = nonbasic_value(c);
      if (x != 0.0) v -= at(r, c) * x;
    }
    beta_[r] = v;
  }
}

LpStatus SimplexTableau::primal() {
  bool bland = false;
  long stall = 0;
  const long stall_limit = 2L * (m_ + ncols_);
  const long max_iterations = 50L * (m_ + ncols_) + 1000;
  for (long it = 0;; ++it) {
    if (it > max_iterations) return LpStatus::iteration_limit;

    int entering = -1;
    double best = 0.0;
    for (int c = 0; c < ncols_; ++c) {
      const State st = state_[c];
      if (st == kBasic || is_fixed(c)) continue;
      const double dj = d_[c];
      double score = 0.0;
      if (st == kLower && dj < -kDualTol) {
        score = -dj;
      } else if (st == kUpper && dj > kDualTol) {
        score = dj;
      } else if (st == kZero && std::abs(dj) > kDualTol) {
        score = std::abs(dj);
      } else {
        continue;
      }
      if (bland) {
        entering = c;
        break;
      }
      if (score > best) {
        best = score;
        entering = c;
      }
    }
    if (entering < 0) return LpStatus::optimal;

    const double dir =
        (state_[entering] == kUpper || (state_[entering] == kZero && d_[entering] > 0.0)) ? -1.0
                                                                                           : 1.0;
    const double flip = (std::isfinite(lo_[entering]) && std::isfinite(up_[entering]))
                            ? up_[entering] - lo_[entering]
                            : kInf;
    int leave = -1;
    bool leave_to_upper = false;
    double min_ratio = kInf;
    double leave_alpha = 0.0;
    for (int r = 0; r < m_; ++r) {
      const double alpha = at(r, entering) * dir;
      if (std::abs(alpha) <= kPivotTol) continue;
      const int bc = basis_[r];
      double ratio;
      bool to_upper;
      if (alpha > 0.0) {
        if (!std::isfinite(lo_[bc])) continue;
        ratio = (beta_[r] - lo_[bc]) / alpha;
        to_upper = false;
      } else {
        if (!std::isfinite(up_[bc])) continue;
        ratio = (up_[bc] - beta_[r]) / -alpha;
        to_upper = true;
      }
      ratio = std::max(ratio, 0.0);
      bool take = leave < 0 || ratio < min_ratio - kTieTol;
      if (!take && ratio <= min_ratio + kTieTol) {
        take = bland ? bc < basis_[leave] : std::abs(alpha) > leave_alpha;
      }
      if (take) {
        leave = r;
        min_ratio = ratio;
        leave_to_upper = to_upper;
        leave_alpha = std::abs(alpha);
      }
    }
    if (leave < 0 && !std::isfinite(flip)) return LpStatus::unbounded;
    ++iterations_;

    const double dj = d_[entering];
    double step;
    if (leave < 0 || flip <= min_ratio) {
      step = flip;
      const double delta = dir * step;
      for (int r = 0; r < m_; ++r) beta_[r] -= at(r, entering) * delta;
      state_[entering] = state_[entering] == kLower ? kUpper : kLower;
    } else {
      step = min_ratio;
      const double delta = dir * step;
      const double entering_value = nonbasic_value(entering) + delta;
      for (int r = 0; r < m_; ++r) beta_[r] -= at(r, entering) * delta;
      const int bc = basis_[leave];
      state_[bc] = (leave_to_upper && !is_fixed(bc)) ? kUpper : kLower;
      note_pivot_magnitude(std::abs(at(leave, entering)));
      pivot(leave, entering);
      basis_[leave] = entering;
      state_[entering] = kBasic;
      beta_[leave] = entering_value;
    }
    if (step * std::abs(dj) > kProgressTol) {
      stall = 0;
    } else if (++stall > stall_limit) {
      bland = true;
    }
  }
}

LpStatus SimplexTableau::dual() {
  bool bland = false;
  long stall = 0;
  const long stall_limit = 2L * (m_ + ncols_);
  const long max_iterations = 50L * (m_ + ncols_) + 1000;
  for (long it = 0;; ++it) {
    if (it > max_iterations) return LpStatus::iteration_limit;

    int leave = -1;
    double worst = 0.0;
    for (int r = 0; r < m_; ++r) {
      const int bc = basis_[r];
      double viol = 0.0;
      if (beta_[r] < lo_[bc] - kFeasTol) {
        viol = lo_[bc] - beta_[r];
      } else if (beta_[r] > up_[bc] + kFeasTol) {
        viol = beta_[r] - up_[bc];
      } else {
        continue;
      }
      if (bland) {
        if (leave < 0 || bc < basis_[leave]) leave = r;
      } else if (viol > worst) {
        worst = viol;
        leave = r;
      }
    }
    if (leave < 0) return LpStatus::optimal;

    const int bc = basis_[leave];
    const bool below = beta_[leave] < lo_[bc];
    const double target = below ? lo_[bc] : up_[bc];
    const double viol = std::abs(beta_[leave] - target);

    int entering = -1;
    double min_ratio = kInf;
    double enter_alpha = 0.0;
    for (int c = 0; c < ncols_; ++c) {
      const State st = state_[c];
      if (st == kBasic || is_fixed(c)) continue;
      const double a = at(leave, c);
      if (std::abs(a) <= kPivotTol) continue;
      const bool ok = below ? ((st == kLower && a < 0.0) || (st == kUpper && a > 0.0) || st == kZero)
                            : ((st == kLower && a > 0.0) || (st == kUpper && a < 0.0) || st == kZero);
      if (!ok) continue;
      const double ratio = std::abs(d_[c]) / std::abs(a);
      bool take = entering < 0 || ratio < min_ratio - kTieTol;
      if (!take && ratio <= min_ratio + kTieTol) {
        take = bland ? c < entering : std::abs(a) > enter_alpha;
      }
      if (take) {
        entering = c;
        min_ratio = ratio;
        enter_alpha = std::abs(a);
      }
    }
    if (entering < 0) return LpStatus::infeasible;
    ++iterations_;

    const double delta = (beta_[leave] - target) / at(leave, entering);
    const double entering_value = nonbasic_value(entering) + delta;
    for (int r = 0; r < m_; ++r) beta_[r] -= at(r, entering) * delta;
    state_[bc] = (below || is_fixed(bc)) ? kLower : kUpper;
    note_pivot_magnitude(std::abs(at(leave, entering)));
    pivot(leave, entering);
    basis_[leave] = entering;
    state_[entering] = kBasic;
    beta_[leave] = entering_value;

    if (min_ratio * viol > kProgressTol) {
      stall = 0;
    } else if (++stall > stall_limit) {
      bland = true;
    }
  }
}

void SimplexTableau::drop_artificials() {
  const int first_art = n_ + m_;
  if (ncols_ == first_art) return;
  for (int r = 0; r < m_; ++r) {
    if (basis_[r] < first_art) continue;
    int best = -1;
    double best_abs = 1e-7;
    for (int c = 0; c < first_art; ++c) {
      if (state_[c] == kBasic) continue;
      const double a = std::abs(at(r, c));
      if (a > best_abs) {
        best_abs = a;
        best = c;
      }
    }
    if (best < 0) continue;  // redundant row: the artificial stays basic at zero
    const double value = nonbasic_value(best);
    const int art = basis_[r];
    pivot(r, best);
    basis_[r] = best;
    state_[best] = kBasic;
    state_[art] = kLower;
    beta_[r] = value;
  }

  // Keep only basic artificials, fixed at zero.
  std::vector<int> keep;
  for (int c = 0; c < ncols_; ++c) {
    if (c < first_art || state_[c] == kBasic) keep.push_back(c);
  }
  std::vector<int> new_index(ncols_, -1);
  for (int i = 0; i < static_cast<int>(keep.size()); ++i) new_index[keep[i]] = i;
  const int new_cols = static_cast<int>(keep.size());
  const int new_stride = new_cols + 1;
  std::vector<double> t(static_cast<std::size_t>(m_) * new_stride);
  for (int r = 0; r < m_; ++r) {
    for (int i = 0; i < new_cols; ++i) {
      t[static_cast<std::size_t>(r) * new_stride + i] = at(r, keep[i]);
    }
    t[static_cast<std::size_t>(r) * new_stride + new_cols] = at(r, ncols_);
  }
  std::vector<double> lo(new_cols), up(new_cols);
  std::vector<State> state(new_cols);
  for (int i = 0; i < new_cols; ++i) {
    const int c = keep[i];
    lo[i] = c < first_art ? lo_[c] : 0.0;
    up[i] = c < first_art ? up_[c] : 0.0;
    state[i] = state_[c];
  }
  for (int& b : basis_) b = new_index[b];
  t_ = std::move(t);
  lo_ = std::move(lo);
  up_ = std::move(up);
  state_ = std::move(state);
  ncols_ = new_cols;
  stride_ = new_stride;
}

LpStatus SimplexTableau::solve() {
  const LpForm& f = *form_;
  if (f.empty_row_violated) return LpStatus::infeasible;
  if (ncols_ > n_ + m_) {
    std::vector<double> phase_one(ncols_, 0.0);
    for (int c = n_ + m_; c < ncols_; ++c) phase_one[c] = 1.0;
    set_costs(phase_one);
    const LpStatus st = primal();
    if (st == LpStatus::iteration_limit) return st;
    refresh_basic_values();
    double infeasibility = 0.0;
    double scale = 1.0;
    for (double v : f.b) scale = std::max(scale, std::abs(v));
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] >= n_ + m_) infeasibility += std::abs(beta_[r]);
    }
    if (infeasibility > 1e-7 * scale) return LpStatus::infeasible;
    drop_artificials();
  }
  std::vector<double> cost(ncols_, 0.0);
  std::copy(f.cost.begin(), f.cost.end(), cost.begin());
  set_costs(cost);
  const LpStatus st = primal();
  refresh_basic_values();
  return st;
}

void SimplexTableau::fix_variable(int var, double value) {
  if (state_[var] == kBasic) {
    lo_[var] = up_[var] = value;
    return;
  }
  const double delta = value - nonbasic_value(var);
  lo_[var] = up_[var] = value;
  state_[var] = kLower;
  if (delta != 0.0) {
    for (int r = 0; r < m_; ++r) beta_[r] -= at(r, var) * delta;
  }
}

LpStatus SimplexTableau::reoptimize() {
  LpStatus st = dual();
  if (st != LpStatus::optimal) return st;
  refresh_basic_values();
  st = primal();
  refresh_basic_values();
  return st;
}

double SimplexTableau::objective() const {
  const auto x = structural_values();
  double z = 0.0;
  for (int j = 0; j < n_; ++j) z += form_->cost[j] * x[j];
  return z;
}

std::vector<double> SimplexTableau::structural_values() const {
  std::vector<double> x(n_);
  for (int j = 0; j < n_; ++j) {
    if (state_[j] != kBasic) x[j] = nonbasic_value(j);
  }
  for (int r = 0; r < m_; ++r) {
    if (basis_[r] < n_) x[basis_[r]] = beta_[r];
  }
  return x;
}

std::size_t SimplexTableau::memory_bytes() const {
  return t_.size() * sizeof(double) +
         (beta_.size() + d_.size() + cost_.size() + lo_.size() + up_.size()) * sizeof(double) +
         basis_.size() * sizeof(int) + state_.size();
}

}  // namespace regret_pricer::milp::detail
