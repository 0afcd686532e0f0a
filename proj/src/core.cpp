#include "regret_pricer/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "regret_pricer/errors.hpp"

namespace regret_pricer {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw InvalidInput("ragged matrix: row " + std::to_string(i));
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
  return out;
}

namespace {

void check_entries(const Matrix& x, const char* what) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double v = x(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream msg;
        msg << what << "(" << i << "," << j << ") = " << v << " is not a finite nonnegative value";
        throw InvalidInput(msg.str());
      }
    }
  }
}

void check_dims(const UtilityVector& u, const Allocation& q, int k) {
  if (static_cast<int>(u.size()) != k || q.k() != k) {
    throw InvalidInput("dimension mismatch: |u|=" + std::to_string(u.size()) +
                       ", allocation k=" + std::to_string(q.k()) + ", matrix k=" +
                       std::to_string(k));
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}

// Shared core of the point and robust checks: envy rows use
// envy_value(j, i, k) - own_value(i, k) as the right-hand side.
template <typename EnvyRhs>
FeasibilityReport check_difference_constraints(const UtilityVector& u, const Allocation& q,
                                               const ValuationMatrix& price_ref, double tol,
                                               EnvyRhs rhs) {
  const int k = q.k();
  for (int i = 0; i < k; ++i) {
    if (u[i] < -tol) return {false, "ir(" + std::to_string(i) + "): u=" + fmt(u[i]) + " < 0"};
    const auto item = q.item_of(i);
    if (!item) {
      if (u[i] > tol) {
        return {false, "unmatched(" + std::to_string(i) + "): u=" + fmt(u[i]) +
                           " but an empty bundle has zero utility"};
      }
    } else if (u[i] > price_ref(i, *item) + tol) {
      return {false, "price(" + std::to_string(*item) + "): negative price " +
                         fmt(price_ref(i, *item) - u[i])};
    }
  }
  for (int i = 0; i < k; ++i) {
    const auto item = q.item_of(i);
    if (!item) continue;  // every right-hand side in row i is zero; u_j >= u_i follows from above
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      const double need = rhs(i, j, *item);
      if (u[j] - u[i] < need - tol) {
        return {false, "ic(i=" + std::to_string(i) + ",j=" + std::to_string(j) +
                           "): u_j - u_i = " + fmt(u[j] - u[i]) + " < " + fmt(need)};
      }
    }
  }
  return {};
}

}  // namespace

ValuationMatrix::ValuationMatrix(Matrix x) : x_(std::move(x)) {
  if (x_.rows() == 0 || x_.rows() != x_.cols()) {
    throw InvalidInput("valuation matrix must be square and nonempty, got " +
                       std::to_string(x_.rows()) + "x" + std::to_string(x_.cols()));
  }
  check_entries(x_, "x");
}

ValuationMatrix ValuationMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  return ValuationMatrix(Matrix::from_rows(rows));
}

double ValuationMatrix::column_max(int item) const {
  double best = 0.0;
  for (int i = 0; i < k(); ++i) best = std::max(best, x_(i, item));
  return best;
}

IntervalUncertainty::IntervalUncertainty(ValuationMatrix lower, ValuationMatrix upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.k() != upper_.k()) throw InvalidInput("interval bounds have different sizes");
  for (int i = 0; i < k(); ++i) {
    for (int j = 0; j < k(); ++j) {
      if (lower_(i, j) > upper_(i, j)) {
        throw InvalidInput("lower(" + std::to_string(i) + "," + std::to_string(j) +
                           ") exceeds upper bound");
      }
    }
  }
}

IntervalUncertainty IntervalUncertainty::degenerate(const ValuationMatrix& x) { return {x, x}; }

DiscreteScenarioSet::DiscreteScenarioSet(std::vector<ValuationMatrix> scenarios)
    : scenarios_(std::move(scenarios)) {
  if (scenarios_.empty()) throw InvalidInput("discrete scenario set is empty");
  for (const auto& s : scenarios_) {
    if (s.k() != scenarios_.front().k()) throw InvalidInput("scenarios differ in dimension");
  }
}

Allocation::Allocation(int k) : item_of_buyer_(k, -1), buyer_of_item_(k, -1) {
  if (k < 0) throw InvalidInput("negative allocation size");
}

Allocation Allocation::from_matrix(const std::vector<std::vector<int>>& q) {
  const int k = static_cast<int>(q.size());
  Allocation a(k);
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(q[i].size()) != k) throw InvalidInput("allocation matrix is not square");
    for (int j = 0; j < k; ++j) {
      if (q[i][j] != 0 && q[i][j] != 1) throw InvalidInput("allocation entries must be 0 or 1");
      if (q[i][j] == 1) a.assign(i, j);
    }
  }
  return a;
}

Allocation Allocation::from_pairs(int k, const std::vector<std::pair<int, int>>& pairs) {
  Allocation a(k);
  for (const auto& [i, j] : pairs) a.assign(i, j);
  return a;
}

Allocation Allocation::identity(int k) {
  Allocation a(k);
  for (int i = 0; i < k; ++i) a.assign(i, i);
  return a;
}

std::optional<int> Allocation::item_of(int buyer) const {
  const int j = item_of_buyer_[buyer];
  return j < 0 ? std::nullopt : std::optional<int>(j);
}

std::optional<int> Allocation::buyer_of(int item) const {
  const int i = buyer_of_item_[item];
  return i < 0 ? std::nullopt : std::optional<int>(i);
}

int Allocation::size() const {
  return static_cast<int>(std::count_if(item_of_buyer_.begin(), item_of_buyer_.end(),
                                        [](int j) { return j >= 0; }));
}

void Allocation::assign(int buyer, int item) {
  if (buyer < 0 || buyer >= k() || item < 0 || item >= k()) {
    throw InvalidInput("allocation pair (" + std::to_string(buyer) + "," + std::to_string(item) +
                       ") out of range");
  }
  if (item_of_buyer_[buyer] >= 0) {
    throw InvalidInput("buyer " + std::to_string(buyer) + " already holds an item");
  }
  if (buyer_of_item_[item] >= 0) {
    throw InvalidInput("item " + std::to_string(item) + " is already allocated");
  }
  item_of_buyer_[buyer] = item;
  buyer_of_item_[item] = buyer;
}

void Allocation::unassign_buyer(int buyer) {
  const int j = item_of_buyer_[buyer];
  if (j < 0) return;
  buyer_of_item_[j] = -1;
  item_of_buyer_[buyer] = -1;
}

std::vector<std::pair<int, int>> Allocation::pairs() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < k(); ++i) {
    if (item_of_buyer_[i] >= 0) out.emplace_back(i, item_of_buyer_[i]);
  }
  return out;
}

std::vector<std::vector<int>> Allocation::to_matrix() const {
  std::vector<std::vector<int>> q(k(), std::vector<int>(k(), 0));
  for (const auto& [i, j] : pairs()) q[i][j] = 1;
  return q;
}

bool pairs_less(const Allocation& a, const Allocation& b) { return a.pairs() < b.pairs(); }

namespace {

void extend_partial(int k, int buyer, int size, Allocation& current, std::vector<bool>& used,
                    std::vector<Allocation>& out) {
  if (size == 0) {
    out.push_back(current);
    return;
  }
  if (k - buyer < size) return;
  for (int i = buyer; i < k; ++i) {
    if (k - i < size) break;
    for (int j = 0; j < k; ++j) {
      if (used[j]) continue;
      used[j] = true;
      current.assign(i, j);
      extend_partial(k, i + 1, size - 1, current, used, out);
      current.unassign_buyer(i);
      used[j] = false;
    }
  }
}

}  // namespace

std::vector<Allocation> enumerate_partial_permutations(int k) {
  std::vector<Allocation> out;
  Allocation current(k);
  std::vector<bool> used(k, false);
  for (int size = 0; size <= k; ++size) extend_partial(k, 0, size, current, used, out);
  return out;
}

InstanceLayout InstanceLayout::square(int k) {
  InstanceLayout layout;
  layout.n_buyers = k;
  layout.m_items = k;
  for (int i = 0; i < k; ++i) {
    layout.buyer_origin.push_back(i);
    layout.item_origin.push_back(i);
  }
  return layout;
}

NormalizedInstance normalize_instance(const RawInstance& raw) {
  if (raw.n_buyers <= 0 || raw.m_items <= 0) {
    throw InvalidInput("instance needs at least one buyer and one item");
  }
  auto check_shape = [&](const Matrix& m, const char* what) {
    if (static_cast<int>(m.rows()) != raw.n_buyers || static_cast<int>(m.cols()) != raw.m_items) {
      throw InvalidInput(std::string(what) + " has shape " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected " + std::to_string(raw.n_buyers) +
                         "x" + std::to_string(raw.m_items));
    }
    check_entries(m, what);
  };
  check_shape(raw.lower, raw.upper ? "lower" : "valuations");
  if (raw.upper) check_shape(*raw.upper, "upper");

  std::vector<int> demands = raw.demands;
  if (demands.empty()) demands.assign(raw.n_buyers, 1);
  if (static_cast<int>(demands.size()) != raw.n_buyers) {
    throw InvalidInput("demands has " + std::to_string(demands.size()) + " entries for " +
                       std::to_string(raw.n_buyers) + " buyers");
  }
  for (int i = 0; i < raw.n_buyers; ++i) {
    if (demands[i] < 1 || demands[i] > raw.m_items) {
      throw InvalidInput("demand of buyer " + std::to_string(i) + " must lie in [1, items]");
    }
  }

  std::vector<int> row_source;
  for (int i = 0; i < raw.n_buyers; ++i) row_source.insert(row_source.end(), demands[i], i);
  const int n_split = static_cast<int>(row_source.size());
  const int k = std::max(n_split, raw.m_items);

  InstanceLayout layout;
  layout.n_buyers = raw.n_buyers;
  layout.m_items = raw.m_items;
  layout.buyer_origin.assign(k, -1);
  layout.item_origin.assign(k, -1);
  for (int i = 0; i < n_split; ++i) layout.buyer_origin[i] = row_source[i];
  for (int j = 0; j < raw.m_items; ++j) layout.item_origin[j] = j;

  auto square = [&](const Matrix& m) {
    Matrix out(k, k, 0.0);
    for (int i = 0; i < n_split; ++i) {
      for (int j = 0; j < raw.m_items; ++j) out(i, j) = m(row_source[i], j);
    }
    return ValuationMatrix(std::move(out));
  };

  NormalizedInstance result{square(raw.lower), std::move(layout)};
  if (raw.upper) {
    result.data = IntervalUncertainty(square(raw.lower), square(*raw.upper));
  }
  return result;
}

double value_under_scenario(const UtilityVector& u, const Allocation& q,
                            const ValuationMatrix& x) {
  check_dims(u, q, x.k());
  double value = 0.0;
  for (int i = 0; i < q.k(); ++i) {
    if (const auto j = q.item_of(i)) value += x(i, *j);
    value -= u[i];
  }
  return value;
}

FeasibilityReport check_ic(const UtilityVector& u, const Allocation& q, const ValuationMatrix& x,
                           double tol) {
  check_dims(u, q, x.k());
  return check_difference_constraints(
      u, q, x, tol, [&](int i, int j, int item) { return x(j, item) - x(i, item); });
}

bool is_ic_feasible(const UtilityVector& u, const Allocation& q, const ValuationMatrix& x,
                    double tol) {
  return check_ic(u, q, x, tol).feasible;
}

FeasibilityReport check_robust(const UtilityVector& u, const Allocation& q,
                               const IntervalUncertainty& s, double tol) {
  check_dims(u, q, s.k());
  const auto& lo = s.lower();
  const auto& hi = s.upper();
  return check_difference_constraints(
      u, q, lo, tol, [&](int i, int j, int item) { return hi(j, item) - lo(i, item); });
}

bool is_robust_feasible(const UtilityVector& u, const Allocation& q, const IntervalUncertainty& s,
                        double tol) {
  return check_robust(u, q, s, tol).feasible;
}

double unsold_price(const ValuationMatrix& x, int item) { return 1.0 + x.column_max(item); }

std::vector<double> recover_prices(const UtilityVector& u, const Allocation& q,
                                   const ValuationMatrix& x_ref) {
  return recover_prices(u, q, x_ref, x_ref);
}

std::vector<double> recover_prices(const UtilityVector& u, const Allocation& q,
                                   const ValuationMatrix& x_ref,
                                   const ValuationMatrix& sentinel_source) {
  check_dims(u, q, x_ref.k());
  std::vector<double> p(q.k());
  for (int j = 0; j < q.k(); ++j) {
    const auto i = q.buyer_of(j);
    if (!i) {
      p[j] = unsold_price(sentinel_source, j);
      continue;
    }
    const double price = x_ref(*i, j) - u[*i];
    if (price < -kFeasibilityTol) {
      throw InfeasibleError("recovered price of item " + std::to_string(j) + " is negative (" +
                            fmt(price) + ")");
    }
    p[j] = std::max(price, 0.0);
  }
  return p;
}

double regret(const UtilityVector& u, const Allocation& q, const ValuationMatrix& x,
              double opt_value) {
  return opt_value - value_under_scenario(u, q, x);
}

int count_sold(const Allocation& q, const InstanceLayout* layout) {
  int sold = 0;
  for (const auto& [i, j] : q.pairs()) {
    if (layout && (layout->dummy_buyer(i) || layout->dummy_item(j))) continue;
    ++sold;
  }
  return sold;
}

PricingSolution make_pricing_solution(const UtilityVector& u, const Allocation& q,
                                      const ValuationMatrix& x_ref) {
  return make_pricing_solution(u, q, x_ref, x_ref);
}

PricingSolution make_pricing_solution(const UtilityVector& u, const Allocation& q,
                                      const ValuationMatrix& x_ref,
                                      const ValuationMatrix& sentinel_source) {
  PricingSolution s;
  s.allocation = q;
  s.utilities = u;
  s.prices = recover_prices(u, q, x_ref, sentinel_source);
  s.item_sold.assign(q.k(), false);
  for (int j = 0; j < q.k(); ++j) {
    if (q.buyer_of(j)) {
      s.item_sold[j] = true;
      s.revenue += s.prices[j];
    }
  }
  for (double ui : u) s.welfare += ui;
  s.sold_count = count_sold(q);
  return s;
}

}  // namespace regret_pricer
