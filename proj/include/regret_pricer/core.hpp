#pragma once

// Domain types for unit-demand item pricing: valuation profiles, interval
// uncertainty sets, allocations, and the feasibility predicates that tie
// utilities and allocations to envy-free posted prices.
//
// Indexing is buyer-major throughout: x(i, j) is buyer i's valuation of item j.

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "regret_pricer/matrix.hpp"

namespace regret_pricer {

inline constexpr double kFeasibilityTol = 1e-9;

// One concrete K x K type profile. Square, finite, nonnegative.
class ValuationMatrix {
 public:
  ValuationMatrix() = default;
  explicit ValuationMatrix(Matrix x);
  static ValuationMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int k() const { return static_cast<int>(x_.rows()); }
  double operator()(int buyer, int item) const { return x_(buyer, item); }
  const Matrix& matrix() const { return x_; }
  double column_max(int item) const;

  friend bool operator==(const ValuationMatrix&, const ValuationMatrix&) = default;

 private:
  Matrix x_;
};

// Per-entry valuation bounds [lower, upper].
class IntervalUncertainty {
 public:
  IntervalUncertainty() = default;
  IntervalUncertainty(ValuationMatrix lower, ValuationMatrix upper);
  // lower == upper == x.
  static IntervalUncertainty degenerate(const ValuationMatrix& x);

  int k() const { return lower_.k(); }
  const ValuationMatrix& lower() const { return lower_; }
  const ValuationMatrix& upper() const { return upper_; }
  bool is_degenerate() const { return lower_ == upper_; }

  friend bool operator==(const IntervalUncertainty&, const IntervalUncertainty&) = default;

 private:
  ValuationMatrix lower_;
  ValuationMatrix upper_;
};

class DiscreteScenarioSet {
 public:
  explicit DiscreteScenarioSet(std::vector<ValuationMatrix> scenarios);
  int k() const { return scenarios_.front().k(); }
  const std::vector<ValuationMatrix>& scenarios() const { return scenarios_; }

 private:
  std::vector<ValuationMatrix> scenarios_;
};

// Partial permutation: every buyer holds at most one item and every item
// goes to at most one buyer. Stored as the two inverse maps, so the
// invariant cannot be broken after construction.
class Allocation {
 public:
  Allocation() = default;
  explicit Allocation(int k);

  // Rejects non-binary entries and row/column sums above one.
  static Allocation from_matrix(const std::vector<std::vector<int>>& q);
  static Allocation from_pairs(int k, const std::vector<std::pair<int, int>>& pairs);
  static Allocation identity(int k);

  int k() const { return static_cast<int>(item_of_buyer_.size()); }
  bool operator()(int buyer, int item) const { return item_of_buyer_[buyer] == item; }
  std::optional<int> item_of(int buyer) const;
  std::optional<int> buyer_of(int item) const;
  int size() const;
  bool empty() const { return size() == 0; }

  // Throws InvalidInput if buyer or item is already taken.
  void assign(int buyer, int item);
  void unassign_buyer(int buyer);

  // Matched (buyer, item) pairs in increasing buyer order.
  std::vector<std::pair<int, int>> pairs() const;
  std::vector<std::vector<int>> to_matrix() const;

  friend bool operator==(const Allocation&, const Allocation&) = default;

 private:
  std::vector<int> item_of_buyer_;
  std::vector<int> buyer_of_item_;
};

// Lexicographic order of the sorted matched-pair lists.
bool pairs_less(const Allocation& a, const Allocation& b);

// Every partial permutation of a k x k grid: empty first, then by increasing
// size, lexicographic by pairs within a size.
std::vector<Allocation> enumerate_partial_permutations(int k);

using UtilityVector = std::vector<double>;

struct PricingSolution {
  Allocation allocation;
  UtilityVector utilities;
  // Unsold items carry a sentinel above every buyer's valuation.
  std::vector<double> prices;
  std::vector<bool> item_sold;
  double revenue = 0.0;
  double welfare = 0.0;
  int sold_count = 0;
};

// Where each row/column of a squared instance came from. Dummy rows and
// columns map to -1.
struct InstanceLayout {
  int n_buyers = 0;
  int m_items = 0;
  std::vector<int> buyer_origin;
  std::vector<int> item_origin;

  int k() const { return static_cast<int>(buyer_origin.size()); }
  bool dummy_buyer(int i) const { return buyer_origin[i] < 0; }
  bool dummy_item(int j) const { return item_origin[j] < 0; }
  static InstanceLayout square(int k);
};

// Instance as supplied by the user: N x M, possibly multi-unit demands.
struct RawInstance {
  int n_buyers = 0;
  int m_items = 0;
  std::vector<int> demands;  // empty means all ones
  Matrix lower;              // point valuations when upper is absent
  std::optional<Matrix> upper;
};

struct NormalizedInstance {
  std::variant<ValuationMatrix, IntervalUncertainty> data;
  InstanceLayout layout;

  bool is_interval() const { return std::holds_alternative<IntervalUncertainty>(data); }
  int k() const { return layout.k(); }
};

// Splits multi-unit buyers into identical unit-demand copies, then pads with
// zero rows (dummy buyers) or zero columns (dummy items) to K = max(M, N').
NormalizedInstance normalize_instance(const RawInstance& raw);

// Sum_i (Sum_j q_ij x_ij - u_i).
double value_under_scenario(const UtilityVector& u, const Allocation& q, const ValuationMatrix& x);

struct FeasibilityReport {
  bool feasible = true;
  std::string violation;  // names the first violated constraint
  explicit operator bool() const { return feasible; }
};

// Envy-freeness u_j - u_i >= Sum_k q_ik (x_jk - x_ik) for i != j, u >= 0,
// zero utility for unmatched buyers, and nonnegative implied prices.
FeasibilityReport check_ic(const UtilityVector& u, const Allocation& q, const ValuationMatrix& x,
                           double tol = kFeasibilityTol);
bool is_ic_feasible(const UtilityVector& u, const Allocation& q, const ValuationMatrix& x,
                    double tol = kFeasibilityTol);

// Scenario-independent version: u_j - u_i >= Sum_k q_ik (upper_jk - lower_ik)
// for i != j, with prices implied at the lower bounds.
FeasibilityReport check_robust(const UtilityVector& u, const Allocation& q,
                               const IntervalUncertainty& s, double tol = kFeasibilityTol);
bool is_robust_feasible(const UtilityVector& u, const Allocation& q, const IntervalUncertainty& s,
                        double tol = kFeasibilityTol);

// 1 + the largest valuation of the item: no buyer gains from buying it.
double unsold_price(const ValuationMatrix& x, int item);

// p_j = x_ij - u_i for sold items, unsold_price(sentinel_source, j) for the
// rest. Throws InfeasibleError on a negative price beyond tolerance.
std::vector<double> recover_prices(const UtilityVector& u, const Allocation& q,
                                   const ValuationMatrix& x_ref);
std::vector<double> recover_prices(const UtilityVector& u, const Allocation& q,
                                   const ValuationMatrix& x_ref,
                                   const ValuationMatrix& sentinel_source);

double regret(const UtilityVector& u, const Allocation& q, const ValuationMatrix& x,
              double opt_value);

// Pairs that involve a dummy row or column are not counted as sales.
int count_sold(const Allocation& q, const InstanceLayout* layout = nullptr);

PricingSolution make_pricing_solution(const UtilityVector& u, const Allocation& q,
                                      const ValuationMatrix& x_ref);
PricingSolution make_pricing_solution(const UtilityVector& u, const Allocation& q,
                                      const ValuationMatrix& x_ref,
                                      const ValuationMatrix& sentinel_source);

}  // namespace regret_pricer
