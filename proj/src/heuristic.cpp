#include "regret_pricer/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace regret_pricer::heuristic {
namespace {

constexpr double kAdjustTol = 1e-10;

// Minimum-cost perfect assignment of rows to columns of a square cost
// matrix (potentials method, O(n^3)). Returns column_for_row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> column_for_row(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) column_for_row[p[j] - 1] = j - 1;
  }
  return column_for_row;
}

// Best matching weight between the given buyers and items (equal counts).
double best_weight(const ValuationMatrix& x, const std::vector<int>& buyers,
                   const std::vector<int>& items) {
  const std::size_t n = buyers.size();
  if (n == 0) return 0.0;
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) cost[a][b] = -x(buyers[a], items[b]);
  }
  const auto assignment = hungarian(cost);
  double w = 0.0;
  for (std::size_t a = 0; a < n; ++a) w += x(buyers[a], items[assignment[a]]);
  return w;
}

}  // namespace

const char* to_string(HeuristicStatus status) {
  switch (status) {
    case HeuristicStatus::converged:
      return "converged";
    case HeuristicStatus::not_converged:
      return "not-converged";
    case HeuristicStatus::failed:
      return "failed";
  }
  return "unknown";
}

double matching_weight(const Allocation& q, const ValuationMatrix& x) {
  double w = 0.0;
  for (const auto& [i, j] : q.pairs()) w += x(i, j);
  return w;
}

Allocation max_weight_assignment(const ValuationMatrix& x) {
  const int k = x.k();
  std::vector<int> items(k);
  for (int j = 0; j < k; ++j) items[j] = j;
  std::vector<int> buyers = items;
  double remaining = best_weight(x, buyers, items);
  const double tol = 1e-9 * (1.0 + std::abs(remaining));

  // Fix buyers in order to the smallest item that still admits an optimal
  // completion.
  Allocation result(k);
  for (int i = 0; i < k; ++i) {
    std::vector<int> rest_buyers(buyers.begin() + 1, buyers.end());
    for (std::size_t idx = 0; idx < items.size(); ++idx) {
      std::vector<int> rest_items = items;
      rest_items.erase(rest_items.begin() + static_cast<std::ptrdiff_t>(idx));
      const double w = x(i, items[idx]) + best_weight(x, rest_buyers, rest_items);
      if (w >= remaining - tol) {
        result.assign(i, items[idx]);
        remaining -= x(i, items[idx]);
        items = std::move(rest_items);
        break;
      }
    }
    buyers = std::move(rest_buyers);
  }
  return result;
}

HeuristicResult heuristic_solve(const ValuationMatrix& x, int max_passes) {
  const int k = x.k();
  if (max_passes <= 0) max_passes = 4 * k * k;
  Allocation q = max_weight_assignment(x);
  std::vector<double> price(k);
  std::vector<bool> removed(k, false);
  for (const auto& [i, j] : q.pairs()) price[j] = x(i, j);

  HeuristicResult result;
  bool converged = false;
  int removed_items = 0;
  for (int pass = 1; pass <= max_passes; ++pass) {
    result.passes = pass;
    bool changed = false;
    for (int i = 0; i < k; ++i) {
      const auto own = q.item_of(i);
      if (!own) continue;  // no re-matching of dropped buyers
      const int j0 = *own;
      double matched = x(i, j0) - price[j0];
      double best = matched;
      for (int j = 0; j < k; ++j) {
        if (!removed[j]) best = std::max(best, x(i, j) - price[j]);
      }
      if (best > matched + kAdjustTol) {
        price[j0] -= best - matched;
        matched = x(i, j0) - price[j0];
        changed = true;
      }
      if (price[j0] < -kFeasibilityTol || matched < -kFeasibilityTol) {
        removed[j0] = true;
        q.unassign_buyer(i);
        ++removed_items;
        changed = true;
      }
    }
    if (!changed) {
      converged = true;
      break;
    }
  }

  UtilityVector u(k, 0.0);
  for (const auto& [i, j] : q.pairs()) u[i] = std::max(0.0, x(i, j) - price[j]);
  result.solution = make_pricing_solution(u, q, x);
  result.removed_items = removed_items;
  if (!is_ic_feasible(u, q, x)) {
    result.status = HeuristicStatus::failed;
  } else {
    result.status = converged ? HeuristicStatus::converged : HeuristicStatus::not_converged;
  }
  return result;
}

}  // namespace regret_pricer::heuristic
