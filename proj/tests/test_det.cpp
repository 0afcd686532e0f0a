#include <random>

#include "doctest.h"
#include "regret_pricer/det.hpp"
#include "regret_pricer/errors.hpp"
#include "regret_pricer/heuristic.hpp"

using namespace regret_pricer;

namespace {

ValuationMatrix vm(std::vector<std::vector<double>> rows) { return ValuationMatrix::from_rows(rows); }

ValuationMatrix random_matrix(std::mt19937_64& rng, int k, double hi, bool integral) {
  std::uniform_real_distribution<double> d(0, hi);
  Matrix m(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = integral ? std::round(d(rng)) : d(rng);
  return ValuationMatrix(m);
}

}  // namespace

TEST_CASE("deterministic model construction counts") {
  for (int k : {1, 2, 3}) {
    Matrix m(k, k, 1.0);
    const auto dm = det::build_deterministic_milp(ValuationMatrix(m));
    CHECK(dm.model.num_binaries() == k * k);
    CHECK(static_cast<int>(dm.model.variables().size()) == k * k + k);
    CHECK(dm.model.count_constraints("ic[") == k * (k - 1));
    CHECK(dm.model.count_constraints("row[") + dm.model.count_constraints("col[") == 2 * k);
  }
}

TEST_CASE("solve_deterministic examples") {
  SUBCASE("single item") {
    const auto r = det::solve_deterministic(vm({{5}})).solution;
    CHECK(r.revenue == doctest::Approx(5));
    CHECK(r.prices[0] == doctest::Approx(5));
    CHECK(r.utilities[0] == doctest::Approx(0));
    CHECK(r.item_sold[0]);
  }
  SUBCASE("two buyers with envy") {
    const auto r = det::solve_deterministic(vm({{10, 9}, {6, 8}})).solution;
    CHECK(r.revenue == doctest::Approx(17));
    CHECK(r.allocation == Allocation::identity(2));
    CHECK(r.utilities[0] == doctest::Approx(1));
    CHECK(r.utilities[1] == doctest::Approx(0));
    CHECK(r.prices[0] == doctest::Approx(9));
    CHECK(r.prices[1] == doctest::Approx(8));
  }
  SUBCASE("no envy across zero off-diagonals") {
    const auto r = det::solve_deterministic(vm({{10, 0}, {0, 8}})).solution;
    CHECK(r.revenue == doctest::Approx(18));
    CHECK(r.prices[0] == doctest::Approx(10));
    CHECK(r.prices[1] == doctest::Approx(8));
  }
  SUBCASE("all-zero valuations sell nothing") {
    const auto r = det::solve_deterministic(vm({{0, 0}, {0, 0}})).solution;
    CHECK(r.revenue == 0);
    CHECK(r.allocation.empty());
  }
}

TEST_CASE("min_utilities_for_allocation") {
  const auto u = det::min_utilities_for_allocation(Allocation::identity(2), vm({{10, 9}, {6, 8}}));
  REQUIRE(u);
  CHECK((*u)[0] == doctest::Approx(1));
  CHECK((*u)[1] == doctest::Approx(0));
  CHECK_FALSE(det::min_utilities_for_allocation(Allocation::identity(2), vm({{0, 10}, {10, 0}})));
  const auto z = det::min_utilities_for_allocation(Allocation(3), vm({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}));
  REQUIRE(z);
  CHECK(*z == UtilityVector{0, 0, 0});
}

TEST_CASE("minimal utilities beat any other feasible utilities") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> bump(0, 3);
  for (int t = 0; t < 100; ++t) {
    const auto x = random_matrix(rng, 3, 10, true);
    for (const auto& q : enumerate_partial_permutations(3)) {
      const auto u = det::supporting_utilities(q, x);
      if (!u) continue;
      CHECK(is_ic_feasible(*u, q, x));
      // Any feasible alternative is componentwise above, so earns no more.
      UtilityVector other = *u;
      for (auto& v : other) v += bump(rng);
      if (is_ic_feasible(other, q, x)) {
        CHECK(value_under_scenario(*u, q, x) >= value_under_scenario(other, q, x) - 1e-9);
      }
    }
  }
}

TEST_CASE("enumeration examples") {
  CHECK(det::solve_deterministic_enumerate(vm({{10, 9}, {6, 8}})).revenue == doctest::Approx(17));
  const auto one = det::solve_deterministic_enumerate(vm({{3.5}}));
  CHECK(one.revenue == 3.5);
  CHECK(one.item_sold[0]);
  const auto zero = det::solve_deterministic_enumerate(vm({{0}}));
  CHECK(zero.revenue == 0);
  CHECK_FALSE(zero.item_sold[0]);
  const auto flat = det::solve_deterministic_enumerate(vm({{4, 4, 4}, {4, 4, 4}, {4, 4, 4}}));
  CHECK(flat.revenue == doctest::Approx(12));
  CHECK(flat.sold_count == 3);
  Matrix big(6, 6, 1.0);
  CHECK_THROWS_AS(det::solve_deterministic_enumerate(ValuationMatrix(big)), CapExceeded);
}

TEST_CASE("MILP and enumeration agree") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 100; ++t) {
    const int k = 1 + t % 4;
    const auto x = random_matrix(rng, k, 20, t % 3 == 0);
    const double milp = det::solve_deterministic(x).solution.revenue;
    const double brute = det::solve_deterministic_enumerate(x).revenue;
    CHECK(milp == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("optimal revenue is below the maximum matching value") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 50; ++t) {
    const auto x = random_matrix(rng, 2 + t % 4, 50, false);
    const double rev = det::solve_deterministic(x).solution.revenue;
    const double mwm = heuristic::matching_weight(heuristic::max_weight_assignment(x), x);
    CHECK(rev <= mwm + 1e-9);
  }
}

TEST_CASE("revenue scales with the valuations") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 20; ++t) {
    const auto x = random_matrix(rng, 3, 10, false);
    Matrix scaled = x.matrix();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) scaled(i, j) *= 2.5;
    const auto a = det::solve_deterministic(x).solution;
    const auto b = det::solve_deterministic(ValuationMatrix(scaled)).solution;
    CHECK(b.revenue == doctest::Approx(2.5 * a.revenue));
    // The scaled optimum's allocation is optimal for the original as well.
    const auto u = det::supporting_utilities(b.allocation, x);
    REQUIRE(u);
    CHECK(value_under_scenario(*u, b.allocation, x) == doctest::Approx(a.revenue));
  }
}

TEST_CASE("solutions are envy-free and revenue equals the sum of prices") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 40; ++t) {
    const auto x = random_matrix(rng, 2 + t % 4, 30, false);
    const auto s = det::solve_deterministic(x).solution;
    CHECK(is_ic_feasible(s.utilities, s.allocation, x));
    double sum = 0;
    for (int j = 0; j < x.k(); ++j)
      if (s.item_sold[j]) sum += s.prices[j];
    CHECK(sum == doctest::Approx(s.revenue));
  }
}
