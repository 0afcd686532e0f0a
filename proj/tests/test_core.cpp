#include <random>

#include "doctest.h"
#include "regret_pricer/core.hpp"
#include "regret_pricer/errors.hpp"

using namespace regret_pricer;

namespace {

ValuationMatrix vm(std::vector<std::vector<double>> rows) {
  return ValuationMatrix::from_rows(rows);
}

const ValuationMatrix kTwo = vm({{10, 9}, {6, 8}});

}  // namespace

TEST_CASE("valuation matrix invariants") {
  CHECK_THROWS_AS(vm({{1, 2}}), InvalidInput);
  CHECK_THROWS_AS(vm({{-1}}), InvalidInput);
  CHECK_THROWS_AS(vm({{std::numeric_limits<double>::infinity()}}), InvalidInput);
  CHECK(kTwo.k() == 2);
  CHECK(kTwo.column_max(0) == 10);
}

TEST_CASE("interval uncertainty invariants") {
  CHECK_THROWS_AS(IntervalUncertainty(vm({{3}}), vm({{2}})), InvalidInput);
  CHECK_THROWS_AS(IntervalUncertainty(vm({{1}}), vm({{2, 3}, {4, 5}})), InvalidInput);
  CHECK(IntervalUncertainty::degenerate(kTwo).is_degenerate());
}

TEST_CASE("discrete scenario set") {
  CHECK_THROWS_AS(DiscreteScenarioSet({}), InvalidInput);
  CHECK_THROWS_AS(DiscreteScenarioSet({vm({{1}}), kTwo}), InvalidInput);
  CHECK(DiscreteScenarioSet({kTwo, kTwo}).k() == 2);
}

TEST_CASE("allocation is a partial permutation") {
  Allocation q(3);
  q.assign(0, 2);
  CHECK_THROWS(q.assign(1, 2));
  CHECK_THROWS(q.assign(0, 1));
  q.assign(2, 0);
  CHECK(q.size() == 2);
  CHECK(q.buyer_of(2) == 0);
  CHECK_FALSE(q.item_of(1).has_value());
  q.unassign_buyer(0);
  CHECK(q.size() == 1);
  CHECK_THROWS_AS(Allocation::from_matrix({{1, 1}, {0, 0}}), InvalidInput);
  CHECK(Allocation::from_matrix({{0, 1}, {1, 0}}).pairs() ==
        std::vector<std::pair<int, int>>{{0, 1}, {1, 0}});
}

TEST_CASE("partial permutations are enumerated once each") {
  // sum_r C(k,r)^2 r!
  CHECK(enumerate_partial_permutations(1).size() == 2);
  CHECK(enumerate_partial_permutations(2).size() == 7);
  CHECK(enumerate_partial_permutations(3).size() == 34);
  const auto all = enumerate_partial_permutations(3);
  CHECK(all.front().empty());
  for (std::size_t a = 0; a < all.size(); ++a) {
    for (std::size_t b = a + 1; b < all.size(); ++b) CHECK_FALSE(all[a] == all[b]);
  }
}

TEST_CASE("normalize_instance") {
  SUBCASE("already square") {
    RawInstance raw{1, 1, {}, Matrix::from_rows({{5}}), std::nullopt};
    const auto n = normalize_instance(raw);
    CHECK(std::get<ValuationMatrix>(n.data) == vm({{5}}));
    CHECK_FALSE(n.layout.dummy_buyer(0));
    CHECK_FALSE(n.layout.dummy_item(0));
  }
  SUBCASE("demand splitting") {
    RawInstance raw{1, 2, {2}, Matrix::from_rows({{7, 4}}), std::nullopt};
    const auto n = normalize_instance(raw);
    CHECK(std::get<ValuationMatrix>(n.data) == vm({{7, 4}, {7, 4}}));
    CHECK(n.layout.buyer_origin == std::vector<int>{0, 0});
  }
  SUBCASE("dummy item padding") {
    RawInstance raw{3, 2, {}, Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}}), std::nullopt};
    const auto n = normalize_instance(raw);
    const auto& x = std::get<ValuationMatrix>(n.data);
    CHECK(x.k() == 3);
    for (int i = 0; i < 3; ++i) CHECK(x(i, 2) == 0);
    CHECK(n.layout.dummy_item(2));
    CHECK_FALSE(n.layout.dummy_item(1));
  }
  SUBCASE("dummy buyer padding keeps [0,0] intervals") {
    RawInstance raw{1, 2, {}, Matrix::from_rows({{1, 2}}), Matrix::from_rows({{3, 4}})};
    const auto n = normalize_instance(raw);
    const auto& s = std::get<IntervalUncertainty>(n.data);
    CHECK(s.lower()(1, 0) == 0);
    CHECK(s.upper()(1, 1) == 0);
    CHECK(n.layout.dummy_buyer(1));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(normalize_instance({2, 2, {1}, Matrix::from_rows({{1, 2}, {3, 4}}), {}}),
                    InvalidInput);
    CHECK_THROWS_AS(normalize_instance({1, 2, {3}, Matrix::from_rows({{1, 2}}), {}}),
                    InvalidInput);
    CHECK_THROWS_AS(normalize_instance({2, 2, {}, Matrix::from_rows({{1, 2}}), {}}), InvalidInput);
  }
  SUBCASE("idempotent on square unit-demand input") {
    RawInstance raw{2, 2, {}, kTwo.matrix(), std::nullopt};
    const auto once = normalize_instance(raw);
    RawInstance again{2, 2, {}, std::get<ValuationMatrix>(once.data).matrix(), std::nullopt};
    CHECK(std::get<ValuationMatrix>(normalize_instance(again).data) ==
          std::get<ValuationMatrix>(once.data));
  }
}

TEST_CASE("value_under_scenario") {
  CHECK(value_under_scenario({0}, Allocation::identity(1), vm({{5}})) == 5);
  CHECK(value_under_scenario({1, 0}, Allocation::identity(2), kTwo) == 17);
  CHECK(value_under_scenario({0, 0}, Allocation(2), kTwo) == 0);
}

TEST_CASE("is_ic_feasible") {
  CHECK(is_ic_feasible({1, 0}, Allocation::identity(2), kTwo));
  const auto rep = check_ic({0, 0}, Allocation::identity(2), kTwo);
  CHECK_FALSE(rep.feasible);
  CHECK(rep.violation.find("ic(i=1,j=0)") != std::string::npos);
  CHECK(is_ic_feasible({0}, Allocation(1), vm({{7}})));
  // An unmatched buyer cannot hold utility.
  CHECK_FALSE(is_ic_feasible({0, 1}, Allocation::from_pairs(2, {{0, 0}}), kTwo));
  CHECK_FALSE(is_ic_feasible({-1, 0}, Allocation(2), kTwo));
}

TEST_CASE("is_robust_feasible") {
  const IntervalUncertainty k1(vm({{2}}), vm({{5}}));
  CHECK(is_robust_feasible({0}, Allocation::identity(1), k1));
  CHECK(is_robust_feasible({1, 0}, Allocation::identity(2), IntervalUncertainty::degenerate(kTwo)));
  CHECK(is_robust_feasible({0, 0}, Allocation::identity(2),
                           IntervalUncertainty(vm({{5, 0}, {0, 5}}), vm({{6, 4}, {4, 6}}))));
  CHECK_FALSE(is_robust_feasible({0, 0}, Allocation::identity(2),
                                 IntervalUncertainty(vm({{5, 0}, {0, 5}}), vm({{6, 7}, {4, 6}}))));
}

TEST_CASE("degenerate robust feasibility equals ic feasibility") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> val(0, 10), util(0, 6);
  for (int t = 0; t < 200; ++t) {
    Matrix m(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = std::round(val(rng));
    const ValuationMatrix x(m);
    for (const auto& q : enumerate_partial_permutations(2)) {
      UtilityVector u{std::round(util(rng)), std::round(util(rng))};
      CHECK(is_ic_feasible(u, q, x) ==
            is_robust_feasible(u, q, IntervalUncertainty::degenerate(x)));
    }
  }
}

TEST_CASE("envy-freeness of recovered prices by direct enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> val(0, 9), util(0, 5);
  int feasible = 0;
  for (int t = 0; t < 300; ++t) {
    Matrix m(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = val(rng);
    const ValuationMatrix x(m);
    const auto perms = enumerate_partial_permutations(3);
    const auto& q = perms[t % perms.size()];
    UtilityVector u(3, 0.0);
    for (const auto& [i, j] : q.pairs()) u[i] = util(rng);
    if (!is_ic_feasible(u, q, x)) continue;
    ++feasible;
    const auto p = recover_prices(u, q, x);
    for (int i = 0; i < 3; ++i) {
      const auto own = q.item_of(i);
      const double mine = own ? x(i, *own) - p[*own] : 0.0;
      CHECK(mine >= -1e-9);
      for (int j = 0; j < 3; ++j) CHECK(mine >= x(i, j) - p[j] - 1e-9);
    }
  }
  CHECK(feasible > 10);
}

TEST_CASE("robust feasibility implies ic feasibility at every vertex") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> val(0, 8), width(0, 3), util(0, 4);
  int checked = 0;
  for (int t = 0; t < 400; ++t) {
    const int k = 2 + t % 2;
    Matrix lo(k, k), hi(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        lo(i, j) = val(rng);
        hi(i, j) = lo(i, j) + width(rng);
      }
    const IntervalUncertainty s{ValuationMatrix(lo), ValuationMatrix(hi)};
    const auto perms = enumerate_partial_permutations(k);
    const auto& q = perms[t % perms.size()];
    UtilityVector u(k, 0.0);
    for (const auto& [i, j] : q.pairs()) u[i] = util(rng);
    if (!is_robust_feasible(u, q, s)) continue;
    ++checked;
    for (unsigned mask = 0; mask < (1U << (k * k)); ++mask) {
      Matrix x(k, k);
      for (int e = 0; e < k * k; ++e) x(e / k, e % k) = (mask >> e & 1U) ? hi(e / k, e % k) : lo(e / k, e % k);
      CHECK(is_ic_feasible(u, q, ValuationMatrix(x)));
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("recover_prices") {
  CHECK(recover_prices({1, 0}, Allocation::identity(2), kTwo) == std::vector<double>{9, 8});
  CHECK(recover_prices({0}, Allocation::identity(1), vm({{5}})) == std::vector<double>{5});
  CHECK(recover_prices({0, 0}, Allocation::from_pairs(2, {{0, 0}}), vm({{4, 1}, {2, 3}})) ==
        std::vector<double>{4, 4});
  CHECK_THROWS_AS(recover_prices({6}, Allocation::identity(1), vm({{5}})), InfeasibleError);
}

TEST_CASE("regret") {
  CHECK(regret({1, 0}, Allocation::identity(2), kTwo, 17) == 0);
  CHECK(regret({0, 0}, Allocation(2), kTwo, 17) == 17);
  for (double a : {0.5, 3.0, 100.0}) CHECK(regret({0}, Allocation::identity(1), vm({{a}}), a) == 0);
}

TEST_CASE("pricing solution metrics") {
  const auto s = make_pricing_solution({1, 0}, Allocation::identity(2), kTwo);
  CHECK(s.revenue == 17);
  CHECK(s.welfare == 1);
  CHECK(s.sold_count == 2);
  CHECK(s.item_sold == std::vector<bool>{true, true});

  InstanceLayout layout;
  layout.buyer_origin = {0, -1};
  layout.item_origin = {0, 1};
  CHECK(count_sold(Allocation::identity(2), &layout) == 1);
}
