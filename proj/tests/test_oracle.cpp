#include <random>

#include "doctest.h"
#include "regret_pricer/det.hpp"
#include "regret_pricer/errors.hpp"
#include "regret_pricer/oracle.hpp"
#include "regret_pricer/robust.hpp"

using namespace regret_pricer;

namespace {

ValuationMatrix vm(std::vector<std::vector<double>> rows) { return ValuationMatrix::from_rows(rows); }

IntervalUncertainty random_interval(std::mt19937_64& rng, int k, double lo_max, double width) {
  std::uniform_real_distribution<double> lo(1, lo_max), w(0, width);
  Matrix a(k, k), b(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      a(i, j) = lo(rng);
      b(i, j) = a(i, j) + w(rng);
    }
  return IntervalUncertainty(ValuationMatrix(a), ValuationMatrix(b));
}

}  // namespace

TEST_CASE("vertex enumeration") {
  const auto one = oracle::enumerate_vertex_scenarios(IntervalUncertainty(vm({{2}}), vm({{5}})));
  REQUIRE(one.size() == 2);
  CHECK(one[0] == vm({{2}}));
  CHECK(one[1] == vm({{5}}));
  CHECK(oracle::enumerate_vertex_scenarios(IntervalUncertainty::degenerate(vm({{1, 2}, {3, 4}})))
            .size() == 1);
  const IntervalUncertainty s(vm({{1, 2}, {3, 4}}), vm({{2, 3}, {4, 5}}));
  const auto all = oracle::enumerate_vertex_scenarios(s);
  REQUIRE(all.size() == 16);
  // Bit 0 is entry (0,0), bit 3 is entry (1,1).
  CHECK(all[1] == vm({{2, 2}, {3, 4}}));
  CHECK(all[8] == vm({{1, 2}, {3, 5}}));
  CHECK(all[15] == s.upper());

  Matrix lo(5, 5, 0.0), hi(5, 5, 1.0);
  CHECK_THROWS_AS(
      oracle::enumerate_vertex_scenarios(IntervalUncertainty(ValuationMatrix(lo), ValuationMatrix(hi))),
      CapExceeded);
}

TEST_CASE("brute_force_robust examples") {
  const auto k1 = oracle::brute_force_robust(IntervalUncertainty(vm({{2}}), vm({{5}})));
  CHECK(k1.regret == doctest::Approx(0));
  CHECK(k1.solution.item_sold[0]);

  const auto x = vm({{10, 9}, {6, 8}});
  const auto d = oracle::brute_force_robust(IntervalUncertainty::degenerate(x));
  CHECK(d.regret == doctest::Approx(0));
  CHECK(d.solution.revenue == doctest::Approx(17));

  Matrix big(4, 4, 1.0);
  CHECK_THROWS_AS(oracle::brute_force_robust(IntervalUncertainty::degenerate(ValuationMatrix(big))),
                  CapExceeded);
}

TEST_CASE("oracle regret matches exact evaluation of its own candidate") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto s = random_interval(rng, 2 + t % 2, 20, 5);
    const auto r = oracle::brute_force_robust(s);
    CHECK(is_robust_feasible(r.solution.utilities, r.solution.allocation, s));
    CHECK(robust::evaluate_regret_exact(r.solution.utilities, r.solution.allocation, s) ==
          doctest::Approx(r.regret).epsilon(1e-9));
  }
}

TEST_CASE("oracle is minimal over random robust-feasible candidates") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> extra(0, 4);
  for (int t = 0; t < 6; ++t) {
    const auto s = random_interval(rng, 2 + t % 2, 15, 4);
    const double best = oracle::brute_force_robust(s).regret;
    const auto perms = enumerate_partial_permutations(s.k());
    int tried = 0;
    for (int c = 0; c < 400 && tried < 100; ++c) {
      const auto& q = perms[rng() % perms.size()];
      UtilityVector u(s.k(), 0.0);
      for (const auto& [i, j] : q.pairs()) u[i] = extra(rng) * s.lower()(i, j) / 4;
      if (!is_robust_feasible(u, q, s)) continue;
      ++tried;
      CHECK(best <= robust::evaluate_regret_exact(u, q, s) + 1e-9);
    }
    CHECK(tried > 0);
  }
}

TEST_CASE("oracle regret is invariant under buyer permutation") {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 10; ++t) {
    const auto s = random_interval(rng, 3, 20, 5);
    Matrix lo(3, 3), hi(3, 3);
    const int perm[3] = {2, 0, 1};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        lo(i, j) = s.lower()(perm[i], j);
        hi(i, j) = s.upper()(perm[i], j);
      }
    const IntervalUncertainty p{ValuationMatrix(lo), ValuationMatrix(hi)};
    CHECK(oracle::brute_force_robust(p).regret ==
          doctest::Approx(oracle::brute_force_robust(s).regret).epsilon(1e-9));
  }
}

TEST_CASE("a dummy buyer and item leave the optimal regret unchanged") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 10; ++t) {
    const auto s = random_interval(rng, 2, 20, 5);
    Matrix lo(3, 3, 0.0), hi(3, 3, 0.0);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        lo(i, j) = s.lower()(i, j);
        hi(i, j) = s.upper()(i, j);
      }
    const IntervalUncertainty padded{ValuationMatrix(lo), ValuationMatrix(hi)};
    CHECK(oracle::brute_force_robust(padded).regret ==
          doctest::Approx(oracle::brute_force_robust(s).regret).epsilon(1e-9));
  }
}

TEST_CASE("regret_under_discrete_set") {
  const auto x = vm({{10, 9}, {6, 8}});
  const UtilityVector u{1, 0};
  const auto q = Allocation::identity(2);
  CHECK(oracle::regret_under_discrete_set(u, q, DiscreteScenarioSet({x})) == doctest::Approx(0));
  CHECK(oracle::regret_under_discrete_set({0, 0}, Allocation(2), DiscreteScenarioSet({x, x})) ==
        doctest::Approx(17));
  CHECK(oracle::regret_under_discrete_set({0}, Allocation::identity(1),
                                          DiscreteScenarioSet({vm({{2}}), vm({{5}})})) ==
        doctest::Approx(0));
  try {
    oracle::regret_under_discrete_set(u, q, DiscreteScenarioSet({x, vm({{10, 12}, {6, 8}})}));
    FAIL("expected an infeasibility error");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("scenario 1") != std::string::npos);
  }
}
