#include "doctest.h"
#include "regret_pricer/bench.hpp"
#include "regret_pricer/errors.hpp"

using namespace regret_pricer;

TEST_CASE("counter rng matches reference SplitMix64") {
  // Reference outputs of SplitMix64 started from state 0.
  const bench::CounterRng rng(0);
  CHECK(rng.bits(0) == 0xE220A8397B1DCDAFULL);
  CHECK(rng.bits(1) == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.bits(2) == 0x06C45D188009454FULL);
  for (std::uint64_t n = 0; n < 1000; ++n) {
    const double u = rng.uniform(n);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("generate_instance") {
  SUBCASE("zero width gives degenerate intervals") {
    CHECK(bench::generate_instance({10, 500, 0, 4, 3}).is_degenerate());
  }
  SUBCASE("same seed, same instance; different seed, different instance") {
    const bench::GeneratorParams p{10, 500, 30, 5, 42};
    CHECK(bench::generate_instance(p) == bench::generate_instance(p));
    auto q = p;
    q.seed = 43;
    CHECK_FALSE(bench::generate_instance(p) == bench::generate_instance(q));
  }
  SUBCASE("ranges") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto s = bench::generate_instance({10, 500, 30, 6, seed});
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          CHECK(s.lower()(i, j) >= 10);
          CHECK(s.lower()(i, j) <= 500);
          CHECK(s.upper()(i, j) - s.lower()(i, j) >= 0);
          CHECK(s.upper()(i, j) - s.lower()(i, j) <= 30);
        }
    }
  }
  SUBCASE("entry (i, j) depends on its index only") {
    const auto small = bench::generate_instance({0, 1, 1, 2, 9});
    const bench::CounterRng rng(9);
    CHECK(small.lower()(1, 0) == rng.uniform(4));
    CHECK(small.upper()(1, 0) == small.lower()(1, 0) + rng.uniform(5));
  }
  SUBCASE("invalid parameters") {
    CHECK_THROWS_AS(bench::generate_instance({10, 5, 1, 2, 1}), InvalidInput);
    CHECK_THROWS_AS(bench::generate_instance({1, 5, -1, 2, 1}), InvalidInput);
    CHECK_THROWS_AS(bench::generate_instance({1, 5, 1, 0, 1}), InvalidInput);
  }
}

TEST_CASE("presets") {
  CHECK(bench::presets().size() == 4);
  const auto p = bench::find_preset("table1-row3");
  REQUIRE(p);
  CHECK(p->x_min_lower == 100);
  CHECK(p->x_max_lower == 500);
  CHECK(p->delta == 50);
  CHECK_FALSE(bench::find_preset("row9"));
}

TEST_CASE("run_experiment") {
  SUBCASE("zero width gives zero regret") {
    bench::ExperimentConfig c;
    c.delta = 0;
    c.k_list = {3};
    c.reps = 1;
    const auto rows = bench::run_experiment(c);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].reps == 1);
    CHECK(std::abs(rows[0].optimal_regret) < 1e-6);
  }
  SUBCASE("seeds, ordering and thread count do not change the table") {
    bench::ExperimentConfig c;
    c.k_list = {4, 2};
    c.reps = 3;
    c.seed = 100;
    const auto serial = bench::run_experiment(c);
    c.jobs = 3;
    const auto parallel = bench::run_experiment(c);
    REQUIRE(serial.size() == 2);
    CHECK(serial[0].k == 4);
    CHECK(serial[1].k == 2);
    CHECK(serial[0].runs.front().seed == 100);
    CHECK(serial[0].runs.back().seed == 102);
    CHECK(bench::write_csv(serial, false) == bench::write_csv(parallel, false));
    CHECK(serial[0].status_counts.at("optimal") == 3);
  }
  SUBCASE("reps must be positive") {
    bench::ExperimentConfig c;
    c.reps = 0;
    CHECK_THROWS_AS(bench::run_experiment(c), InvalidInput);
  }
}

TEST_CASE("csv") {
  CHECK(bench::write_csv({}) == "K,optimal_regret,robust_revenue,robust_welfare,sold_items,time_s,reps\n");
  bench::ExperimentRow r;
  r.k = 5;
  r.optimal_regret = 111.274;
  r.robust_revenue = 1452.449;
  r.robust_welfare = 133.72;
  r.sold_items = 4.18;
  r.time_s = 0.123;
  r.reps = 10;
  const auto text = bench::write_csv({r});
  CHECK(text.find("5,111.27,1452.45,133.72,4.18,0.12,10\n") != std::string::npos);
  CHECK(bench::write_csv({r}, false).find(",0.00,10\n") != std::string::npos);
  const auto back = bench::parse_csv(text);
  REQUIRE(back.size() == 1);
  CHECK(back[0].k == 5);
  CHECK(back[0].optimal_regret == doctest::Approx(111.27));
  CHECK(back[0].reps == 10);
  CHECK(bench::write_csv(back) == text);
  CHECK_THROWS_AS(bench::parse_csv("nope\n"), InvalidInput);
}
