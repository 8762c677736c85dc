#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kronlow/errors.hpp"
#include "kronlow/tune.hpp"

using namespace kronlow;

namespace {

// Smooth synthetic landscape with its optimum at (0.3, 0.6) and an
// instance-dependent perturbation that keeps the ranking noisy.
double synthetic(std::span<const double> p, std::size_t n) {
  const double a = p[0] - 0.3, b = p[1] - 0.6;
  return a * a + b * b + 0.002 * std::sin(static_cast<double>(n) * (7.0 * p[0] + 3.0 * p[1]));
}

TuningScenario small_scenario(std::uint64_t seed) {
  TuningScenario s;
  s.n_lo = 5;
  s.n_hi = 60;
  s.budget_pairs = 600;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("average ranks share ties") {
  const std::vector<double> v{0.3, 0.1, 0.3, 0.9};
  CHECK(average_ranks(v) == std::vector<double>{2.5, 1.0, 2.5, 4.0});
  CHECK(mean_ranks({{1.0, 5.0}, {2.0, 4.0}}) == std::vector<double>{1.5, 1.5});
}

TEST_CASE("friedman statistic with ties") {
  // scipy.stats.friedmanchisquare on the same blocks
  const std::vector<std::vector<double>> costs{{0.1, 0.2, 0.3, 0.4, 0.5, 0.6},
                                               {0.2, 0.1, 0.35, 0.5, 0.55, 0.7},
                                               {0.3, 0.3, 0.3, 0.6, 0.9, 0.65}};
  const FriedmanOutcome f = friedman_race_step(costs, 0.01);
  CHECK(f.statistic == doctest::Approx(5.826086956521734).epsilon(1e-12));
  CHECK(f.p_value == doctest::Approx(0.05431018621163219).epsilon(1e-9));
  CHECK(f.keep == std::vector<bool>{true, true, true});
  CHECK(f.rank_sums == std::vector<double>{7.5, 13.0, 15.5});
}

TEST_CASE("elimination soundness") {
  // candidate 0 always best, candidate 2 always worst
  std::vector<std::vector<double>> costs(3);
  for (int i = 0; i < 10; ++i) {
    costs[0].push_back(0.1 + 0.01 * i);
    costs[1].push_back(i % 2 ? 0.5 : 0.05);
    costs[2].push_back(0.9);
  }
  const FriedmanOutcome f = friedman_race_step(costs, 0.05);
  CHECK(f.p_value < 0.05);
  CHECK(f.keep[0]);
  CHECK_FALSE(f.keep[2]);

  // identical candidates are never eliminated
  const std::vector<std::vector<double>> same(4, std::vector<double>{0.2, 0.4, 0.1, 0.3, 0.5});
  const FriedmanOutcome g = friedman_race_step(same, 0.05);
  CHECK(g.statistic == 0.0);
  CHECK(g.p_value == 1.0);
  for (bool k : g.keep) CHECK(k);

  CHECK_THROWS_AS(friedman_race_step({{0.1}}, 0.05), InputError);
  CHECK_THROWS_AS(friedman_race_step({{0.1, 0.2}, {0.3}}, 0.05), InputError);
}

TEST_CASE("race_tune finds the synthetic optimum") {
  const TunedConfig t = race_tune(small_scenario(1), synthetic, 1);
  REQUIRE(t.params.size() == 2);
  CHECK(std::abs(t.params[0] - 0.3) < 0.08);
  CHECK(std::abs(t.params[1] - 0.6) < 0.08);
  CHECK(t.evals_used <= 600);
  CHECK(t.rounds >= 2);
  CHECK(!t.per_instance_values.empty());
  for (const auto& [n, v] : t.per_instance_values) {
    CHECK(n >= 5);
    CHECK(n <= 60);
    CHECK(v == synthetic(t.params, n));
  }
}

TEST_CASE("race_tune budget accounting") {
  std::size_t calls = 0;
  const InstanceCost counted = [&](std::span<const double> p, std::size_t n) {
    ++calls;
    return synthetic(p, n);
  };
  const TunedConfig t = race_tune(small_scenario(2), counted, 1);
  CHECK(calls == t.evals_used);
  CHECK(calls <= 600);
  CHECK(calls >= 450);
}

TEST_CASE("race_tune only uses ranks") {
  const InstanceCost rescaled = [](std::span<const double> p, std::size_t n) {
    return 3.0 * std::exp(5.0 * synthetic(p, n)) + 1.0;
  };
  const TunedConfig a = race_tune(small_scenario(3), synthetic, 1);
  const TunedConfig b = race_tune(small_scenario(3), rescaled, 1);
  CHECK(a.params == b.params);
  CHECK(a.mean_rank == b.mean_rank);
  CHECK(a.evals_used == b.evals_used);
}

TEST_CASE("race_tune is deterministic across thread counts") {
  TuningScenario s = small_scenario(4);
  s.n_hi = 30;
  s.budget_pairs = 300;
  const TunedConfig a = race_tune(s, kronecker_cost, 1);
  CHECK(a == race_tune(s, kronecker_cost, 1));
  CHECK(a == race_tune(s, kronecker_cost, 3));
  s.seed = 5;
  CHECK_FALSE(a.params == race_tune(s, kronecker_cost, 1).params);
}

TEST_CASE("explicit instance pool") {
  TuningScenario s = small_scenario(6);
  s.instances = {10, 20, 30, 40, 50, 60};
  const TunedConfig t = race_tune(s, synthetic, 1);
  for (const auto& [n, v] : t.per_instance_values) CHECK(n % 10 == 0);
}

TEST_CASE("scenario validation and json") {
  TuningScenario s;
  CHECK_NOTHROW(validate(s));
  s.n_lo = 4;
  CHECK_THROWS_AS(validate(s), ConfigError);
  s = {};
  s.n_lo = 50;
  s.n_hi = 40;
  CHECK_THROWS_AS(validate(s), ConfigError);
  s = {};
  s.budget_pairs = 30;
  CHECK_THROWS_AS(validate(s), ConfigError);
  s = {};
  s.elim_alpha = 1.5;
  CHECK_THROWS_AS(validate(s), ConfigError);
  s = {};
  s.instances = {3};
  CHECK_THROWS_AS(validate(s), ConfigError);
  s = {};
  s.d = 5;
  CHECK_THROWS_AS(validate(s), ConfigError);

  TuningScenario r;
  r.n_lo = 7;
  r.n_hi = 70;
  r.instances = {7, 8, 70};
  r.seed = 99;
  r.elim_alpha = 0.1;
  CHECK(scenario_from_json(scenario_to_json(r)) == r);
  CHECK_THROWS_AS(scenario_from_json("{\"n_lo\": 5, \"bogus\": 1}"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json("[1,2]"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json("{not json"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json("{\"n_lo\": 2}"), ConfigError);
}

TEST_CASE("budget too small for a first round") {
  TuningScenario s;
  s.elites = 1;
  s.budget_pairs = 10;
  CHECK_THROWS_AS(race_tune(s, synthetic, 1), ConfigError);
}

TEST_CASE("interval study") {
  TuningScenario tmpl;
  tmpl.budget_pairs = 200;
  tmpl.seed = 7;
  const IntervalStudy st = interval_study({{5, 20}, {21, 40}}, tmpl, 4, 1);
  REQUIRE(st.configs.size() == 2);
  CHECK(st.configs[0].scenario.n_lo == 5);
  CHECK(st.configs[1].scenario.n_hi == 40);
  CHECK(st.configs[1].scenario.seed == 8);
  CHECK(st.probes == std::vector<std::size_t>{5, 10, 15, 20, 21, 27, 34, 40});
  CHECK(st.probe_interval == std::vector<std::size_t>{0, 0, 0, 0, 1, 1, 1, 1});
  REQUIRE(st.matrix.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t k = 0; k < st.probes.size(); ++k)
      CHECK(st.matrix[c][k] == kronecker_cost(st.configs[c].params, st.probes[k]));
  }
  for (std::size_t i = 0; i < 2; ++i) CHECK(st.own_mean_rank[i] + st.random_own_mean_rank[i] == 3.0);
  std::ostringstream csv;
  write_matrix_csv(st, csv);
  CHECK(csv.str().rfind("config,n_lo,n_hi,n5,n10", 0) == 0);
  CHECK_THROWS_AS(interval_study({{5, 30}, {20, 40}}, tmpl), ConfigError);
}
