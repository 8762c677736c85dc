#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "kronlow/discrepancy.hpp"
#include "kronlow/errors.hpp"
#include "kronlow/optimize.hpp"
#include "kronlow/pointset.hpp"

using namespace kronlow;

namespace {

double bowl(std::span<const double> x) {
  return (x[0] - 0.3) * (x[0] - 0.3) + 4.0 * (x[1] - 0.7) * (x[1] - 0.7);
}

void check_result_shape(const OptResult& r, const OptimizerConfig& cfg, std::size_t dim) {
  REQUIRE(r.best_params.size() == dim);
  REQUIRE(!r.history.empty());
  CHECK(r.evals_used <= cfg.budget_evals * cfg.runs);
  CHECK(r.evals_used > 0);
  CHECK(r.history.back() == r.best_value);
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
  for (double p : r.best_params) {
    CHECK(p >= kParameterBox.lo);
    CHECK(p <= kParameterBox.hi);
  }
}

}  // namespace

TEST_CASE("default population") {
  CHECK(default_population(1) == 6);
  CHECK(default_population(2) == 6);
  CHECK(default_population(3) == 7);
  CHECK(default_population(10) == 10);
}

TEST_CASE("reflect_into") {
  const Interval unit{0.0, 1.0};
  CHECK(reflect_into(0.4, unit) == 0.4);
  CHECK(reflect_into(1.25, unit) == doctest::Approx(0.75));
  CHECK(reflect_into(-0.25, unit) == doctest::Approx(0.25));
  CHECK(reflect_into(2.25, unit) == doctest::Approx(0.25));
  for (double x : {-7.3, -1.0, 3.9, 12.5, 1e6}) {
    const double y = reflect_into(x, kParameterBox);
    CHECK(y >= kParameterBox.lo);
    CHECK(y <= kParameterBox.hi);
  }
}

TEST_CASE("cmaes minimizes a quadratic") {
  OptimizerConfig cfg;
  cfg.budget_evals = 1500;
  cfg.runs = 1;
  cfg.seed = 3;
  const OptResult r = cmaes_minimize(bowl, 2, cfg);
  check_result_shape(r, cfg, 2);
  CHECK(r.best_value < 1e-10);
  CHECK(r.best_params[0] == doctest::Approx(0.3).epsilon(1e-4));
  CHECK(r.best_params[1] == doctest::Approx(0.7).epsilon(1e-4));
  CHECK(bowl(r.best_params) == r.best_value);
}

TEST_CASE("cmaes is deterministic and seed dependent") {
  OptimizerConfig cfg;
  cfg.budget_evals = 300;
  cfg.runs = 2;
  cfg.seed = 11;
  const OptResult a = cmaes_minimize(bowl, 2, cfg);
  CHECK(a == cmaes_minimize(bowl, 2, cfg));
  CHECK(a.seed == 11);
  cfg.seed = 12;
  CHECK_FALSE(a == cmaes_minimize(bowl, 2, cfg));
}

TEST_CASE("restarts stay within budget") {
  // a flat objective triggers stagnation restarts immediately
  OptimizerConfig cfg;
  cfg.budget_evals = 500;
  cfg.runs = 2;
  const OptResult r = cmaes_minimize([](std::span<const double>) { return 0.5; }, 3, cfg);
  check_result_shape(r, cfg, 3);
  CHECK(r.best_value == 0.5);
}

TEST_CASE("non-finite objective values count as 1") {
  OptimizerConfig cfg;
  cfg.budget_evals = 400;
  cfg.runs = 1;
  const Objective nan_left = [](std::span<const double> x) { return x[0] < 0.5 ? std::nan("") : x[0]; };
  const OptResult r = cmaes_minimize(nan_left, 1, cfg);
  CHECK(std::isfinite(r.best_value));
  CHECK(r.best_value <= 1.0);
  CHECK(r.best_params[0] >= 0.5);
}

TEST_CASE("random search baseline") {
  OptimizerConfig cfg;
  cfg.budget_evals = 200;
  cfg.runs = 2;
  cfg.seed = 4;
  const OptResult r = random_search(bowl, 2, cfg);
  check_result_shape(r, cfg, 2);
  CHECK(r.evals_used == 400);
  CHECK(r == random_search(bowl, 2, cfg));
}

TEST_CASE("optimize_kronecker") {
  OptimizerConfig cfg;
  cfg.budget_evals = 300;
  cfg.runs = 2;
  cfg.seed = 1;
  const OptResult r = optimize_kronecker(5, 2, cfg);
  check_result_shape(r, cfg, 1);
  // the Fibonacci parameter is one feasible point
  CHECK(r.best_value <= 0.352786404500042 + 1e-12);
  CHECK(kronecker_discrepancy(5, r.best_params) == r.best_value);
  CHECK(r.best_value == star_discrepancy_exact(kronecker_with_unit_first(5, r.best_params)).value);
}

TEST_CASE("optimizer results do not depend on the thread count") {
  OptimizerConfig cfg;
  cfg.budget_evals = 150;
  cfg.runs = 1;
  cfg.seed = 8;
  cfg.threads = 1;
  const OptResult one = optimize_kronecker(24, 3, cfg);
  cfg.threads = 4;
  CHECK(one == optimize_kronecker(24, 3, cfg));
  CHECK(random_search(bowl, 2, cfg) == [&] {
    cfg.threads = 1;
    return random_search(bowl, 2, cfg);
  }());
}

TEST_CASE("optimizer config errors") {
  OptimizerConfig cfg;
  cfg.budget_evals = 3;
  CHECK_THROWS_AS(validate(cfg, 2), ConfigError);
  cfg = {};
  cfg.initial_step = 0.0;
  CHECK_THROWS_AS(validate(cfg, 2), ConfigError);
  cfg = {};
  cfg.runs = 0;
  CHECK_THROWS_AS(validate(cfg, 2), ConfigError);
  cfg = {};
  cfg.bounds = {{0.1, 0.9}};
  CHECK_THROWS_AS(validate(cfg, 2), ConfigError);
  cfg.bounds = {{0.1, 0.9}, {0.6, 0.4}};
  CHECK_THROWS_AS(validate(cfg, 2), ConfigError);
  cfg.bounds = {{0.1, 0.9}, {0.0, 0.4}};
  CHECK_THROWS_AS(validate(cfg, 2), ConfigError);
  cfg.bounds = {{0.1, 0.9}, {0.2, 0.4}};
  CHECK_NOTHROW(validate(cfg, 2));
  CHECK_THROWS_AS(optimize_kronecker(10, 5, OptimizerConfig{}), UnsupportedDimension);
  CHECK_THROWS_AS(optimize_kronecker(10, 1, OptimizerConfig{}), UnsupportedDimension);
}

TEST_CASE("bounds are respected") {
  OptimizerConfig cfg;
  cfg.budget_evals = 400;
  cfg.runs = 1;
  cfg.bounds = {{0.5, 0.6}, {0.1, 0.2}};
  const OptResult r = cmaes_minimize(bowl, 2, cfg);
  CHECK(r.best_params[0] >= 0.5);
  CHECK(r.best_params[0] <= 0.6);
  CHECK(r.best_params[1] >= 0.1);
  CHECK(r.best_params[1] <= 0.2);
  CHECK(r.best_params[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(r.best_params[1] == doctest::Approx(0.2).epsilon(1e-3));
}
