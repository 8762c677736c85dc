#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace kronlow {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Default search box for Kronecker parameters; reflection keeps candidates
// away from the degenerate endpoints.
inline constexpr Interval kParameterBox{1e-9, 1.0 - 1e-9};

struct OptimizerConfig {
  std::size_t budget_evals = 10000;  // per run
  std::size_t runs = 5;
  std::uint64_t seed = 0;
  std::optional<std::size_t> population;  // lambda; default 4 + floor(3 ln dim), at least 6
  double initial_step = 0.3;
  std::vector<Interval> bounds;  // empty: kParameterBox on every coordinate
  std::size_t threads = 0;       // candidate evaluations within a generation
};

struct OptResult {
  std::vector<double> best_params;
  double best_value = 1.0;
  // best-so-far after every generation, concatenated over runs
  std::vector<double> history;
  std::size_t evals_used = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const OptResult&, const OptResult&) = default;
};

using Objective = std::function<double(std::span<const double>)>;

std::size_t default_population(std::size_t dim) noexcept;

// Throws ConfigError on an invalid config (budget < lambda, step <= 0,
// lo >= hi or bounds outside (0,1), bounds of the wrong size).
void validate(const OptimizerConfig& config, std::size_t dim);

// (mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation and rank-mu
// covariance update. Each run starts from a uniform random mean; when a run
// stagnates before its budget is spent it restarts from a fresh mean.
// Candidates are reflected into the box before evaluation. Non-finite
// objective values count as 1.0.
OptResult cmaes_minimize(const Objective& objective, std::size_t dim, const OptimizerConfig& config);

// Uniform sampling baseline with the same total budget (budget_evals * runs),
// drawn in batches of lambda so history has the same granularity.
OptResult random_search(const Objective& objective, std::size_t dim, const OptimizerConfig& config);

// Reflect x into [lo, hi].
double reflect_into(double x, Interval box) noexcept;

enum class SearchMethod { cmaes, random };

// Minimizes the exact discrepancy of kronecker_with_unit_first(n, p) over the
// d-1 trailing parameters. d must be 2, 3 or 4.
OptResult optimize_kronecker(std::size_t n, std::size_t d, const OptimizerConfig& config,
                             SearchMethod method = SearchMethod::cmaes);

// Exact discrepancy of kronecker_with_unit_first(n, trailing).
double kronecker_discrepancy(std::size_t n, std::span<const double> trailing);

}  // namespace kronlow
