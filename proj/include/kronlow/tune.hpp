#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kronlow {

struct TuningScenario {
  std::size_t n_lo = 5;
  std::size_t n_hi = 100;
  // Explicit instance pool; empty means every n in [n_lo, n_hi].
  std::vector<std::size_t> instances;
  // (configuration, instance) evaluations
  std::size_t budget_pairs = 2000;
  std::uint64_t seed = 0;
  double elim_alpha = 0.05;
  std::size_t elites = 4;
  std::size_t min_instances = 5;
  std::size_t d = 3;

  friend bool operator==(const TuningScenario&, const TuningScenario&) = default;
};

// Throws ConfigError when an invariant is violated.
void validate(const TuningScenario& scenario);

TuningScenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const TuningScenario& scenario);

struct TunedConfig {
  std::vector<double> params;                        // d-1 trailing parameters
  std::map<std::size_t, double> per_instance_values; // every instance it was run on
  double mean_rank = 0.0;                            // in the final race
  TuningScenario scenario;
  std::size_t evals_used = 0;
  std::size_t rounds = 0;

  friend bool operator==(const TunedConfig&, const TunedConfig&) = default;
};

// cost(params, n); lower is better. Only the per-instance order matters.
using InstanceCost = std::function<double(std::span<const double>, std::size_t)>;

// Exact discrepancy of kronecker_with_unit_first(n, params).
double kronecker_cost(std::span<const double> params, std::size_t n);

// Iterated racing. Each round samples candidates (uniform in the first round,
// truncated normals around the surviving elites afterwards with a spread that
// halves per round down to 0.01), races them instance by instance over a
// freshly shuffled instance order, drops candidates that a Friedman test plus
// Conover post-hoc comparison at elim_alpha marks as worse than the best, and
// keeps the `elites` best by mean rank. Evaluations are cached per
// (configuration, n) and only fresh evaluations are charged to the budget.
//
// Throws ConfigError if the budget cannot pay for one complete first round.
TunedConfig race_tune(const TuningScenario& scenario, const InstanceCost& cost = kronecker_cost,
                      std::size_t threads = 0);

std::map<std::size_t, double> evaluate_config_over_interval(std::span<const double> params,
                                                            std::span<const std::size_t> ns,
                                                            std::size_t threads = 0);

// Average ranks (ties share the mean rank) of each row's entries.
std::vector<double> average_ranks(std::span<const double> costs);

// Mean rank of each configuration across instances; costs[c][i] is the cost
// of configuration c on instance i.
std::vector<double> mean_ranks(const std::vector<std::vector<double>>& costs);

struct FriedmanOutcome {
  double statistic = 0.0;
  double p_value = 1.0;
  std::vector<double> rank_sums;
  std::vector<bool> keep;  // survivors of the post-hoc comparison
};

// costs[c][i]: candidate c on block (instance) i. All rows must have equal
// length >= 1 and there must be at least two candidates.
FriedmanOutcome friedman_race_step(const std::vector<std::vector<double>>& costs, double alpha);

struct IntervalStudy {
  std::vector<std::pair<std::size_t, std::size_t>> intervals;
  std::vector<TunedConfig> configs;
  std::vector<std::size_t> probes;          // all probe sizes, interval by interval
  std::vector<std::size_t> probe_interval;  // owning interval of each probe
  std::vector<std::vector<double>> matrix;  // matrix[config][probe]
  std::vector<double> random_params;
  std::vector<double> random_values;        // random config on every probe
  std::vector<double> own_mean_rank;        // tuned vs random on own probes
  std::vector<double> random_own_mean_rank;
};

// probes_per_interval evenly spaced sizes per interval (including both ends).
IntervalStudy interval_study(const std::vector<std::pair<std::size_t, std::size_t>>& intervals,
                             const TuningScenario& scenario_template, std::size_t probes_per_interval = 5,
                             std::size_t threads = 0);

void write_matrix_csv(const IntervalStudy& study, std::ostream& out);

}  // namespace kronlow
