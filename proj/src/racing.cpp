#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "kronlow/errors.hpp"
#include "kronlow/optimize.hpp"
#include "kronlow/parallel.hpp"
#include "kronlow/tune.hpp"

namespace kronlow {

void validate(const TuningScenario& s) {
  if (s.n_lo < 5 || s.n_lo > s.n_hi) throw ConfigError("scenario: need 5 <= n_lo <= n_hi");
  if (s.d < 2 || s.d > 4) throw ConfigError("scenario: d must be 2, 3 or 4");
  if (s.elites == 0) throw ConfigError("scenario: elites must be >= 1");
  if (s.budget_pairs < 10 * s.elites) throw ConfigError("scenario: budget_pairs must be >= 10 * elites");
  if (!(s.elim_alpha > 0.0 && s.elim_alpha < 1.0)) throw ConfigError("scenario: elim_alpha must lie in (0,1)");
  if (s.min_instances < 2) throw ConfigError("scenario: min_instances must be >= 2");
  for (std::size_t n : s.instances) {
    if (n < s.n_lo || n > s.n_hi) throw ConfigError("scenario: instance " + std::to_string(n) + " outside [n_lo, n_hi]");
  }
}

double kronecker_cost(std::span<const double> params, std::size_t n) { return kronecker_discrepancy(n, params); }

std::vector<double> average_ranks(std::span<const double> costs) {
  std::vector<std::size_t> order(costs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
  std::vector<double> ranks(costs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && costs[order[j + 1]] == costs[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

std::vector<double> mean_ranks(const std::vector<std::vector<double>>& costs) {
  const std::size_t k = costs.size();
  if (k == 0) return {};
  const std::size_t blocks = costs.front().size();
  std::vector<double> sums(k, 0.0);
  std::vector<double> column(k);
  for (std::size_t i = 0; i < blocks; ++i) {
    for (std::size_t c = 0; c < k; ++c) column[c] = costs[c][i];
    const auto r = average_ranks(column);
    for (std::size_t c = 0; c < k; ++c) sums[c] += r[c];
  }
  for (auto& s : sums) s /= static_cast<double>(std::max<std::size_t>(blocks, 1));
  return sums;
}

FriedmanOutcome friedman_race_step(const std::vector<std::vector<double>>& costs, double alpha) {
  const std::size_t k = costs.size();
  if (k < 2) throw InputError("friedman_race_step: need at least two candidates");
  const std::size_t b = costs.front().size();
  for (const auto& row : costs) {
    if (row.size() != b || b == 0) throw InputError("friedman_race_step: ragged or empty cost matrix");
  }

  FriedmanOutcome out;
  out.rank_sums.assign(k, 0.0);
  out.keep.assign(k, true);
  double rank_squares = 0.0, tie_term = 0.0;
  std::vector<double> column(k);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t c = 0; c < k; ++c) column[c] = costs[c][i];
    const auto r = average_ranks(column);
    for (std::size_t c = 0; c < k; ++c) {
      out.rank_sums[c] += r[c];
      rank_squares += r[c] * r[c];
    }
    std::map<double, std::size_t> groups;
    for (double v : column) ++groups[v];
    for (const auto& [v, u] : groups) {
      const double t = static_cast<double>(u);
      tie_term += t * t * t - t;
    }
  }

  const double kd = static_cast<double>(k), bd = static_cast<double>(b);
  double spread = 0.0, sum_r2 = 0.0;
  for (double r : out.rank_sums) {
    spread += (r - bd * (kd + 1.0) / 2.0) * (r - bd * (kd + 1.0) / 2.0);
    sum_r2 += r * r;
  }
  const double denominator = bd * kd * (kd + 1.0) - tie_term / (kd - 1.0);
  if (!(denominator > 0.0) || b < 2) return out;
  out.statistic = 12.0 * spread / denominator;
  const boost::math::chi_squared chi2(kd - 1.0);
  out.p_value = boost::math::cdf(boost::math::complement(chi2, out.statistic));
  if (!(out.p_value < alpha)) return out;

  // Conover's multiple comparison against the best rank sum
  const double dof = (bd - 1.0) * (kd - 1.0);
  const boost::math::students_t student(dof);
  const double quantile = boost::math::quantile(boost::math::complement(student, alpha / 2.0));
  const double critical = quantile * std::sqrt(std::max(0.0, 2.0 * (bd * rank_squares - sum_r2) / dof));
  const double best = *std::min_element(out.rank_sums.begin(), out.rank_sums.end());
  for (std::size_t c = 0; c < k; ++c) out.keep[c] = std::abs(out.rank_sums[c] - best) <= critical;
  return out;
}

namespace {

constexpr double kSpreadFloor = 0.01;

struct Candidate {
  std::size_t id;
  std::vector<double> params;
};

struct RaceOutcome {
  std::vector<std::size_t> survivors;  // indices into the candidate list, best first
  std::vector<double> survivor_ranks;
  std::size_t instances_seen = 0;
};

class Racer {
 public:
  Racer(const TuningScenario& s, const InstanceCost& cost, std::size_t threads)
      : s_(s), cost_(cost), threads_(threads), rng_(s.seed) {
    if (s_.instances.empty()) {
      for (std::size_t n = s_.n_lo; n <= s_.n_hi; ++n) pool_.push_back(n);
    } else {
      pool_ = s_.instances;
    }
  }

  TunedConfig run() {
    const std::size_t dim = s_.d - 1;
    const std::size_t planned = static_cast<std::size_t>(std::floor(2.0 + std::log2(static_cast<double>(dim))));
    std::vector<Candidate> elites;
    std::vector<double> elite_ranks;
    double spread = 0.5;
    std::size_t round = 0;

    while (true) {
      ++round;
      const std::size_t remaining = s_.budget_pairs - used_;
      const std::size_t rounds_left = round <= planned ? planned - round + 1 : 1;
      const std::size_t round_budget = remaining / rounds_left;
      const std::size_t total = round_budget / (s_.min_instances + std::min<std::size_t>(5, round));
      const std::size_t fresh = total > elites.size() ? total - elites.size() : 0;
      if (round == 1 && fresh < 2)
        throw ConfigError("race_tune: budget of " + std::to_string(s_.budget_pairs) +
                          " pairs cannot complete a first round");
      if (fresh == 0) break;

      std::vector<Candidate> candidates = elites;
      for (std::size_t i = 0; i < fresh; ++i) {
        candidates.push_back({next_id_++, round == 1 ? sample_uniform(dim) : sample_near(elites, spread)});
      }
      if (round > 1) spread = std::max(kSpreadFloor, spread * 0.5);

      std::vector<std::size_t> order = pool_;
      std::shuffle(order.begin(), order.end(), rng_);

      const std::size_t before = used_;
      const RaceOutcome race = run_race(candidates, order, round_budget);
      if (race.instances_seen == 0) break;
      last_round_ = round;

      elites.clear();
      elite_ranks.clear();
      for (std::size_t i = 0; i < race.survivors.size() && elites.size() < s_.elites; ++i) {
        elites.push_back(candidates[race.survivors[i]]);
        elite_ranks.push_back(race.survivor_ranks[i]);
      }
      if (used_ == before || used_ >= s_.budget_pairs) break;
    }

    TunedConfig tuned;
    tuned.params = elites.front().params;
    tuned.mean_rank = elite_ranks.front();
    tuned.scenario = s_;
    tuned.evals_used = used_;
    tuned.rounds = last_round_;
    for (const auto& [key, value] : cache_) {
      if (key.first == elites.front().id) tuned.per_instance_values[key.second] = value;
    }
    return tuned;
  }

 private:
  std::vector<double> sample_uniform(std::size_t dim) {
    std::vector<double> p(dim);
    for (auto& v : p) v = std::uniform_real_distribution<double>(kParameterBox.lo, kParameterBox.hi)(rng_);
    return p;
  }

  std::vector<double> sample_near(const std::vector<Candidate>& elites, double spread) {
    // parent weight E - rank + 1 for rank = 1..E
    std::vector<double> weights(elites.size());
    for (std::size_t i = 0; i < elites.size(); ++i) weights[i] = static_cast<double>(elites.size() - i);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const auto& parent = elites[pick(rng_)].params;
    std::vector<double> p(parent.size());
    for (std::size_t j = 0; j < parent.size(); ++j) {
      std::normal_distribution<double> normal(parent[j], spread);
      double v = normal(rng_);
      for (int attempt = 0; attempt < 1000 && !(v >= kParameterBox.lo && v <= kParameterBox.hi); ++attempt)
        v = normal(rng_);
      p[j] = std::clamp(v, kParameterBox.lo, kParameterBox.hi);
    }
    return p;
  }

  RaceOutcome run_race(const std::vector<Candidate>& candidates, const std::vector<std::size_t>& order,
                       std::size_t round_budget) {
    std::vector<std::size_t> alive(candidates.size());
    std::iota(alive.begin(), alive.end(), std::size_t{0});
    std::vector<std::vector<double>> seen(candidates.size());
    std::size_t charged = 0, instances = 0;

    for (std::size_t n : order) {
      std::vector<std::size_t> missing;
      for (std::size_t c : alive) {
        if (!cache_.contains({candidates[c].id, n})) missing.push_back(c);
      }
      if (charged + missing.size() > round_budget || used_ + missing.size() > s_.budget_pairs) break;

      std::vector<double> values(missing.size());
      parallel_for(missing.size(), threads_, [&](std::size_t k) {
        const double v = cost_(candidates[missing[k]].params, n);
        values[k] = std::isfinite(v) ? v : 1.0;
      });
      for (std::size_t k = 0; k < missing.size(); ++k) cache_[{candidates[missing[k]].id, n}] = values[k];
      charged += missing.size();
      used_ += missing.size();
      ++instances;
      for (std::size_t c : alive) seen[c].push_back(cache_.at({candidates[c].id, n}));

      if (instances >= s_.min_instances && alive.size() >= 2) {
        std::vector<std::vector<double>> block;
        for (std::size_t c : alive) block.push_back(seen[c]);
        const auto step = friedman_race_step(block, s_.elim_alpha);
        std::vector<std::size_t> kept;
        for (std::size_t i = 0; i < alive.size(); ++i) {
          if (step.keep[i]) kept.push_back(alive[i]);
        }
        alive = std::move(kept);
        if (alive.size() <= s_.elites) break;
      }
    }

    RaceOutcome out;
    out.instances_seen = instances;
    if (instances == 0) return out;
    std::vector<std::vector<double>> block;
    for (std::size_t c : alive) block.push_back(seen[c]);
    const auto ranks = mean_ranks(block);
    std::vector<std::size_t> order_alive(alive.size());
    std::iota(order_alive.begin(), order_alive.end(), std::size_t{0});
    std::sort(order_alive.begin(), order_alive.end(), [&](std::size_t a, std::size_t b) {
      if (ranks[a] != ranks[b]) return ranks[a] < ranks[b];
      return candidates[alive[a]].id < candidates[alive[b]].id;
    });
    for (std::size_t i : order_alive) {
      out.survivors.push_back(alive[i]);
      out.survivor_ranks.push_back(ranks[i]);
    }
    return out;
  }

  const TuningScenario& s_;
  const InstanceCost& cost_;
  std::size_t threads_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> pool_;
  std::map<std::pair<std::size_t, std::size_t>, double> cache_;
  std::size_t used_ = 0;
  std::size_t next_id_ = 0;
  std::size_t last_round_ = 0;
};

}  // namespace

TunedConfig race_tune(const TuningScenario& scenario, const InstanceCost& cost, std::size_t threads) {
  validate(scenario);
  return Racer(scenario, cost, threads).run();
}

std::map<std::size_t, double> evaluate_config_over_interval(std::span<const double> params,
                                                            std::span<const std::size_t> ns, std::size_t threads) {
  for (std::size_t n : ns) {
    if (n == 0) throw InputError("evaluate_config_over_interval: n must be >= 1");
  }
  std::vector<double> values(ns.size());
  parallel_for(ns.size(), threads, [&](std::size_t i) { values[i] = kronecker_discrepancy(ns[i], params); });
  std::map<std::size_t, double> out;
  for (std::size_t i = 0; i < ns.size(); ++i) out[ns[i]] = values[i];
  return out;
}

}  // namespace kronlow
