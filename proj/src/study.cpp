#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <set>
#include <string>

#include <json.hpp>

#include "kronlow/errors.hpp"
#include "kronlow/format.hpp"
#include "kronlow/optimize.hpp"
#include "kronlow/parallel.hpp"
#include "kronlow/tune.hpp"

namespace kronlow {

TuningScenario scenario_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
  static const std::set<std::string> known{"n_lo", "n_hi", "instances", "budget_pairs", "seed",
                                           "elim_alpha", "elites", "min_instances", "d"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("scenario: unknown field '" + key + "'");
  }
  TuningScenario s;
  try {
    s.n_lo = j.value("n_lo", s.n_lo);
    s.n_hi = j.value("n_hi", s.n_hi);
    s.instances = j.value("instances", s.instances);
    s.budget_pairs = j.value("budget_pairs", s.budget_pairs);
    s.seed = j.value("seed", s.seed);
    s.elim_alpha = j.value("elim_alpha", s.elim_alpha);
    s.elites = j.value("elites", s.elites);
    s.min_instances = j.value("min_instances", s.min_instances);
    s.d = j.value("d", s.d);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  validate(s);
  return s;
}

std::string scenario_to_json(const TuningScenario& s) {
  nlohmann::ordered_json j;
  j["n_lo"] = s.n_lo;
  j["n_hi"] = s.n_hi;
  j["instances"] = s.instances;
  j["budget_pairs"] = s.budget_pairs;
  j["seed"] = s.seed;
  j["elim_alpha"] = s.elim_alpha;
  j["elites"] = s.elites;
  j["min_instances"] = s.min_instances;
  j["d"] = s.d;
  return j.dump(2);
}

namespace {

std::vector<std::size_t> spaced_probes(std::size_t lo, std::size_t hi, std::size_t count) {
  std::vector<std::size_t> out;
  if (count <= 1 || lo == hi) return {lo};
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    const auto n = lo + static_cast<std::size_t>(std::llround(t * static_cast<double>(hi - lo)));
    if (out.empty() || out.back() != n) out.push_back(n);
  }
  return out;
}

}  // namespace

IntervalStudy interval_study(const std::vector<std::pair<std::size_t, std::size_t>>& intervals,
                             const TuningScenario& scenario_template, std::size_t probes_per_interval,
                             std::size_t threads) {
  if (intervals.empty()) throw ConfigError("interval_study: no intervals");
  auto sorted = intervals;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].first > sorted[i].second) throw ConfigError("interval_study: empty interval");
    if (i > 0 && sorted[i].first <= sorted[i - 1].second) throw ConfigError("interval_study: intervals overlap");
  }

  IntervalStudy study;
  study.intervals = intervals;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    TuningScenario s = scenario_template;
    s.n_lo = intervals[i].first;
    s.n_hi = intervals[i].second;
    s.instances.clear();
    s.seed = scenario_template.seed + i;
    study.configs.push_back(race_tune(s, kronecker_cost, threads));
    for (std::size_t n : spaced_probes(s.n_lo, s.n_hi, probes_per_interval)) {
      study.probes.push_back(n);
      study.probe_interval.push_back(i);
    }
  }

  const std::size_t dim = scenario_template.d - 1;
  std::mt19937_64 rng(scenario_template.seed ^ 0x9e3779b97f4a7c15ull);
  study.random_params.resize(dim);
  for (auto& p : study.random_params) p = std::uniform_real_distribution<double>(kParameterBox.lo, kParameterBox.hi)(rng);

  const std::size_t rows = study.configs.size() + 1, cols = study.probes.size();
  std::vector<double> flat(rows * cols);
  parallel_for(rows * cols, threads, [&](std::size_t k) {
    const std::size_t r = k / cols, c = k % cols;
    const auto& params = r < study.configs.size() ? study.configs[r].params : study.random_params;
    flat[k] = kronecker_discrepancy(study.probes[c], params);
  });
  study.matrix.assign(study.configs.size(), std::vector<double>(cols));
  for (std::size_t r = 0; r < study.configs.size(); ++r)
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(r * cols), cols, study.matrix[r].begin());
  study.random_values.assign(flat.begin() + static_cast<std::ptrdiff_t>(study.configs.size() * cols), flat.end());

  for (std::size_t i = 0; i < study.configs.size(); ++i) {
    std::vector<std::vector<double>> pair(2);
    for (std::size_t c = 0; c < cols; ++c) {
      if (study.probe_interval[c] != i) continue;
      pair[0].push_back(study.matrix[i][c]);
      pair[1].push_back(study.random_values[c]);
    }
    const auto ranks = mean_ranks(pair);
    study.own_mean_rank.push_back(ranks[0]);
    study.random_own_mean_rank.push_back(ranks[1]);
  }
  return study;
}

void write_matrix_csv(const IntervalStudy& study, std::ostream& out) {
  out << "config,n_lo,n_hi";
  for (std::size_t n : study.probes) out << ",n" << n;
  out << '\n';
  auto row = [&](const std::string& label, std::size_t lo, std::size_t hi, const std::vector<double>& values) {
    out << label << ',' << lo << ',' << hi;
    for (double v : values) out << ',' << format_double(v);
    out << '\n';
  };
  for (std::size_t i = 0; i < study.configs.size(); ++i)
    row("interval" + std::to_string(i + 1), study.intervals[i].first, study.intervals[i].second, study.matrix[i]);
  row("random", 0, 0, study.random_values);
}

}  // namespace kronlow
