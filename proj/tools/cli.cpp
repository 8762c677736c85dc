#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kronlow/bench.hpp"
#include "kronlow/discrepancy.hpp"
#include "kronlow/errors.hpp"
#include "kronlow/optimize.hpp"
#include "kronlow/pointset.hpp"
#include "kronlow/tune.hpp"

#ifndef KRONLOW_VERSION
#define KRONLOW_VERSION "0.0.0"
#endif

namespace kronlow::cli {
namespace {

using json = nlohmann::ordered_json;

// Raised for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Manifest {
  std::string subcommand;
  std::vector<std::string> args;
  std::optional<std::uint64_t> seed;

  // Deterministic part, embedded in JSON outputs.
  json to_json() const {
    json j;
    j["tool"] = "kronlow";
    j["version"] = KRONLOW_VERSION;
    j["subcommand"] = subcommand;
    j["args"] = args;
    if (seed) j["seed"] = *seed;
    else j["seed"] = nullptr;
    return j;
  }
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

// Writes the primary output to a file or to `out` for "-". Files get a
// `<path>.manifest.json` sidecar carrying the wall-clock fields.
class Sink {
 public:
  Sink(std::string path, std::ostream& out, const Manifest& manifest)
      : path_(std::move(path)), out_(out), manifest_(manifest), started_(utc_now()),
        t0_(std::chrono::steady_clock::now()) {}

  void write(const std::function<void(std::ostream&)>& body) {
    if (path_ == "-") {
      body(out_);
      out_.flush();
      return;
    }
    std::ofstream file(path_);
    if (!file) throw std::runtime_error("cannot open " + path_ + " for writing");
    body(file);
    if (!file) throw std::runtime_error("write to " + path_ + " failed");
    outputs_.push_back(path_);
  }

  void add_output(const std::string& path) { outputs_.push_back(path); }

  void finish() {
    if (path_ == "-") return;
    json j = manifest_.to_json();
    j["started_utc"] = started_;
    j["wall_clock_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
    j["outputs"] = outputs_;
    std::ofstream file(path_ + ".manifest.json");
    file << j.dump(2) << '\n';
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ostream& out_;
  const Manifest& manifest_;
  std::string started_;
  std::chrono::steady_clock::time_point t0_;
  std::vector<std::string> outputs_;
};

json witness_json(const DiscrepancyResult& r) {
  json w = json::array();
  for (double v : r.witness) w.push_back(v);
  return w;
}

json opt_result_json(const OptResult& r) {
  json j;
  j["best_params"] = r.best_params;
  j["best_value"] = r.best_value;
  j["evals_used"] = r.evals_used;
  j["seed"] = r.seed;
  j["history"] = r.history;
  return j;
}

json tuned_json(const TunedConfig& t) {
  json j;
  j["params"] = t.params;
  json per = json::object();
  for (const auto& [n, v] : t.per_instance_values) per[std::to_string(n)] = v;
  j["per_instance_values"] = per;
  j["mean_rank"] = t.mean_rank;
  j["evals_used"] = t.evals_used;
  j["rounds"] = t.rounds;
  j["scenario"] = json::parse(scenario_to_json(t.scenario));
  j["budget_unit"] = "(configuration, instance) evaluation pairs";
  return j;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_intervals(const std::vector<std::string>& specs) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& s : specs) {
    const auto dash = s.find('-');
    if (dash == std::string::npos) throw UsageError("interval '" + s + "' must look like LO-HI");
    try {
      out.emplace_back(std::stoul(s.substr(0, dash)), std::stoul(s.substr(dash + 1)));
    } catch (const std::exception&) {
      throw UsageError("interval '" + s + "' must look like LO-HI");
    }
  }
  return out;
}

bool wants_json(const std::string& format, const std::string& path) {
  if (format == "json") return true;
  if (format == "csv") return false;
  return path.size() > 5 && path.ends_with(".json");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kronecker low-discrepancy point sets: generation, exact star discrepancy, parameter search"};
  app.require_subcommand(1);
  app.fallthrough();
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker threads (default: KRONLOW_THREADS or all cores)");
  app.set_version_flag("--version", KRONLOW_VERSION);

  // generate
  auto* gen = app.add_subcommand("generate", "write a point set as CSV");
  std::string family, gen_out, first_axis = "unreduced";
  std::size_t gen_n = 0, gen_d = 0;
  std::vector<double> gen_params;
  bool shifted = false;
  gen->add_option("--family", family, "kronecker | fibonacci | sobol")
      ->required()
      ->check(CLI::IsMember({"kronecker", "fibonacci", "sobol"}));
  gen->add_option("--n", gen_n)->required()->check(CLI::PositiveNumber);
  gen->add_option("--d", gen_d, "dimension (fibonacci: 2)");
  gen->add_option("--params", gen_params, "kronecker: d-1 trailing parameters (p1 = 1/n) or d full parameters")
      ->delimiter(',');
  gen->add_flag("--shifted", shifted, "kronecker: index range 1..n instead of 0..n-1");
  gen->add_option("--first-axis", first_axis, "unit-first axis: unreduced (x1 = i/n) | reduced (frac)")
      ->check(CLI::IsMember({"unreduced", "reduced"}));
  gen->add_option("--out", gen_out)->required();

  // eval
  auto* ev = app.add_subcommand("eval", "exact star discrepancy of a CSV point set");
  std::string ev_in, ev_out = "-";
  bool use_oracle = false;
  ev->add_option("--in", ev_in)->required();
  ev->add_flag("--oracle", use_oracle, "brute-force grid enumeration");
  ev->add_option("--out", ev_out);

  // optimize
  auto* opt = app.add_subcommand("optimize", "per-size CMA-ES over the trailing Kronecker parameters");
  std::size_t opt_n = 0, opt_d = 3, opt_budget = 10000, opt_runs = 5;
  std::uint64_t opt_seed = 0;
  std::string opt_out = "-", opt_method = "cmaes";
  std::optional<std::size_t> opt_lambda;
  double opt_sigma = 0.3;
  opt->add_option("--n", opt_n)->required()->check(CLI::PositiveNumber);
  opt->add_option("--d", opt_d)->check(CLI::Range(2, 4));
  opt->add_option("--budget", opt_budget, "evaluations per run")->required();
  opt->add_option("--runs", opt_runs)->required();
  opt->add_option("--seed", opt_seed)->required();
  opt->add_option("--lambda", opt_lambda, "population size");
  opt->add_option("--sigma", opt_sigma, "initial step size");
  opt->add_option("--method", opt_method)->check(CLI::IsMember({"cmaes", "random"}));
  opt->add_option("--out", opt_out);

  // tune
  auto* tn = app.add_subcommand("tune", "racing tuner for one parameter vector over a size interval");
  TuningScenario scenario;
  std::string scenario_file, tn_out;
  std::vector<std::string> interval_specs;
  std::size_t probes = 5;
  std::string matrix_out;
  auto* o_lo = tn->add_option("--n-lo", scenario.n_lo);
  auto* o_hi = tn->add_option("--n-hi", scenario.n_hi);
  auto* o_budget = tn->add_option("--budget", scenario.budget_pairs, "(configuration, instance) pairs");
  tn->add_option("--seed", scenario.seed)->required();
  auto* o_d = tn->add_option("--d", scenario.d);
  auto* o_el = tn->add_option("--elites", scenario.elites);
  auto* o_alpha = tn->add_option("--alpha", scenario.elim_alpha);
  auto* o_inst = tn->add_option("--instances", scenario.instances, "explicit instance sizes")->delimiter(',');
  tn->add_option("--scenario", scenario_file, "scenario JSON; command-line flags override its fields");
  tn->add_option("--intervals", interval_specs, "run an interval study, e.g. 5-100,101-200")->delimiter(',');
  tn->add_option("--probes", probes, "probe sizes per interval in a study");
  tn->add_option("--matrix", matrix_out, "study: cross-evaluation matrix CSV");
  tn->add_option("--out", tn_out)->required();

  // bench
  auto* bench = app.add_subcommand("bench", "reference tables and reproduction reports");
  bench->require_subcommand(1);
  auto* t1 = bench->add_subcommand("table1", "recompute published d=3 cells");
  std::vector<std::string> t1_columns{"Sobol", "I_200", "I_1500", "I_2500"};
  std::vector<std::size_t> t1_ns{20, 25, 32, 40, 50, 60, 80, 100, 150, 200, 250, 300, 500, 750, 1000};
  std::string t1_out = "-", t1_format;
  std::optional<std::uint64_t> t1_seed;
  std::size_t t1_budget = 2000, t1_runs = 3;
  t1->add_option("--columns", t1_columns)->delimiter(',');
  t1->add_option("--ns", t1_ns)->delimiter(',');
  t1->add_option("--seed", t1_seed, "required with the CMA-ES column");
  t1->add_option("--cmaes-budget", t1_budget);
  t1->add_option("--cmaes-runs", t1_runs);
  t1->add_option("--format", t1_format)->check(CLI::IsMember({"csv", "json"}));
  t1->add_option("--out", t1_out);

  auto* hm = bench->add_subcommand("heatmap", "discrepancy over a (p2, p3) grid");
  std::size_t hm_n = 100, hm_res = 200;
  std::vector<double> hm_thresholds{0.055, 0.045};
  std::string hm_out = "-", hm_summary;
  hm->add_option("--n", hm_n)->check(CLI::PositiveNumber);
  hm->add_option("--res", hm_res);
  hm->add_option("--thresholds", hm_thresholds)->delimiter(',');
  hm->add_option("--summary", hm_summary, "JSON with per-threshold counts and the grid minimum");
  hm->add_option("--out", hm_out);

  auto* inv = bench->add_subcommand("inverse", "smallest n reaching each target discrepancy");
  std::vector<double> inv_targets{0.1, 0.05, 0.01, 0.005};
  std::string inv_out = "-", inv_table = "table1", inv_format;
  inv->add_option("--targets", inv_targets)->delimiter(',');
  inv->add_option("--table", inv_table)->check(CLI::IsMember({"table1", "table3", "table2"}));
  inv->add_option("--format", inv_format)->check(CLI::IsMember({"csv", "json"}));
  inv->add_option("--out", inv_out);

  auto* ref = bench->add_subcommand("reference", "dump a published reference table as CSV");
  std::string ref_table = "table1", ref_out = "-";
  ref->add_option("--table", ref_table)->check(CLI::IsMember({"table1", "table3", "table2"}));
  ref->add_option("--out", ref_out);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Manifest manifest;
  manifest.args = args;
  try {
    if (*gen) {
      manifest.subcommand = "generate";
      PointSet points;
      if (family == "fibonacci") {
        if (gen_d != 0 && gen_d != 2) throw UsageError("fibonacci sets are 2-dimensional");
        points = fibonacci_set(gen_n);
      } else if (family == "sobol") {
        if (gen_d == 0) throw UsageError("--d is required for sobol");
        points = sobol_set(gen_n, gen_d);
      } else {
        if (gen_d == 0) throw UsageError("--d is required for kronecker");
        if (gen_params.size() + 1 == gen_d) {
          if (shifted) {
            points = kronecker_with_unit_first(gen_n, gen_params,
                                               first_axis == "reduced" ? FirstAxis::reduced : FirstAxis::unreduced);
          } else {
            KroneckerParams kp{{1.0 / static_cast<double>(gen_n)}, false};
            kp.params.insert(kp.params.end(), gen_params.begin(), gen_params.end());
            points = kronecker_set(gen_n, kp);
          }
        } else if (gen_params.size() == gen_d) {
          points = kronecker_set(gen_n, {gen_params, shifted});
        } else {
          throw UsageError("--params needs d-1 (p1 = 1/n) or d values");
        }
      }
      Sink sink(gen_out, out, manifest);
      sink.write([&](std::ostream& os) { save_csv(points, os); });
      sink.finish();
    } else if (*ev) {
      manifest.subcommand = "eval";
      const PointSet points = ev_in == "-" ? load_csv(std::cin) : load_csv(std::filesystem::path(ev_in));
      const auto t0 = std::chrono::steady_clock::now();
      const DiscrepancyResult r = use_oracle ? star_discrepancy_oracle(points) : star_discrepancy_exact(points);
      const double millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      json j;
      j["value"] = r.value;
      j["witness"] = witness_json(r);
      j["side"] = std::string(to_string(r.side));
      j["n"] = points.size();
      j["d"] = points.dim();
      j["millis"] = millis;
      j["method"] = use_oracle ? "oracle" : "exact";
      j["manifest"] = manifest.to_json();
      Sink sink(ev_out, out, manifest);
      sink.write([&](std::ostream& os) { os << j.dump(2) << '\n'; });
      sink.finish();
    } else if (*opt) {
      manifest.subcommand = "optimize";
      manifest.seed = opt_seed;
      OptimizerConfig cfg;
      cfg.budget_evals = opt_budget;
      cfg.runs = opt_runs;
      cfg.seed = opt_seed;
      cfg.population = opt_lambda;
      cfg.initial_step = opt_sigma;
      cfg.threads = threads;
      const auto method = opt_method == "random" ? SearchMethod::random : SearchMethod::cmaes;
      const OptResult r = optimize_kronecker(opt_n, opt_d, cfg, method);
      json j;
      j["n"] = opt_n;
      j["d"] = opt_d;
      j["method"] = opt_method;
      j["budget_evals"] = opt_budget;
      j["runs"] = opt_runs;
      j["result"] = opt_result_json(r);
      j["manifest"] = manifest.to_json();
      Sink sink(opt_out, out, manifest);
      sink.write([&](std::ostream& os) { os << j.dump(2) << '\n'; });
      sink.finish();
    } else if (*tn) {
      manifest.subcommand = "tune";
      manifest.seed = scenario.seed;
      if (!scenario_file.empty()) {
        std::ifstream in(scenario_file);
        if (!in) throw std::runtime_error("cannot open " + scenario_file);
        std::stringstream text;
        text << in.rdbuf();
        TuningScenario from_file = scenario_from_json(text.str());
        // explicit flags win over the file
        if (!o_lo->count()) scenario.n_lo = from_file.n_lo;
        if (!o_hi->count()) scenario.n_hi = from_file.n_hi;
        if (!o_budget->count()) scenario.budget_pairs = from_file.budget_pairs;
        if (!o_d->count()) scenario.d = from_file.d;
        if (!o_el->count()) scenario.elites = from_file.elites;
        if (!o_alpha->count()) scenario.elim_alpha = from_file.elim_alpha;
        if (!o_inst->count()) scenario.instances = from_file.instances;
        scenario.min_instances = from_file.min_instances;
      } else if (interval_specs.empty() && (!o_lo->count() || !o_hi->count() || !o_budget->count())) {
        throw UsageError("tune needs --n-lo, --n-hi and --budget (or --scenario)");
      }
      json j;
      Sink sink(tn_out, out, manifest);
      if (interval_specs.empty()) {
        j["tuned"] = tuned_json(race_tune(scenario, kronecker_cost, threads));
      } else {
        const auto intervals = parse_intervals(interval_specs);
        const IntervalStudy study = interval_study(intervals, scenario, probes, threads);
        json configs = json::array();
        for (std::size_t i = 0; i < study.configs.size(); ++i) {
          json c = tuned_json(study.configs[i]);
          c["own_probe_mean_rank"] = study.own_mean_rank[i];
          c["random_own_probe_mean_rank"] = study.random_own_mean_rank[i];
          configs.push_back(c);
        }
        j["study"]["configs"] = configs;
        j["study"]["random_params"] = study.random_params;
        j["study"]["probes"] = study.probes;
        if (!matrix_out.empty()) {
          std::ofstream m(matrix_out);
          if (!m) throw std::runtime_error("cannot open " + matrix_out);
          write_matrix_csv(study, m);
          sink.add_output(matrix_out);
          j["study"]["matrix_csv"] = matrix_out;
        }
      }
      j["manifest"] = manifest.to_json();
      sink.write([&](std::ostream& os) { os << j.dump(2) << '\n'; });
      sink.finish();
    } else if (*bench) {
      if (*t1) {
        manifest.subcommand = "bench table1";
        const bool with_cmaes = std::find(t1_columns.begin(), t1_columns.end(), "CMA-ES") != t1_columns.end();
        if (with_cmaes && !t1_seed) throw UsageError("--seed is required when the CMA-ES column is requested");
        manifest.seed = t1_seed;
        Table1Options options;
        options.threads = threads;
        options.cmaes.budget_evals = t1_budget;
        options.cmaes.runs = t1_runs;
        options.cmaes.seed = t1_seed.value_or(0);
        const auto cells = reproduce_table1(t1_columns, t1_ns, options);
        Sink sink(t1_out, out, manifest);
        if (wants_json(t1_format, t1_out)) {
          json rows = json::array();
          for (const auto& c : cells) {
            json r;
            r["method"] = c.method;
            r["n"] = c.n;
            r["computed"] = c.computed;
            r["reference"] = c.reference ? json(*c.reference) : json(nullptr);
            r["abs_delta"] = c.abs_delta;
            r["tolerance"] = c.tolerance;
            r["tolerance_kind"] = c.relative ? "relative" : "absolute";
            r["status"] = std::string(to_string(c.status));
            r["params"] = c.params;
            rows.push_back(r);
          }
          json j;
          j["cells"] = rows;
          j["manifest"] = manifest.to_json();
          sink.write([&](std::ostream& os) { os << j.dump(2) << '\n'; });
        } else {
          sink.write([&](std::ostream& os) { write_table1_csv(cells, os); });
        }
        sink.finish();
      } else if (*hm) {
        manifest.subcommand = "bench heatmap";
        const HeatmapReport report = heatmap_scan(hm_n, hm_res, hm_thresholds, threads);
        json summary;
        summary["n"] = report.n;
        summary["resolution"] = report.resolution;
        summary["minimum"] = {{"p2", report.minimum.p2}, {"p3", report.minimum.p3}, {"value", report.minimum.value}};
        json counts = json::array();
        for (std::size_t k = 0; k < report.thresholds.size(); ++k)
          counts.push_back({{"threshold", report.thresholds[k]}, {"below", report.below[k]}});
        summary["thresholds"] = counts;
        summary["manifest"] = manifest.to_json();
        Sink sink(hm_out, out, manifest);
        sink.write([&](std::ostream& os) { write_heatmap_csv(report, os); });
        if (!hm_summary.empty()) {
          std::ofstream s(hm_summary);
          if (!s) throw std::runtime_error("cannot open " + hm_summary);
          s << summary.dump(2) << '\n';
          sink.add_output(hm_summary);
        } else {
          err << summary.dump() << '\n';
        }
        sink.finish();
      } else if (*inv) {
        manifest.subcommand = "bench inverse";
        const auto entries = inverse_discrepancy(reference_table(*parse_reference_table(inv_table)), inv_targets);
        Sink sink(inv_out, out, manifest);
        if (wants_json(inv_format, inv_out)) {
          json rows = json::array();
          for (const auto& e : entries)
            rows.push_back({{"method", e.method}, {"target", e.target}, {"n", e.n ? json(*e.n) : json("unreached")}});
          json j;
          j["entries"] = rows;
          j["manifest"] = manifest.to_json();
          sink.write([&](std::ostream& os) { os << j.dump(2) << '\n'; });
        } else {
          sink.write([&](std::ostream& os) { write_inverse_csv(entries, os); });
        }
        sink.finish();
      } else if (*ref) {
        manifest.subcommand = "bench reference";
        Sink sink(ref_out, out, manifest);
        sink.write([&](std::ostream& os) { write_records_csv(reference_table(*parse_reference_table(ref_table)), os); });
        sink.finish();
      }
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedDimension& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace kronlow::cli
