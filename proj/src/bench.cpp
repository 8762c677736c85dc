#include "kronlow/bench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "kronlow/discrepancy.hpp"
#include "kronlow/errors.hpp"
#include "kronlow/format.hpp"
#include "kronlow/parallel.hpp"
#include "kronlow/pointset.hpp"

namespace kronlow {
namespace {

std::string join_params(const std::vector<double>& params) {
  std::string s;
  for (std::size_t i = 0; i < params.size(); ++i) s += (i ? ";" : "") + format_double(params[i]);
  return s;
}

std::optional<double> lookup_reference(const std::string& method, std::size_t n) {
  for (const auto& r : reference_table(ReferenceTable::table1)) {
    if (r.method == method && r.n == n) return r.value;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(CellStatus status) noexcept {
  switch (status) {
    case CellStatus::pass: return "pass";
    case CellStatus::fail: return "fail";
    case CellStatus::informational: return "info";
    case CellStatus::no_reference: return "no_reference";
  }
  return "?";
}

void write_records_csv(const std::vector<BenchmarkRecord>& records, std::ostream& out) {
  out << "method,n,d,value,params,provenance,citation\n";
  for (const auto& r : records) {
    out << r.method << ',' << r.n << ',' << r.d << ',';
    if (r.provenance == Provenance::paper_reference) out << r.published;
    else out << format_double(r.value);
    out << ',' << (r.params ? join_params(*r.params) : "") << ','
        << (r.provenance == Provenance::paper_reference ? "paper_reference" : "computed") << ",\"" << r.citation
        << "\"\n";
  }
}

std::vector<Table1Cell> reproduce_table1(const std::vector<std::string>& columns, const std::vector<std::size_t>& ns,
                                         const Table1Options& options) {
  for (const auto& c : columns) {
    const bool known = c == "Sobol" || c == "CMA-ES" ||
                       std::any_of(published_configs().begin(), published_configs().end(),
                                   [&](const NamedConfig& nc) { return nc.method == c; });
    if (!known) throw InputError("reproduce_table1: unknown column '" + c + "'");
  }
  for (std::size_t n : ns) {
    if (n == 0) throw InputError("reproduce_table1: n must be >= 1");
  }

  std::vector<Table1Cell> cells;
  for (std::size_t n : ns) {
    for (const auto& c : columns) {
      Table1Cell cell;
      cell.method = c;
      cell.n = n;
      cell.reference = lookup_reference(c, n);
      cells.push_back(cell);
    }
  }

  // CMA-ES cells parallelize internally; the rest are independent cells.
  std::vector<std::size_t> plain;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (cells[k].method == "CMA-ES") {
      OptimizerConfig cfg = options.cmaes;
      cfg.threads = options.threads;
      const auto r = optimize_kronecker(cells[k].n, 3, cfg);
      cells[k].computed = r.best_value;
      cells[k].params = r.best_params;
    } else {
      plain.push_back(k);
    }
  }
  parallel_for(plain.size(), options.threads, [&](std::size_t i) {
    Table1Cell& cell = cells[plain[i]];
    if (cell.method == "Sobol") {
      cell.computed = star_discrepancy_exact(sobol_set(cell.n, 3)).value;
      return;
    }
    for (const auto& nc : published_configs()) {
      if (nc.method != cell.method) continue;
      cell.params = nc.params;
      cell.computed = kronecker_discrepancy(cell.n, nc.params);
    }
  });

  for (auto& cell : cells) {
    if (!cell.reference) {
      cell.status = CellStatus::no_reference;
      continue;
    }
    cell.abs_delta = std::abs(cell.computed - *cell.reference);
    if (cell.method == "Sobol") {
      cell.relative = true;
      cell.tolerance = kSobolRelativeTolerance;
      cell.status = CellStatus::informational;
    } else if (cell.method == "CMA-ES") {
      cell.status = CellStatus::informational;
    } else {
      for (const auto& nc : published_configs()) {
        if (nc.method == cell.method) cell.tolerance = nc.tolerance;
      }
      cell.status = cell.abs_delta <= cell.tolerance ? CellStatus::pass : CellStatus::fail;
    }
  }
  return cells;
}

void write_table1_csv(const std::vector<Table1Cell>& cells, std::ostream& out) {
  out << "method,n,computed,reference,abs_delta,tolerance,tolerance_kind,status,params\n";
  for (const auto& c : cells) {
    out << c.method << ',' << c.n << ',' << format_double(c.computed) << ',';
    if (c.reference) out << format_double(*c.reference);
    out << ',';
    if (c.reference) out << format_double(c.abs_delta);
    out << ',' << format_double(c.tolerance) << ',' << (c.relative ? "relative" : "absolute") << ',' << to_string(c.status) << ','
        << join_params(c.params) << '\n';
  }
}

double heatmap_coordinate(std::size_t index, std::size_t resolution) noexcept {
  return (static_cast<double>(index) + 0.5) / static_cast<double>(resolution);
}

HeatmapReport heatmap_scan(std::size_t n, std::size_t resolution, const std::vector<double>& thresholds,
                           std::size_t threads) {
  if (resolution < 2) throw InputError("heatmap_scan: resolution must be >= 2");
  if (n == 0) throw InputError("heatmap_scan: n must be >= 1");
  HeatmapReport report;
  report.n = n;
  report.resolution = resolution;
  report.thresholds = thresholds;
  report.cells.resize(resolution * resolution);
  parallel_for(report.cells.size(), threads, [&](std::size_t k) {
    HeatmapCell& cell = report.cells[k];
    cell.i = k / resolution;
    cell.j = k % resolution;
    cell.p2 = heatmap_coordinate(cell.i, resolution);
    cell.p3 = heatmap_coordinate(cell.j, resolution);
    const double p[2] = {cell.p2, cell.p3};
    cell.value = kronecker_discrepancy(n, p);
  });
  report.minimum = report.cells.front();
  for (const auto& c : report.cells) {
    if (c.value < report.minimum.value) report.minimum = c;
  }
  for (double t : thresholds) {
    report.below.push_back(static_cast<std::size_t>(
        std::count_if(report.cells.begin(), report.cells.end(), [t](const HeatmapCell& c) { return c.value < t; })));
  }
  return report;
}

void write_heatmap_csv(const HeatmapReport& report, std::ostream& out) {
  out << "p2,p3,value\n";
  for (const auto& c : report.cells) out << format_double(c.p2) << ',' << format_double(c.p3) << ',' << format_double(c.value) << '\n';
}

std::vector<InverseEntry> inverse_discrepancy(const std::vector<BenchmarkRecord>& records,
                                              const std::vector<double>& targets) {
  std::vector<std::string> methods;
  std::map<std::string, std::vector<const BenchmarkRecord*>> by_method;
  for (const auto& r : records) {
    if (!by_method.contains(r.method)) methods.push_back(r.method);
    by_method[r.method].push_back(&r);
  }
  std::vector<InverseEntry> out;
  for (const auto& m : methods) {
    auto rows = by_method[m];
    std::stable_sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) { return a->n < b->n; });
    for (double t : targets) {
      InverseEntry e{m, t, std::nullopt};
      for (const auto* r : rows) {
        if (r->value <= t) {
          e.n = r->n;
          break;
        }
      }
      out.push_back(e);
    }
  }
  return out;
}

void write_inverse_csv(const std::vector<InverseEntry>& entries, std::ostream& out) {
  out << "method,target,n\n";
  for (const auto& e : entries) {
    out << e.method << ',' << format_double(e.target) << ',';
    if (e.n) out << *e.n;
    else out << "unreached";
    out << '\n';
  }
}

}  // namespace kronlow
