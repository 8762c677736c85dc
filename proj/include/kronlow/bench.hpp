#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kronlow/optimize.hpp"

namespace kronlow {

enum class Provenance { paper_reference, computed };

struct BenchmarkRecord {
  std::string method;
  std::size_t n = 0;
  std::size_t d = 0;
  double value = 0.0;
  std::optional<std::vector<double>> params;  // trailing Kronecker parameters
  Provenance provenance = Provenance::computed;
  std::string citation;   // non-empty for reference records
  std::string published;  // the value exactly as printed, reference records only
};

enum class ReferenceTable { table1, table3, postprocessing_table2 };

std::optional<ReferenceTable> parse_reference_table(std::string_view name);

// Published cells, row by row, blank cells omitted.
const std::vector<BenchmarkRecord>& reference_table(ReferenceTable table);

void write_records_csv(const std::vector<BenchmarkRecord>& records, std::ostream& out);

// Tuned interval configurations with published parameters.
struct NamedConfig {
  std::string_view method;
  std::vector<double> params;
  double tolerance;  // absolute, for reproduction
};
const std::vector<NamedConfig>& published_configs();

enum class CellStatus { pass, fail, informational, no_reference };
std::string_view to_string(CellStatus status) noexcept;

struct Table1Cell {
  std::string method;
  std::size_t n = 0;
  double computed = 0.0;
  std::optional<double> reference;
  double abs_delta = 0.0;
  double tolerance = 0.0;
  bool relative = false;
  CellStatus status = CellStatus::no_reference;
  std::vector<double> params;
};

struct Table1Options {
  // Used only when the CMA-ES column is requested.
  OptimizerConfig cmaes{2000, 3, 0, std::nullopt, 0.3, {}, 0};
  std::size_t threads = 0;
};

inline constexpr double kSobolRelativeTolerance = 0.30;

// Columns: "Sobol", "I_200", "I_1500", "I_2500", "CMA-ES". Cells are
// evaluated through the generators and the exact evaluator and compared to
// the published values: I_2500 within 1e-4, I_200 / I_1500 within 2e-3
// (absolute), Sobol within 30% relative (informational), CMA-ES
// informational. Throws InputError on an unknown column.
std::vector<Table1Cell> reproduce_table1(const std::vector<std::string>& columns, const std::vector<std::size_t>& ns,
                                         const Table1Options& options = {});

void write_table1_csv(const std::vector<Table1Cell>& cells, std::ostream& out);

struct HeatmapCell {
  std::size_t i = 0, j = 0;  // grid index along p2, p3
  double p2 = 0.0, p3 = 0.0;
  double value = 0.0;

  friend bool operator==(const HeatmapCell&, const HeatmapCell&) = default;
};

struct HeatmapReport {
  std::size_t n = 0;
  std::size_t resolution = 0;
  std::vector<HeatmapCell> cells;  // sorted by (i, j)
  std::vector<double> thresholds;
  std::vector<std::size_t> below;  // cells with value < threshold
  HeatmapCell minimum;
};

// Grid points are cell centres (i + 1/2) / resolution, so the grid at
// resolution R is contained in the grid at resolution 3R.
double heatmap_coordinate(std::size_t index, std::size_t resolution) noexcept;

// Discrepancy of kronecker_with_unit_first(n, {p2, p3}) on a
// resolution x resolution grid over (0,1)^2. Throws InputError if
// resolution < 2.
HeatmapReport heatmap_scan(std::size_t n, std::size_t resolution, const std::vector<double>& thresholds,
                           std::size_t threads = 0);

void write_heatmap_csv(const HeatmapReport& report, std::ostream& out);

struct InverseEntry {
  std::string method;
  double target = 0.0;
  std::optional<std::size_t> n;  // empty: unreached
};

// For each method (in first-appearance order) and each target (in the given
// order), the smallest n whose value <= target.
std::vector<InverseEntry> inverse_discrepancy(const std::vector<BenchmarkRecord>& records,
                                              const std::vector<double>& targets);

void write_inverse_csv(const std::vector<InverseEntry>& entries, std::ostream& out);

}  // namespace kronlow
