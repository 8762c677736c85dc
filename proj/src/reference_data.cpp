// Published benchmark cells. Golden data: values are stored as printed.

#include <charconv>
#include <string>

#include "kronlow/bench.hpp"

namespace kronlow {
namespace {

struct Row {
  std::size_t n;
  std::vector<const char*> cells;  // "" marks a blank cell
};

std::vector<BenchmarkRecord> expand(const std::vector<std::string>& methods,
                                    const std::vector<std::optional<std::vector<double>>>& params, std::size_t d,
                                    const std::string& citation, const std::vector<Row>& rows) {
  std::vector<BenchmarkRecord> out;
  for (const Row& row : rows) {
    for (std::size_t c = 0; c < methods.size(); ++c) {
      const std::string text = row.cells[c];
      if (text.empty()) continue;
      double value = 0.0;
      std::from_chars(text.data(), text.data() + text.size(), value);
      out.push_back({methods[c], row.n, d, value, params[c], Provenance::paper_reference, citation, text});
    }
  }
  return out;
}

const std::vector<double> kI200{0.5494, 0.7867};
const std::vector<double> kI1500{0.6193, 0.7830};
const std::vector<double> kI2500{0.71810558, 0.81422429};

std::vector<BenchmarkRecord> build_table1() {
  return expand({"Sobol", "CMA-ES", "I_200", "I_1500", "I_2500", "L2_Subset"},
                {std::nullopt, std::nullopt, kI200, kI1500, kI2500, std::nullopt}, 3,
                "published reference table1: best found star discrepancy, d=3",
                {
                    {20, {"0.17742", "0.12221", "0.15029", "0.18194", "0.16935", "0.1202"}},
                    {25, {"0.14742", "0.10066", "0.12738", "0.14555", "0.14618", "0.1012"}},
                    {32, {"0.14917", "0.08813", "0.10094", "0.12083", "0.11420", "0.07931"}},
                    {40, {"0.11167", "0.07292", "0.08273", "0.09666", "0.09221", "0.06392"}},
                    {50, {"0.11276", "0.06371", "0.06986", "0.09356", "0.08682", "0.05337"}},
                    {60, {"0.08052", "0.05799", "0.06166", "0.08021", "0.07639", "0.0606"}},
                    {80, {"0.07862", "0.04709", "0.05099", "0.06199", "0.07525", "0.0547"}},
                    {100, {"0.06057", "0.04017", "0.04325", "0.04996", "0.06020", "0.0374"}},
                    {150, {"0.04062", "0.03009", "0.03489", "0.03331", "0.04014", "0.02499"}},
                    {200, {"0.03654", "0.02474", "0.02762", "0.02592", "0.03010", "0.02181"}},
                    {250, {"0.02645", "0.02023", "0.02210", "0.02158", "0.02408", "0.01837"}},
                    {300, {"0.02686", "0.01826", "0.01849", "0.01969", "0.02241", ""}},
                    {500, {"0.01524", "0.01115", "0.01402", "0.01252", "0.01344", "0.01125"}},
                    {750, {"0.01236", "0.00826", "0.01014", "0.00904", "0.00915", ""}},
                    {1000, {"0.00836", "0.00657", "0.00804", "0.00736", "0.00698", "0.0081"}},
                    {1250, {"0.00853", "", "0.00770", "0.00650", "0.00592", ""}},
                    {1500, {"0.00713", "", "0.00695", "0.00548", "0.00572", ""}},
                    {1750, {"0.00649", "", "0.00677", "0.00545", "0.00474", ""}},
                    {2000, {"0.00480", "", "0.00624", "0.00477", "0.00439", "0.00503"}},
                    {2500, {"0.00501", "", "0.00593", "0.00382", "0.00365", ""}},
                    {3000, {"0.00435", "", "0.00537", "0.00328", "0.00304", ""}},
                    {3500, {"0.00383", "", "0.00520", "0.00314", "0.00268", ""}},
                    {4000, {"0.00314", "", "0.00501", "0.00286", "0.00262", ""}},
                    {5000, {"0.00264", "", "0.00485", "0.00241", "0.00210", ""}},
                });
}

std::vector<BenchmarkRecord> build_table2() {
  return expand({"I_200", "o(I_200)", "L2_Subset", "o(L2_Subset)", "MPMC", "o(MPMC)"},
                {kI200, kI200, std::nullopt, std::nullopt, std::nullopt, std::nullopt}, 3,
                "published reference postprocessing_table2: star discrepancy before/after post-processing, d=3",
                {
                    {25, {"0.12738", "0.11029", "0.1012", "0.08519", "0.10664", "0.08335"}},
                    {32, {"0.10094", "0.08956", "0.07931", "0.07309", "0.08234", "0.07085"}},
                    {40, {"0.08273", "0.06082", "0.06392", "0.05988", "0.08139", "0.06242"}},
                    {50, {"0.06986", "0.05420", "0.05337", "0.04979", "0.05828", "0.05067"}},
                });
}

std::vector<BenchmarkRecord> build_table3() {
  return expand({"Sobol", "CMA-ES", "RTS", "Irace_512"}, {std::nullopt, std::nullopt, std::nullopt, std::nullopt}, 4,
                "published reference table3: star discrepancy, d=4",
                {
                    {5, {"0.28281", "0.34054", "0.34184", "0.43494263"}},
                    {8, {"0.23438", "0.29388", "0.27840", "0.32895087"}},
                    {16, {"0.13672", "0.17685", "0.19424", "0.24601968"}},
                    {20, {"0.11172", "0.15750", "0.16216", "0.22276414"}},
                    {32, {"0.08984", "0.12989", "0.12888", "0.1486705"}},
                    {50, {"0.07994", "0.08886", "0.09975", "0.09884006"}},
                    {64, {"0.05371", "0.07782", "0.08338", "0.10571434"}},
                });
}

}  // namespace

std::optional<ReferenceTable> parse_reference_table(std::string_view name) {
  if (name == "table1") return ReferenceTable::table1;
  if (name == "table3") return ReferenceTable::table3;
  if (name == "postprocessing_table2" || name == "table2") return ReferenceTable::postprocessing_table2;
  return std::nullopt;
}

const std::vector<BenchmarkRecord>& reference_table(ReferenceTable table) {
  static const std::vector<BenchmarkRecord> t1 = build_table1();
  static const std::vector<BenchmarkRecord> t2 = build_table2();
  static const std::vector<BenchmarkRecord> t3 = build_table3();
  switch (table) {
    case ReferenceTable::table1: return t1;
    case ReferenceTable::postprocessing_table2: return t2;
    case ReferenceTable::table3: return t3;
  }
  return t1;
}

const std::vector<NamedConfig>& published_configs() {
  static const std::vector<NamedConfig> configs{
      {"I_200", kI200, 2e-3},
      {"I_1500", kI1500, 2e-3},
      {"I_2500", kI2500, 1e-4},
  };
  return configs;
}

}  // namespace kronlow
