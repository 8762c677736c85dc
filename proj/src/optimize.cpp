#include <string>

#include "kronlow/discrepancy.hpp"
#include "kronlow/errors.hpp"
#include "kronlow/optimize.hpp"
#include "kronlow/pointset.hpp"

namespace kronlow {

double kronecker_discrepancy(std::size_t n, std::span<const double> trailing) {
  return star_discrepancy_exact(kronecker_with_unit_first(n, trailing)).value;
}

OptResult optimize_kronecker(std::size_t n, std::size_t d, const OptimizerConfig& config, SearchMethod method) {
  if (d < 2 || d > 4) throw UnsupportedDimension("optimize_kronecker: d must be 2, 3 or 4, got " + std::to_string(d));
  if (n == 0) throw InputError("optimize_kronecker: n must be >= 1");
  const Objective objective = [n](std::span<const double> p) { return kronecker_discrepancy(n, p); };
  return method == SearchMethod::cmaes ? cmaes_minimize(objective, d - 1, config)
                                       : random_search(objective, d - 1, config);
}

}  // namespace kronlow
