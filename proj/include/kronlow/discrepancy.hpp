#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "kronlow/pointset.hpp"

namespace kronlow {

// open: volume minus the count of points strictly inside [0,q).
// closed: count of points in [0,q] minus the volume.
enum class BoxSide { open, closed };

std::string_view to_string(BoxSide side) noexcept;

struct DiscrepancyResult {
  double value = 0.0;
  std::vector<double> witness;
  BoxSide side = BoxSide::open;

  friend bool operator==(const DiscrepancyResult&, const DiscrepancyResult&) = default;
};

// q must lie in [0,1]^d. A zero component on the closed side is the limit of
// open boxes shrinking onto the hyperplane q_j = 0.
double local_discrepancy(const PointSet& points, std::span<const double> q, BoxSide side);

// Largest point count for which the oracle's grid enumeration is allowed
// (n^d <= 1e8).
inline constexpr double kOracleGridLimit = 1e8;

// Exhaustive enumeration of every corner of prod_j (X_j u {1}).
// Ties: larger value, then lexicographically smaller witness, then open.
DiscrepancyResult star_discrepancy_oracle(const PointSet& points);

inline constexpr std::size_t kExactMaxDim = 4;

// Same contract as the oracle, computed by sweeping the last coordinate
// while maintaining a dominance-count table over the remaining ones. Runs in
// O(n^d) time and O(n^(d-1)) memory.
DiscrepancyResult star_discrepancy_exact(const PointSet& points);

namespace detail {

// Shared by the oracle and the sweep so that equal corners give bitwise-equal
// values and tie-breaking agrees.
inline double corner_value(double volume, double count_fraction, BoxSide side) noexcept {
  return side == BoxSide::open ? volume - count_fraction : count_fraction - volume;
}

// Sorted distinct coordinates of axis j, with 1.0 appended.
std::vector<double> axis_grid(const PointSet& points, std::size_t j);

}  // namespace detail
}  // namespace kronlow
