#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace kronlow {

// n points in the unit cube stored row-major. Coordinates lie in [0,1]; the
// value 1 only occurs on the unreduced lattice axis of
// kronecker_with_unit_first.
class PointSet {
 public:
  PointSet() = default;

  // Throws InputError if the shape is inconsistent or a coordinate lies
  // outside [0,1].
  PointSet(std::size_t n, std::size_t d, std::vector<double> coords);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }

  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * d_, d_};
  }
  double operator()(std::size_t i, std::size_t j) const noexcept { return coords_[i * d_ + j]; }

  const std::vector<double>& coords() const noexcept { return coords_; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> coords_;
};

struct KroneckerParams {
  std::vector<double> params;
  // true: indices 1..n, false: indices 0..n-1
  bool shifted = true;
};

// Point i has coordinate j equal to frac(i * p_j). A parameter that equals
// 1.0 / n exactly yields the exact lattice coordinate (i mod n) / n.
PointSet kronecker_set(std::size_t n, const KroneckerParams& params);

// How the p_1 = 1/n axis of kronecker_with_unit_first is formed.
//   unreduced: x_1 = i/n for i = 1..n, so the last point sits on x_1 = 1.
//              This is the convention behind the published reference values.
//   reduced:   x_1 = frac(i/n), the last point wraps to x_1 = 0.
enum class FirstAxis { unreduced, reduced };

// Shifted Kronecker set with p_1 = 1/n and the given trailing parameters.
PointSet kronecker_with_unit_first(std::size_t n, std::span<const double> trailing,
                                   FirstAxis first = FirstAxis::unreduced);

// {(i/n, frac(i * phi)) : i = 0..n-1}
PointSet fibonacci_set(std::size_t n);

inline constexpr std::size_t kSobolMaxDim = 10;

// First n points of the Sobol' sequence (index 0 is the origin), using the
// Joe-Kuo direction numbers for 1 <= d <= 10.
PointSet sobol_set(std::size_t n, std::size_t d);

// CSV format: "d=<d>,n=<n>" header, then one point per line written as the
// shortest decimal text that round-trips.
void save_csv(const PointSet& points, std::ostream& out);
void save_csv(const PointSet& points, const std::filesystem::path& path);
PointSet load_csv(std::istream& in);
PointSet load_csv(const std::filesystem::path& path);

// x - floor(x), mapped into [0,1) even when rounding would give 1.
double frac(double x) noexcept;

}  // namespace kronlow
