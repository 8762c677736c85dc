#include "kronlow/pointset.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kronlow/errors.hpp"

namespace kronlow {

PointSet::PointSet(std::size_t n, std::size_t d, std::vector<double> coords)
    : n_(n), d_(d), coords_(std::move(coords)) {
  if (d_ == 0) throw InputError("point set dimension must be >= 1");
  if (coords_.size() != n_ * d_)
    throw InputError("coordinate buffer has " + std::to_string(coords_.size()) +
                     " entries, expected " + std::to_string(n_ * d_));
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    const double c = coords_[k];
    if (!(c >= 0.0 && c <= 1.0))
      throw InputError("coordinate " + std::to_string(k % d_) + " of point " +
                       std::to_string(k / d_) + " is outside [0,1]");
  }
}

double frac(double x) noexcept {
  const double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

PointSet kronecker_set(std::size_t n, const KroneckerParams& params) {
  if (n == 0) throw InputError("kronecker_set: n must be >= 1");
  const std::size_t d = params.params.size();
  if (d == 0) throw InputError("kronecker_set: at least one parameter required");

  const double unit = 1.0 / static_cast<double>(n);
  std::vector<double> reduced(d);
  std::vector<bool> lattice(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double p = params.params[j];
    if (!std::isfinite(p)) throw InputError("kronecker_set: parameter " + std::to_string(j) + " is not finite");
    lattice[j] = (p == unit);
    reduced[j] = frac(p);
  }

  std::vector<double> coords(n * d);
  const std::size_t first = params.shifted ? 1 : 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = k + first;
    for (std::size_t j = 0; j < d; ++j) {
      coords[k * d + j] = lattice[j] ? static_cast<double>(i % n) / static_cast<double>(n)
                                     : frac(static_cast<double>(i) * reduced[j]);
    }
  }
  return PointSet(n, d, std::move(coords));
}

PointSet kronecker_with_unit_first(std::size_t n, std::span<const double> trailing, FirstAxis first) {
  if (n == 0) throw InputError("kronecker_with_unit_first: n must be >= 1");
  KroneckerParams kp;
  kp.shifted = true;
  kp.params.reserve(trailing.size() + 1);
  kp.params.push_back(1.0 / static_cast<double>(n));
  kp.params.insert(kp.params.end(), trailing.begin(), trailing.end());
  PointSet reduced = kronecker_set(n, kp);
  if (first == FirstAxis::reduced) return reduced;

  std::vector<double> coords = reduced.coords();
  const std::size_t d = kp.params.size();
  coords[(n - 1) * d] = 1.0;  // i = n: n/n stays 1 instead of wrapping to 0
  return PointSet(n, d, std::move(coords));
}

PointSet fibonacci_set(std::size_t n) {
  if (n == 0) throw InputError("fibonacci_set: n must be >= 1");
  return kronecker_set(n, {{1.0 / static_cast<double>(n), std::numbers::phi}, false});
}

}  // namespace kronlow
