// Sobol' points from the Joe-Kuo "new-joe-kuo-6.21201" direction numbers.

#include <array>
#include <cstdint>
#include <string>

#include "kronlow/errors.hpp"
#include "kronlow/pointset.hpp"

namespace kronlow {
namespace {

constexpr unsigned kBits = 32;

struct DirectionNumbers {
  unsigned degree;       // s
  unsigned coefficients; // a
  std::array<std::uint32_t, 5> m;
};

// Dimensions 2..10; dimension 1 is the van der Corput sequence.
constexpr std::array<DirectionNumbers, kSobolMaxDim - 1> kTable{{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
}};

std::array<std::uint32_t, kBits> direction_vectors(std::size_t dim) {
  std::array<std::uint32_t, kBits> v{};
  if (dim == 0) {
    for (unsigned i = 0; i < kBits; ++i) v[i] = std::uint32_t{1} << (kBits - 1 - i);
    return v;
  }
  const DirectionNumbers& dn = kTable[dim - 1];
  const unsigned s = dn.degree;
  for (unsigned i = 0; i < s; ++i) v[i] = dn.m[i] << (kBits - 1 - i);
  for (unsigned i = s; i < kBits; ++i) {
    v[i] = v[i - s] ^ (v[i - s] >> s);
    for (unsigned k = 1; k < s; ++k) {
      if ((dn.coefficients >> (s - 1 - k)) & 1u) v[i] ^= v[i - k];
    }
  }
  return v;
}

}  // namespace

PointSet sobol_set(std::size_t n, std::size_t d) {
  if (n == 0) throw InputError("sobol_set: n must be >= 1");
  if (d == 0 || d > kSobolMaxDim)
    throw UnsupportedDimension("sobol_set: dimension " + std::to_string(d) + " outside supported range 1.." +
                               std::to_string(kSobolMaxDim));
  if (n > (std::size_t{1} << kBits)) throw InputError("sobol_set: n exceeds 2^32");

  std::vector<std::array<std::uint32_t, kBits>> dirs;
  dirs.reserve(d);
  for (std::size_t j = 0; j < d; ++j) dirs.push_back(direction_vectors(j));

  // Gray-code order would permute points within each 2^k block; the natural
  // order keeps prefix sets identical to the usual "first n points".
  constexpr double kScale = 1.0 / 4294967296.0;
  std::vector<double> coords(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      std::uint32_t x = 0;
      std::uint64_t bits = i;
      for (unsigned b = 0; bits != 0; ++b, bits >>= 1) {
        if (bits & 1u) x ^= dirs[j][b];
      }
      coords[i * d + j] = static_cast<double>(x) * kScale;
    }
  }
  return PointSet(n, d, std::move(coords));
}

}  // namespace kronlow
