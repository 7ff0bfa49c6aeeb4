#include "ergodic_mi/rng.hpp"

#include <cmath>
#include <numbers>

namespace ergodic_mi {

double Rng::uniform_open_closed() {
  const std::uint64_t x = engine_();
  const double u = static_cast<double>(x >> 11) * 0x1.0p-53;
  return 1.0 - u;
}

double Rng::standard_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  const double u1 = uniform_open_closed();
  const double u2 = uniform_open_closed();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

Complex Rng::complex_gaussian(double variance) {
  const double s = std::sqrt(0.5 * variance);
  const double re = standard_normal();
  const double im = standard_normal();
  return {s * re, s * im};
}

ComplexMatrix Rng::complex_gaussian_matrix(Index rows, Index cols, double variance) {
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = complex_gaussian(variance);
  }
  return m;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

}  // namespace ergodic_mi
