#pragma once

#include <cstdint>
#include <random>

#include "ergodic_mi/hpd_cone.hpp"

namespace ergodic_mi {

// Seeded stream used by every channel generator.
//
// Engine: std::mt19937_64, whose output sequence is fixed by the C++ standard.
// Uniforms take the top 53 bits of one draw, u = (x >> 11) * 2^-53, mapped to
// (0, 1] by 1 - u. Standard normals come from the Box-Muller transform, both
// outputs used (cos branch first). A circular complex Gaussian CN(0, v) is
// sqrt(v/2) * (n1 + i n2) with n1 drawn first.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform_open_closed();
  double standard_normal();
  Complex complex_gaussian(double variance);
  // rows x cols matrix with i.i.d. CN(0, variance) entries, filled column-major.
  ComplexMatrix complex_gaussian_matrix(Index rows, Index cols, double variance);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

// Seed of substream `index` under `master`: splitmix64(master ^ splitmix64(index + 1)).
// Replications draw from disjoint, reproducible substreams.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);

}  // namespace ergodic_mi
