#pragma once

// Dense complex linear algebra on the cone of Hermitian positive
// (semi)definite matrices.

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "ergodic_mi/errors.hpp"

namespace ergodic_mi {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Throws DimensionError if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, const char* what);

// Hermitian K x K matrix that is known to be positive definite (kStrict) or
// positive semidefinite (kSemi). Immutable once built.
class HpdMatrix {
 public:
  enum class Definiteness { kStrict, kSemi };

  // Symmetrizes (M + M*)/2, then requires a successful Cholesky.
  static HpdMatrix strict(const ComplexMatrix& m);
  // Symmetrizes, then requires lambda_min >= -1e-10 * ||M||.
  static HpdMatrix semidefinite(const ComplexMatrix& m);
  static HpdMatrix identity(Index dim);
  static HpdMatrix scaled_identity(Index dim, double scale);

  // Skips the definiteness check. Only for outputs of maps that preserve the
  // cone algebraically (inverse of a PD matrix, I + PSD, ...).
  static HpdMatrix trusted(ComplexMatrix m, Definiteness d);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  Definiteness definiteness() const noexcept { return definiteness_; }
  bool is_strict() const noexcept { return definiteness_ == Definiteness::kStrict; }

 private:
  HpdMatrix(ComplexMatrix m, Definiteness d) : m_(std::move(m)), definiteness_(d) {}

  ComplexMatrix m_;
  Definiteness definiteness_;
};

// (M + M*) / 2 after a square/finite check.
ComplexMatrix hermitize(const ComplexMatrix& m);

// Geodesic distance of the affine-invariant metric on the PD cone:
// sqrt(sum_i log^2 lambda_i) with lambda_i the eigenvalues of X^{1/2} Y^{-1} X^{1/2}.
double geodesic_distance(const HpdMatrix& x, const HpdMatrix& y);

// log det X in nats, via Cholesky pivots.
double log_det_hpd(const HpdMatrix& x);
// Same on a raw matrix that must be Hermitian PD; throws NotPositiveDefinite.
double log_det_pd(const ComplexMatrix& m);

// Orthogonal projector A (A*A)^{-1} A* on the column space of A. Throws
// RankDeficient when a QR pivot drops below 1e-10 * ||A||.
ComplexMatrix orthogonal_projector(const ComplexMatrix& a);
// True when A passes the same pivot test.
bool has_full_column_rank(const ComplexMatrix& a);

// Unique PSD square root. Eigenvalues in [-1e-10 ||Z||, 0) are clipped to 0.
HpdMatrix hermitian_sqrt(const HpdMatrix& z);

struct EigenRange {
  double min;
  double max;
};
EigenRange extreme_eigenvalues(const HpdMatrix& s);
// For any Hermitian matrix, not necessarily in the cone.
EigenRange extreme_eigenvalues_hermitian(const ComplexMatrix& s);

// Largest singular value.
double spectral_norm(const ComplexMatrix& a);

namespace tolerance {
inline constexpr double kRankPivot = 1e-10;
inline constexpr double kSemidefinite = 1e-10;
// Inputs whose anti-Hermitian part exceeds this (relative) are rejected
// rather than silently symmetrized.
inline constexpr double kHermitianInput = 1e-8;
}  // namespace tolerance

}  // namespace ergodic_mi
