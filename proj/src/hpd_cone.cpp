#include "ergodic_mi/hpd_cone.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ergodic_mi {

namespace {

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) throw DimensionError(std::string(what) + ": non-finite entry");
}

ComplexMatrix hermitize(const ComplexMatrix& m) {
  require_square(m, "hermitize");
  require_finite(m, "hermitize");
  const double asym = max_abs(m - m.adjoint());
  if (asym > tolerance::kHermitianInput * (1.0 + max_abs(m))) {
    throw DimensionError("hermitize: matrix is not Hermitian (asymmetry " + std::to_string(asym) +
                         ")");
  }
  ComplexMatrix h = (m + m.adjoint()) * 0.5;
  return h;
}

HpdMatrix HpdMatrix::strict(const ComplexMatrix& m) {
  ComplexMatrix h = hermitize(m);
  Eigen::LLT<ComplexMatrix> llt(h);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("HpdMatrix::strict: Cholesky factorization failed");
  }
  return HpdMatrix(std::move(h), Definiteness::kStrict);
}

HpdMatrix HpdMatrix::semidefinite(const ComplexMatrix& m) {
  ComplexMatrix h = hermitize(m);
  const EigenRange r = extreme_eigenvalues_hermitian(h);
  const double scale = std::max(std::abs(r.min), std::abs(r.max));
  if (r.min < -tolerance::kSemidefinite * scale) {
    throw NotPositiveDefinite("HpdMatrix::semidefinite: eigenvalue " + std::to_string(r.min) +
                              " below tolerance");
  }
  return HpdMatrix(std::move(h), Definiteness::kSemi);
}

HpdMatrix HpdMatrix::identity(Index dim) { return scaled_identity(dim, 1.0); }

HpdMatrix HpdMatrix::scaled_identity(Index dim, double scale) {
  if (dim <= 0) throw DimensionError("HpdMatrix::scaled_identity: dimension must be positive");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw NotPositiveDefinite("HpdMatrix::scaled_identity: scale must be positive");
  }
  return HpdMatrix(ComplexMatrix::Identity(dim, dim) * scale, Definiteness::kStrict);
}

HpdMatrix HpdMatrix::trusted(ComplexMatrix m, Definiteness d) {
  ComplexMatrix h = (m + m.adjoint()) * 0.5;
  return HpdMatrix(std::move(h), d);
}

double log_det_pd(const ComplexMatrix& m) {
  require_square(m, "log_det_pd");
  Eigen::LLT<ComplexMatrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("log_det_pd: Cholesky factorization failed");
  }
  const auto diag = llt.matrixLLT().diagonal();
  double acc = 0.0;
  for (Index i = 0; i < diag.size(); ++i) acc += std::log(diag(i).real());
  return 2.0 * acc;
}

// A semidefinite-flagged matrix may still be invertible; Cholesky decides.
double log_det_hpd(const HpdMatrix& x) { return log_det_pd(x.matrix()); }

double geodesic_distance(const HpdMatrix& x, const HpdMatrix& y) {
  if (x.dim() != y.dim()) {
    throw DimensionError("geodesic_distance: dimension mismatch " + std::to_string(x.dim()) +
                         " vs " + std::to_string(y.dim()));
  }
  Eigen::LLT<ComplexMatrix> lx(x.matrix());
  Eigen::LLT<ComplexMatrix> ly(y.matrix());
  if (lx.info() != Eigen::Success || ly.info() != Eigen::Success) {
    throw NotPositiveDefinite("geodesic_distance: argument is not positive definite");
  }
  // L* Y^{-1} L is similar to X Y^{-1} and Hermitian.
  const ComplexMatrix l = lx.matrixL();
  const ComplexMatrix core = l.adjoint() * ly.solve(l);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((core + core.adjoint()) * 0.5,
                                                  Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lg = std::log(es.eigenvalues()(i));
    acc += lg * lg;
  }
  return std::sqrt(acc);
}

double spectral_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

namespace {

// Returns the thin Q of a pivoted QR, or throws when a pivot is below threshold.
ComplexMatrix thin_q_full_rank(const ComplexMatrix& a) {
  require_finite(a, "orthogonal_projector");
  if (a.cols() == 0 || a.rows() < a.cols()) {
    throw RankDeficient("orthogonal_projector: " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " matrix cannot have full column rank");
  }
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(a);
  const double threshold = tolerance::kRankPivot * spectral_norm(a);
  const auto& r = qr.matrixQR();
  for (Index k = 0; k < a.cols(); ++k) {
    const double pivot = std::abs(r(k, k));
    if (!(pivot >= threshold) || pivot == 0.0) {
      throw RankDeficient("column pivot " + std::to_string(k) + " has magnitude " +
                          std::to_string(pivot) + " below threshold " +
                          std::to_string(threshold));
    }
  }
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(a.rows(), a.cols());
  return q;
}

}  // namespace

ComplexMatrix orthogonal_projector(const ComplexMatrix& a) {
  const ComplexMatrix q = thin_q_full_rank(a);
  ComplexMatrix p = q * q.adjoint();
  return (p + p.adjoint()) * 0.5;
}

bool has_full_column_rank(const ComplexMatrix& a) {
  try {
    (void)thin_q_full_rank(a);
    return true;
  } catch (const RankDeficient&) {
    return false;
  }
}

HpdMatrix hermitian_sqrt(const HpdMatrix& z) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(z.matrix());
  if (es.info() != Eigen::Success) throw NotPositiveDefinite("hermitian_sqrt: eigensolver failed");
  RealVector lambda = es.eigenvalues();
  const double scale = lambda.cwiseAbs().maxCoeff();
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -tolerance::kSemidefinite * scale) {
      throw NotPositiveDefinite("hermitian_sqrt: eigenvalue " + std::to_string(lambda(i)) +
                                " below tolerance");
    }
    lambda(i) = std::sqrt(std::max(lambda(i), 0.0));
  }
  const ComplexMatrix& v = es.eigenvectors();
  ComplexMatrix root = v * lambda.cast<Complex>().asDiagonal() * v.adjoint();
  const bool strict = z.is_strict() && lambda.minCoeff() > 0.0;
  return HpdMatrix::trusted(std::move(root), strict ? HpdMatrix::Definiteness::kStrict
                                                    : HpdMatrix::Definiteness::kSemi);
}

EigenRange extreme_eigenvalues_hermitian(const ComplexMatrix& s) {
  require_square(s, "extreme_eigenvalues");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s, Eigen::EigenvaluesOnly);
  const RealVector& ev = es.eigenvalues();  // ascending
  return {ev(0), ev(ev.size() - 1)};
}

EigenRange extreme_eigenvalues(const HpdMatrix& s) {
  return extreme_eigenvalues_hermitian(s.matrix());
}

}  // namespace ergodic_mi
