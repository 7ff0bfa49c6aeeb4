#include "ergodic_mi/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ergodic_mi/kernels.hpp"

namespace ergodic_mi {

CesaroAccumulator::CesaroAccumulator(bool retain, std::size_t batch)
    : retain_(retain), batch_(batch == 0 ? 1 : batch) {}

void CesaroAccumulator::add(double increment) {
  ++count_;
  sum_ += increment;
  sum_sq_ += increment * increment;
  batch_sum_ += increment;
  if (++batch_fill_ == batch_) {
    batch_means_.push_back(batch_sum_ / static_cast<double>(batch_));
    batch_sum_ = 0.0;
    batch_fill_ = 0;
  }
  if (retain_) increments_.push_back(increment);
}

MiEstimate CesaroAccumulator::finish() const {
  MiEstimate est;
  est.n_steps = count_;
  if (count_ == 0) return est;
  est.value = sum_ / static_cast<double>(count_);
  const std::size_t batches = batch_means_.size();
  if (batches >= 2) {
    double mean = 0.0;
    for (double m : batch_means_) mean += m;
    mean /= static_cast<double>(batches);
    double ss = 0.0;
    for (double m : batch_means_) ss += (m - mean) * (m - mean);
    est.std_error = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  } else if (count_ >= 2) {
    const double n = static_cast<double>(count_);
    const double var = std::max(0.0, (sum_sq_ - sum_ * sum_ / n) / (n - 1.0));
    est.std_error = std::sqrt(var / n);
  }
  if (retain_) est.increments = increments_;
  return est;
}

ComplexMatrix build_block_bidiagonal(std::span<const ChannelPair> pairs) {
  if (pairs.empty()) throw DimensionError("build_block_bidiagonal: needs at least one pair");
  const Index n = pairs[0].f.rows();
  const Index k = pairs[0].f.cols();
  const auto blocks = static_cast<Index>(pairs.size());
  ComplexMatrix h = ComplexMatrix::Zero(blocks * n, (blocks + 1) * k);
  for (Index i = 0; i < blocks; ++i) {
    const ChannelPair& p = pairs[static_cast<std::size_t>(i)];
    if (p.f.rows() != n || p.f.cols() != k || p.g.rows() != n || p.g.cols() != k) {
      throw DimensionError("build_block_bidiagonal: mixed block shapes");
    }
    h.block(i * n, i * k, n, k) = p.f;
    h.block(i * n, (i + 1) * k, n, k) = p.g;
  }
  return h;
}

MiEstimate naive_mi(std::span<const ChannelPair> pairs, double rho) {
  if (!(rho >= 0.0)) throw DimensionError("naive_mi: rho must be >= 0");
  const ComplexMatrix gram = identity_plus_gram(pairs, rho);
  MiEstimate est;
  est.n_steps = pairs.size();
  est.value = log_det_pd(gram) / static_cast<double>(gram.rows());
  return est;
}

RealVector gram_eigenvalues(std::span<const ChannelPair> pairs) {
  ComplexMatrix gram = identity_plus_gram(pairs, 1.0);
  gram.diagonal().array() -= 1.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("gram_eigenvalues: eigensolver failed");
  return es.eigenvalues();
}

double mi_from_eigenvalues(const RealVector& eigenvalues, double rho, Index total_rows) {
  double acc = 0.0;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    acc += std::log1p(rho * std::max(eigenvalues(i), 0.0));
  }
  return acc / static_cast<double>(total_rows);
}

MiEstimate spectral_mi(std::span<const ChannelPair> pairs, double rho) {
  if (!(rho >= 0.0)) throw DimensionError("spectral_mi: rho must be >= 0");
  const RealVector ev = gram_eigenvalues(pairs);
  MiEstimate est;
  est.n_steps = pairs.size();
  est.value = mi_from_eigenvalues(ev, rho, ev.size());
  return est;
}

PsiStepResult psi_step_detail(const ComplexMatrix& f, const ComplexMatrix& g, double rho,
                              const HpdMatrix& w_prev) {
  const Index n = f.rows();
  const Index k = f.cols();
  if (g.rows() != n || g.cols() != k || w_prev.dim() != k) {
    throw DimensionError("psi_step: inconsistent dimensions");
  }
  if (!(rho >= 0.0)) throw DimensionError("psi_step: rho must be >= 0");

  ComplexMatrix inner = rho * (f * w_prev.matrix() * f.adjoint());
  inner.diagonal().array() += 1.0;
  Eigen::LLT<ComplexMatrix> inner_llt((inner + inner.adjoint()) * 0.5);
  if (inner_llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("psi_step: I + rho F W F* is not positive definite");
  }
  ComplexMatrix outer = rho * (g.adjoint() * inner_llt.solve(g));
  outer.diagonal().array() += 1.0;
  Eigen::LLT<ComplexMatrix> outer_llt((outer + outer.adjoint()) * 0.5);
  if (outer_llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("psi_step: I + rho G* (...)^{-1} G is not positive definite");
  }

  auto log_det_from = [](const Eigen::LLT<ComplexMatrix>& llt) {
    double acc = 0.0;
    const auto d = llt.matrixLLT().diagonal();
    for (Index i = 0; i < d.size(); ++i) acc += std::log(d(i).real());
    return 2.0 * acc;
  };
  ComplexMatrix w = outer_llt.solve(ComplexMatrix::Identity(k, k));
  return {HpdMatrix::trusted(std::move(w), HpdMatrix::Definiteness::kStrict),
          log_det_from(inner_llt), -log_det_from(outer_llt)};
}

HpdMatrix psi_step(const ComplexMatrix& f, const ComplexMatrix& g, double rho,
                   const HpdMatrix& w_prev) {
  return psi_step_detail(f, g, rho, w_prev).w;
}

double xi_increment(const ComplexMatrix& f, const ComplexMatrix& g, double rho,
                    const HpdMatrix& w_prev) {
  ComplexMatrix m = rho * (g * g.adjoint() + f * w_prev.matrix() * f.adjoint());
  m.diagonal().array() += 1.0;
  return log_det_pd((m + m.adjoint()) * 0.5);
}

double contraction_factor(const ComplexMatrix& g, double rho) {
  const double s = spectral_norm(g);
  const double x = rho * s * s;
  return x / (x + 1.0);
}

WRecursion::WRecursion(double rho, HpdMatrix x_init) : rho_(rho), x_(std::move(x_init)) {
  // A semidefinite start is fine: I + rho F X F* stays positive definite.
  if (!(rho >= 0.0)) throw DimensionError("WRecursion: rho must be >= 0");
}

double WRecursion::step(const ChannelPair& pair) {
  PsiStepResult r = psi_step_detail(pair.f, pair.g, rho_, x_);
  x_ = std::move(r.w);
  return r.log_det_inner - r.log_det_w;
}

HpdMatrix h_gamma_direct(const ComplexMatrix& f, const ComplexMatrix& g, double gamma,
                         const HpdMatrix& z) {
  const Index k = f.cols();
  if (g.rows() != f.rows() || g.cols() != k || z.dim() != k) {
    throw DimensionError("h_gamma: inconsistent dimensions");
  }
  if (!(gamma >= 0.0)) throw DimensionError("h_gamma: gamma must be >= 0");
  Eigen::LLT<ComplexMatrix> z_llt(z.matrix());
  if (z_llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("h_gamma_direct: Z is not positive definite");
  }
  ComplexMatrix inner = f * z_llt.solve(f.adjoint());
  inner.diagonal().array() += 1.0;
  Eigen::LLT<ComplexMatrix> inner_llt((inner + inner.adjoint()) * 0.5);
  if (inner_llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("h_gamma_direct: I + F Z^{-1} F* is not positive definite");
  }
  ComplexMatrix out = g.adjoint() * inner_llt.solve(g);
  out.diagonal().array() += gamma;
  return HpdMatrix::trusted(std::move(out), HpdMatrix::Definiteness::kSemi);
}

HpdMatrix h_gamma_semidefinite(const ComplexMatrix& f, const ComplexMatrix& g, double gamma,
                               const HpdMatrix& z) {
  const Index k = f.cols();
  if (g.rows() != f.rows() || g.cols() != k || z.dim() != k) {
    throw DimensionError("h_gamma: inconsistent dimensions");
  }
  if (!(gamma >= 0.0)) throw DimensionError("h_gamma: gamma must be >= 0");
  const ComplexMatrix proj = orthogonal_projector(f);  // throws RankDeficient
  Eigen::LLT<ComplexMatrix> ff_llt(f.adjoint() * f);
  if (ff_llt.info() != Eigen::Success) throw RankDeficient("h_gamma: F*F is singular");
  const ComplexMatrix p = ff_llt.solve(ComplexMatrix::Identity(k, k));
  const ComplexMatrix s = hermitian_sqrt(z).matrix();

  ComplexMatrix b = s * p * s;
  b.diagonal().array() += 1.0;
  Eigen::LLT<ComplexMatrix> b_llt((b + b.adjoint()) * 0.5);
  if (b_llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("h_gamma_semidefinite: I + Z^{1/2} P Z^{1/2} not positive definite");
  }
  const ComplexMatrix middle = s * b_llt.solve(s);
  const ComplexMatrix gfp = g.adjoint() * f * p;
  ComplexMatrix perp = -proj;
  perp.diagonal().array() += 1.0;
  ComplexMatrix out = gfp * middle * gfp.adjoint() + g.adjoint() * perp * g;
  out.diagonal().array() += gamma;
  return HpdMatrix::trusted(std::move(out), HpdMatrix::Definiteness::kSemi);
}

HpdMatrix h_gamma(const ComplexMatrix& f, const ComplexMatrix& g, double gamma,
                  const HpdMatrix& z) {
  const EigenRange r = extreme_eigenvalues(z);
  if (r.min > 1e-8 * r.max) return h_gamma_direct(f, g, gamma, z);
  return h_gamma_semidefinite(f, g, gamma, z);
}

namespace detail {

void require_tall(Index n, Index k) {
  if (n <= k) {
    throw DimensionError("high-SNR recursion needs N > K, got N = " + std::to_string(n) +
                         ", K = " + std::to_string(k));
  }
}

void throw_z_rank_failure(std::size_t step, const char* what) {
  throw RankDeficient("kappa_estimate: rank failure at step " + std::to_string(step) + ": " +
                      what);
}

}  // namespace detail

HpdMatrix z_step(const ComplexMatrix& f, const ComplexMatrix& g, const HpdMatrix& z_prev) {
  detail::require_tall(f.rows(), f.cols());
  if (!has_full_column_rank(f)) throw RankDeficient("z_step: F does not have full column rank");
  const HpdMatrix z = h_gamma(f, g, 0.0, z_prev);
  Eigen::LLT<ComplexMatrix> llt(z.matrix());
  if (llt.info() != Eigen::Success) {
    throw RankDeficient("z_step: result is not positive definite (G*F singular?)");
  }
  return HpdMatrix::trusted(z.matrix(), HpdMatrix::Definiteness::kStrict);
}

HpdMatrix w_to_z(const HpdMatrix& w, double gamma) {
  if (!(gamma > 0.0)) throw DimensionError("w_to_z: gamma must be > 0");
  Eigen::LLT<ComplexMatrix> llt(w.matrix());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("w_to_z: W is singular");
  ComplexMatrix z = gamma * llt.solve(ComplexMatrix::Identity(w.dim(), w.dim()));
  return HpdMatrix::trusted(std::move(z), HpdMatrix::Definiteness::kStrict);
}

double high_snr_slope_term(double rho, Index n, Index k) {
  return static_cast<double>(k) / static_cast<double>(n) * std::log(rho);
}

}  // namespace ergodic_mi
