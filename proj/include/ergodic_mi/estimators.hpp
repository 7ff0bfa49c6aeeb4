#pragma once

// Mutual-information estimators for the block channel.
//
// All values are in nats per received component (normalized by n N).

#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "ergodic_mi/channel_models.hpp"
#include "ergodic_mi/hpd_cone.hpp"

namespace ergodic_mi {

struct MiEstimate {
  double value = 0.0;
  std::size_t n_steps = 0;
  double std_error = 0.0;
  std::vector<double> increments;  // empty unless retained
};

// Running Cesaro average with batch-means standard error.
//
// Increments are serially correlated, so the standard error is the sample
// deviation of the means of consecutive batches (default 100 increments)
// divided by sqrt(#batches). With fewer than two full batches it falls back
// to the i.i.d. formula.
class CesaroAccumulator {
 public:
  static constexpr std::size_t kDefaultBatch = 100;

  explicit CesaroAccumulator(bool retain = false, std::size_t batch = kDefaultBatch);

  void add(double increment);
  std::size_t count() const noexcept { return count_; }
  MiEstimate finish() const;

 private:
  bool retain_;
  std::size_t batch_;
  std::size_t count_ = 0;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
  double batch_sum_ = 0.0;
  std::size_t batch_fill_ = 0;
  std::vector<double> batch_means_;
  std::vector<double> increments_;
};

template <class S>
concept ChannelStream = requires(S& s) {
  { s.next() } -> std::convertible_to<ChannelPair>;
};

// Replays a fixed list of pairs, cycling if read past the end.
class ReplayStream {
 public:
  explicit ReplayStream(std::span<const ChannelPair> pairs) : pairs_(pairs) {}
  ChannelPair next() {
    const ChannelPair& p = pairs_[pos_];
    pos_ = (pos_ + 1) % pairs_.size();
    return p;
  }

 private:
  std::span<const ChannelPair> pairs_;
  std::size_t pos_ = 0;
};

// nN x (n+1)K matrix with F_i at block (i, i) and G_i at block (i, i+1).
ComplexMatrix build_block_bidiagonal(std::span<const ChannelPair> pairs);

// (1/(nN)) log det(I + rho H H*) via Cholesky of the assembled Gram matrix.
MiEstimate naive_mi(std::span<const ChannelPair> pairs, double rho);

// Eigenvalues of H H* (ascending) and the same quantity computed from them.
RealVector gram_eigenvalues(std::span<const ChannelPair> pairs);
double mi_from_eigenvalues(const RealVector& eigenvalues, double rho, Index total_rows);
MiEstimate spectral_mi(std::span<const ChannelPair> pairs, double rho);

struct PsiStepResult {
  HpdMatrix w;
  double log_det_inner;  // log det(I + rho F W_prev F*)
  double log_det_w;      // log det W
};

// W = (I + rho G* (I + rho F W_prev F*)^{-1} G)^{-1}.
PsiStepResult psi_step_detail(const ComplexMatrix& f, const ComplexMatrix& g, double rho,
                              const HpdMatrix& w_prev);
HpdMatrix psi_step(const ComplexMatrix& f, const ComplexMatrix& g, double rho,
                   const HpdMatrix& w_prev);

// log det(I + rho G G* + rho F W_prev F*): the same per-step increment written
// without W_n.
double xi_increment(const ComplexMatrix& f, const ComplexMatrix& g, double rho,
                    const HpdMatrix& w_prev);

// rho ||G||^2 / (rho ||G||^2 + 1), the per-step Lipschitz constant of psi in
// the geodesic distance.
double contraction_factor(const ComplexMatrix& g, double rho);

// Coupled W-process driven by a channel stream.
class WRecursion {
 public:
  WRecursion(double rho, HpdMatrix x_init);

  // Advances the state with (F, G) and returns the unnormalized increment
  // log det(I + rho F X_prev F*) - log det X.
  double step(const ChannelPair& pair);
  const HpdMatrix& state() const noexcept { return x_; }
  double rho() const noexcept { return rho_; }

 private:
  double rho_;
  HpdMatrix x_;
};

struct RecursionOptions {
  std::size_t n_steps = 1;
  std::size_t burn_in = 200;
  bool retain_increments = false;
};

// Cesaro average of the W-recursion increments over n_steps - burn_in steps.
template <ChannelStream S>
MiEstimate recursive_mi(S& stream, double rho, const HpdMatrix& x_init, RecursionOptions opt);

// Defaults to X_init = I.
template <ChannelStream S>
MiEstimate recursive_mi(S& stream, double rho, Index k, RecursionOptions opt) {
  return recursive_mi(stream, rho, HpdMatrix::identity(k), opt);
}

// gamma I + G* (I + F Z^{-1} F*)^{-1} G; Z strictly PD.
HpdMatrix h_gamma_direct(const ComplexMatrix& f, const ComplexMatrix& g, double gamma,
                         const HpdMatrix& z);
// Extension valid for singular Z when F has full column rank:
// gamma I + G*F P Z^{1/2} (I + Z^{1/2} P Z^{1/2})^{-1} Z^{1/2} P F*G + G* Pi_F^perp G,
// with P = (F*F)^{-1}.
HpdMatrix h_gamma_semidefinite(const ComplexMatrix& f, const ComplexMatrix& g, double gamma,
                               const HpdMatrix& z);
// Uses the direct form when lambda_min(Z) > 1e-8 lambda_max(Z), else the
// semidefinite extension.
HpdMatrix h_gamma(const ComplexMatrix& f, const ComplexMatrix& g, double gamma,
                  const HpdMatrix& z);

// Z = G* (I + F Z_prev^{-1} F*)^{-1} G. Requires N > K and F of full column
// rank; throws RankDeficient when the result is not strictly positive.
HpdMatrix z_step(const ComplexMatrix& f, const ComplexMatrix& g, const HpdMatrix& z_prev);

// gamma W^{-1}.
HpdMatrix w_to_z(const HpdMatrix& w, double gamma);

// (K/N) log rho: the leading high-SNR term.
double high_snr_slope_term(double rho, Index n, Index k);

// Estimate of the high-SNR offset from the Z-recursion:
// (1/(nN)) sum log det(X_l + F_{l+1}* F_{l+1}).
template <ChannelStream S>
MiEstimate kappa_estimate(S& stream, const HpdMatrix& x_init, RecursionOptions opt);

// ---------------------------------------------------------------------------

template <ChannelStream S>
MiEstimate recursive_mi(S& stream, double rho, const HpdMatrix& x_init, RecursionOptions opt) {
  if (opt.n_steps == 0) throw DimensionError("recursive_mi: n_steps must be >= 1");
  if (opt.burn_in >= opt.n_steps) throw DimensionError("recursive_mi: burn_in must be < n_steps");
  if (!(rho >= 0.0)) throw DimensionError("recursive_mi: rho must be >= 0");
  WRecursion rec(rho, x_init);
  CesaroAccumulator acc(opt.retain_increments);
  Index n = 0;
  for (std::size_t step = 0; step < opt.n_steps; ++step) {
    const ChannelPair pair = stream.next();
    n = pair.rows();
    const double inc = rec.step(pair);
    if (step >= opt.burn_in) acc.add(inc / static_cast<double>(n));
  }
  return acc.finish();
}

namespace detail {
[[noreturn]] void throw_z_rank_failure(std::size_t step, const char* what);
void require_tall(Index n, Index k);
}  // namespace detail

template <ChannelStream S>
MiEstimate kappa_estimate(S& stream, const HpdMatrix& x_init, RecursionOptions opt) {
  if (opt.n_steps == 0) throw DimensionError("kappa_estimate: n_steps must be >= 1");
  if (opt.burn_in >= opt.n_steps) throw DimensionError("kappa_estimate: burn_in must be < n_steps");
  CesaroAccumulator acc(opt.retain_increments);
  HpdMatrix x = x_init;
  ChannelPair current = stream.next();
  detail::require_tall(current.rows(), current.cols());
  for (std::size_t step = 0; step < opt.n_steps; ++step) {
    try {
      x = z_step(current.f, current.g, x);
    } catch (const RankDeficient& e) {
      detail::throw_z_rank_failure(step, e.what());
    }
    ChannelPair upcoming = stream.next();
    if (step >= opt.burn_in) {
      const ComplexMatrix m = x.matrix() + upcoming.f.adjoint() * upcoming.f;
      acc.add(log_det_pd(m) / static_cast<double>(current.rows()));
    }
    current = std::move(upcoming);
  }
  return acc.finish();
}

}  // namespace ergodic_mi
