#pragma once

// Stationary ergodic generators for the block channel (F_n, G_n).
//
// Symbol-level taps c_{t,l} (R x T, l = 0..L) follow one of several dynamics;
// L consecutive symbols are folded into one N x K block pair with N = R L and
// K = T L (F block upper triangular, G block lower triangular). For L = 0 the
// pair is F = 0, G = c_{t,0}.

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ergodic_mi/hpd_cone.hpp"
#include "ergodic_mi/rng.hpp"

namespace ergodic_mi {

struct ChannelPair {
  ComplexMatrix f;
  ComplexMatrix g;

  Index rows() const noexcept { return f.rows(); }
  Index cols() const noexcept { return f.cols(); }
};

// Taps of one symbol: L + 1 matrices of size R x T.
using TapArray = std::vector<ComplexMatrix>;

struct TapState {
  TapArray taps;                // current taps C_t
  std::deque<TapArray> history; // C_{t-1}, C_{t-2}, ... (most recent first)
};

enum class ModelVariant { kIidGaussian, kAr1Multipath, kGeneralAr, kMimoBlockAr, kRicianAr1 };

std::string_view to_string(ModelVariant v);
ModelVariant parse_model_variant(std::string_view s);

struct ProfileSpec {
  enum class Kind { kExponential, kWyner, kFlat, kExplicit };
  Kind kind = Kind::kExponential;
  double decay = 0.4;          // kExponential
  std::vector<double> values;  // kExplicit, normalized on use
};

struct ModelConfig {
  ModelVariant variant = ModelVariant::kAr1Multipath;
  int L = 0;
  int R = 1;
  int T = 1;
  // AR(1) coefficient; when only f_d is given alpha = exp(-f_d).
  std::optional<double> alpha;
  std::optional<double> f_d;
  ProfileSpec profile;
  double rice_factor = 0.0;
  // general-ar: A_1..A_M, each (L+1) x (L+1). mimo-block-ar: H_0..H_L, each R x R.
  std::vector<ComplexMatrix> ar_matrices;
  // Per-entry innovation variance for iid-gaussian, general-ar and
  // mimo-block-ar. Defaults: 1/(2T) for iid-gaussian, 1/T otherwise.
  std::optional<double> innovation_variance;
  std::uint64_t seed = 0;
};

// Throws ConfigError naming the offending "model.*" field.
void validate(const ModelConfig& cfg);
double resolved_alpha(const ModelConfig& cfg);
double resolved_innovation_variance(const ModelConfig& cfg);
// Block dimensions (N, K) produced by the model.
Index block_rows(const ModelConfig& cfg);
Index block_cols(const ModelConfig& cfg);
// Amplitude profile a (length L + 1, unit norm) for the multipath variants.
std::vector<double> amplitude_profile(const ModelConfig& cfg);

std::vector<double> exponential_profile(int L, double decay);
std::vector<double> wyner_profile(int L);
std::vector<double> flat_profile(int L);

// Folds L consecutive tap arrays into (F, G). Requires L >= 1.
ChannelPair taps_to_blocks(std::span<const TapArray> window, int L, int R, int T);
// L = 0 rule: F = 0, G = c_0.
ChannelPair scalar_blocks(const TapArray& taps);

// Draws C from the stationary AR(1) law: entries of c_l are CN(0, a_l^2 / T).
TapState ar1_stationary_state(std::span<const double> a, int R, int T, Rng& rng);
// c_l <- alpha c_l + sqrt(1 - alpha^2) a_l u_l, u_l entries CN(0, 1/T).
void ar1_step(TapState& state, double alpha, std::span<const double> a, int T, Rng& rng);

// Spectral radius of the block companion matrix of A_1..A_M.
double companion_spectral_radius(std::span<const ComplexMatrix> a);
// Steps needed for a transient to decay below 1e-8 at the given radius.
int burn_in_steps(double spectral_radius, int order);
// C_t = sum_m A_m C_{t-m} + U_t; A_m mixes delays, applied per antenna pair.
void general_ar_step(TapState& state, std::span<const ComplexMatrix> a, double innovation_variance,
                     Rng& rng);

// c_l <- H_l c_l + U_l for every delay l.
void mimo_block_ar_step(TapState& state, std::span<const ComplexMatrix> h,
                        double innovation_variance, Rng& rng);

// Line-of-sight matrix d_l(r, t) = a_l exp(2 i pi (r - t) sin(pi l / L)).
ComplexMatrix rician_los(int l, int L, double a_l, int R, int T);
// sqrt(K_R/(K_R+1)) d_l + sqrt(1/(K_R+1)) c.
ComplexMatrix rician_overlay(const ComplexMatrix& c, double rice_factor, double a_l, int L, int l);

// F, G with i.i.d. CN(0, variance) entries.
ChannelPair iid_gaussian_pair(Index n, Index k, double variance, Rng& rng);

// Stateful generator of the stationary block stream. Single owner.
class ChannelModel {
 public:
  explicit ChannelModel(ModelConfig cfg);

  ChannelPair next();

  Index rows() const noexcept { return n_; }
  Index cols() const noexcept { return k_; }
  const ModelConfig& config() const noexcept { return cfg_; }
  const std::vector<double>& profile() const noexcept { return profile_; }
  // Number of symbol steps discarded before the first block.
  int burn_in() const noexcept { return burn_in_; }

 private:
  void advance_symbol();
  TapArray observed_taps() const;

  ModelConfig cfg_;
  Index n_;
  Index k_;
  double alpha_ = 0.0;
  double innovation_variance_ = 0.0;
  std::vector<double> profile_;
  TapArray los_;  // rician line-of-sight matrix per delay
  Rng rng_;
  TapState state_;
  int burn_in_ = 0;
};

}  // namespace ergodic_mi
