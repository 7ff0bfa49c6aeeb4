#include "ergodic_mi/channel_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ergodic_mi/errors.hpp"

namespace ergodic_mi {

namespace {

constexpr double kStabilityMargin = 1e-9;

void normalize(std::vector<double>& a) {
  const double norm = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
  for (double& x : a) x /= norm;
}

double matrix_spectral_radius(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool uses_profile(ModelVariant v) {
  return v == ModelVariant::kAr1Multipath || v == ModelVariant::kRicianAr1;
}

bool uses_innovation_variance(ModelVariant v) {
  return v == ModelVariant::kIidGaussian || v == ModelVariant::kGeneralAr ||
         v == ModelVariant::kMimoBlockAr;
}

// H_0..H_L for mimo-block-ar; alpha * I when none are configured.
std::vector<ComplexMatrix> mimo_dynamics(const ModelConfig& cfg) {
  if (!cfg.ar_matrices.empty()) return cfg.ar_matrices;
  const double alpha = resolved_alpha(cfg);
  return std::vector<ComplexMatrix>(static_cast<std::size_t>(cfg.L) + 1,
                                    ComplexMatrix::Identity(cfg.R, cfg.R) * alpha);
}

}  // namespace

std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::kIidGaussian: return "iid-gaussian";
    case ModelVariant::kAr1Multipath: return "ar1-multipath";
    case ModelVariant::kGeneralAr: return "general-ar";
    case ModelVariant::kMimoBlockAr: return "mimo-block-ar";
    case ModelVariant::kRicianAr1: return "rician-ar1";
  }
  return "unknown";
}

ModelVariant parse_model_variant(std::string_view s) {
  for (ModelVariant v : {ModelVariant::kIidGaussian, ModelVariant::kAr1Multipath,
                         ModelVariant::kGeneralAr, ModelVariant::kMimoBlockAr,
                         ModelVariant::kRicianAr1}) {
    if (to_string(v) == s) return v;
  }
  throw ConfigError("model.variant", "unknown variant '" + std::string(s) + "'");
}

double resolved_alpha(const ModelConfig& cfg) {
  if (cfg.alpha && cfg.f_d) {
    if (std::abs(*cfg.alpha - std::exp(-*cfg.f_d)) > 1e-12) {
      throw ConfigError("model.alpha", "inconsistent with exp(-f_d)");
    }
  }
  if (cfg.alpha) return *cfg.alpha;
  if (cfg.f_d) return std::exp(-*cfg.f_d);
  return 0.0;
}

double resolved_innovation_variance(const ModelConfig& cfg) {
  if (cfg.innovation_variance) return *cfg.innovation_variance;
  if (cfg.variant == ModelVariant::kIidGaussian) return 1.0 / (2.0 * cfg.T);
  return 1.0 / cfg.T;
}

Index block_rows(const ModelConfig& cfg) {
  return static_cast<Index>(cfg.R) * std::max(cfg.L, 1);
}

Index block_cols(const ModelConfig& cfg) {
  return static_cast<Index>(cfg.T) * std::max(cfg.L, 1);
}

std::vector<double> exponential_profile(int L, double decay) {
  std::vector<double> a(static_cast<std::size_t>(L) + 1);
  for (int l = 0; l <= L; ++l) a[l] = std::exp(-decay * l);
  normalize(a);
  return a;
}

std::vector<double> wyner_profile(int L) {
  if (L < 1) throw ConfigError("model.profile", "wyner profile needs L >= 1");
  std::vector<double> a(static_cast<std::size_t>(L) + 1);
  for (int l = 0; l <= L; ++l) {
    const double d = std::abs(10.0 * (l - L / 2.0) / L);
    a[l] = std::sqrt(1.0 / (10.0 + d * d * d));
  }
  normalize(a);
  return a;
}

std::vector<double> flat_profile(int L) {
  return std::vector<double>(static_cast<std::size_t>(L) + 1, 1.0 / std::sqrt(L + 1.0));
}

std::vector<double> amplitude_profile(const ModelConfig& cfg) {
  switch (cfg.profile.kind) {
    case ProfileSpec::Kind::kExponential: return exponential_profile(cfg.L, cfg.profile.decay);
    case ProfileSpec::Kind::kWyner: return wyner_profile(cfg.L);
    case ProfileSpec::Kind::kFlat: return flat_profile(cfg.L);
    case ProfileSpec::Kind::kExplicit: {
      std::vector<double> a = cfg.profile.values;
      normalize(a);
      return a;
    }
  }
  return {};
}

void validate(const ModelConfig& cfg) {
  if (cfg.L < 0) throw ConfigError("model.L", "must be >= 0");
  if (cfg.R < 1) throw ConfigError("model.R", "must be >= 1");
  if (cfg.T < 1) throw ConfigError("model.T", "must be >= 1");
  if (cfg.f_d && !(*cfg.f_d >= 0.0)) throw ConfigError("model.f_d", "must be >= 0");
  const double alpha = resolved_alpha(cfg);
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw ConfigError("model.alpha", "must lie in [0, 1) for a stationary process");
  }
  if (!(cfg.rice_factor >= 0.0) || !std::isfinite(cfg.rice_factor)) {
    throw ConfigError("model.rice_factor", "must be finite and >= 0");
  }
  if (cfg.rice_factor != 0.0 && cfg.variant != ModelVariant::kRicianAr1) {
    throw ConfigError("model.rice_factor", "only the rician-ar1 variant takes a Rice factor");
  }
  if (cfg.variant == ModelVariant::kRicianAr1 && cfg.rice_factor != 0.0 && cfg.L == 0) {
    throw ConfigError("model.rice_factor", "line-of-sight phase needs L >= 1");
  }
  if (cfg.innovation_variance) {
    if (!uses_innovation_variance(cfg.variant)) {
      throw ConfigError("model.innovation_variance",
                        "not configurable for " + std::string(to_string(cfg.variant)));
    }
    if (!(*cfg.innovation_variance >= 0.0) || !std::isfinite(*cfg.innovation_variance)) {
      throw ConfigError("model.innovation_variance", "must be finite and >= 0");
    }
  }
  if (uses_profile(cfg.variant)) {
    const ProfileSpec& p = cfg.profile;
    if (p.kind == ProfileSpec::Kind::kExponential && !(p.decay >= 0.0)) {
      throw ConfigError("model.profile.decay", "must be >= 0");
    }
    if (p.kind == ProfileSpec::Kind::kWyner && cfg.L < 1) {
      throw ConfigError("model.profile", "wyner profile needs L >= 1");
    }
    if (p.kind == ProfileSpec::Kind::kExplicit) {
      if (p.values.size() != static_cast<std::size_t>(cfg.L) + 1) {
        throw ConfigError("model.profile.values", "needs L + 1 entries");
      }
      double norm2 = 0.0;
      for (double v : p.values) {
        if (!std::isfinite(v)) throw ConfigError("model.profile.values", "non-finite entry");
        norm2 += v * v;
      }
      if (!(norm2 > 0.0)) throw ConfigError("model.profile.values", "all-zero profile");
    }
  }
  switch (cfg.variant) {
    case ModelVariant::kIidGaussian:
      if (cfg.L != 0) throw ConfigError("model.L", "iid-gaussian uses N = R, K = T; set L = 0");
      [[fallthrough]];
    case ModelVariant::kAr1Multipath:
    case ModelVariant::kRicianAr1:
      if (!cfg.ar_matrices.empty()) {
        throw ConfigError("model.ar_matrices", "not used by " + std::string(to_string(cfg.variant)));
      }
      break;
    case ModelVariant::kGeneralAr: {
      if (cfg.ar_matrices.empty()) throw ConfigError("model.ar_matrices", "general-ar needs A_1..A_M");
      for (std::size_t m = 0; m < cfg.ar_matrices.size(); ++m) {
        const ComplexMatrix& a = cfg.ar_matrices[m];
        if (a.rows() != cfg.L + 1 || a.cols() != cfg.L + 1) {
          throw ConfigError("model.ar_matrices[" + std::to_string(m) + "]",
                            "must be (L+1) x (L+1)");
        }
        if (!a.allFinite()) {
          throw ConfigError("model.ar_matrices[" + std::to_string(m) + "]", "non-finite entry");
        }
      }
      const double radius = companion_spectral_radius(cfg.ar_matrices);
      if (radius >= 1.0 - kStabilityMargin) {
        throw UnstableModel("general-ar companion matrix has spectral radius " +
                                std::to_string(radius) + " >= 1",
                            radius);
      }
      break;
    }
    case ModelVariant::kMimoBlockAr: {
      if (!cfg.ar_matrices.empty() &&
          cfg.ar_matrices.size() != static_cast<std::size_t>(cfg.L) + 1) {
        throw ConfigError("model.ar_matrices", "mimo-block-ar needs H_0..H_L");
      }
      const auto h = mimo_dynamics(cfg);
      for (std::size_t l = 0; l < h.size(); ++l) {
        if (h[l].rows() != cfg.R || h[l].cols() != cfg.R) {
          throw ConfigError("model.ar_matrices[" + std::to_string(l) + "]", "must be R x R");
        }
        if (!h[l].allFinite()) {
          throw ConfigError("model.ar_matrices[" + std::to_string(l) + "]", "non-finite entry");
        }
        const double radius = matrix_spectral_radius(h[l]);
        if (radius >= 1.0 - kStabilityMargin) {
          throw UnstableModel("H_" + std::to_string(l) + " has spectral radius " +
                                  std::to_string(radius) + " >= 1",
                              radius);
        }
      }
      break;
    }
  }
}

ChannelPair taps_to_blocks(std::span<const TapArray> window, int L, int R, int T) {
  if (L < 1) throw DimensionError("taps_to_blocks: L must be >= 1 (use scalar_blocks for L = 0)");
  if (window.size() != static_cast<std::size_t>(L)) {
    throw DimensionError("taps_to_blocks: window must hold L tap arrays");
  }
  ChannelPair p{ComplexMatrix::Zero(static_cast<Index>(R) * L, static_cast<Index>(T) * L),
                ComplexMatrix::Zero(static_cast<Index>(R) * L, static_cast<Index>(T) * L)};
  for (int i = 0; i < L; ++i) {
    const TapArray& c = window[i];
    if (c.size() != static_cast<std::size_t>(L) + 1) {
      throw DimensionError("taps_to_blocks: each tap array needs L + 1 delays");
    }
    for (const ComplexMatrix& tap : c) {
      if (tap.rows() != R || tap.cols() != T) throw DimensionError("taps_to_blocks: tap is not R x T");
    }
    // Row i of [F | G] for symbol nL + i: F(i, j) = c_{L-(j-i)} for j >= i,
    // G(i, j) = c_{i-j} for j <= i.
    for (int j = i; j < L; ++j) p.f.block(i * R, j * T, R, T) = c[L - (j - i)];
    for (int j = 0; j <= i; ++j) p.g.block(i * R, j * T, R, T) = c[i - j];
  }
  return p;
}

ChannelPair scalar_blocks(const TapArray& taps) {
  if (taps.size() != 1) throw DimensionError("scalar_blocks: expected a single delay");
  return {ComplexMatrix::Zero(taps[0].rows(), taps[0].cols()), taps[0]};
}

TapState ar1_stationary_state(std::span<const double> a, int R, int T, Rng& rng) {
  TapState s;
  s.taps.reserve(a.size());
  for (double al : a) s.taps.push_back(rng.complex_gaussian_matrix(R, T, al * al / T));
  return s;
}

void ar1_step(TapState& state, double alpha, std::span<const double> a, int T, Rng& rng) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha", "must lie in [0, 1)");
  if (state.taps.size() != a.size()) throw DimensionError("ar1_step: profile/tap length mismatch");
  const double drive = std::sqrt(1.0 - alpha * alpha);
  for (std::size_t l = 0; l < a.size(); ++l) {
    ComplexMatrix& c = state.taps[l];
    const ComplexMatrix u = rng.complex_gaussian_matrix(c.rows(), c.cols(), 1.0 / T);
    c = alpha * c + (drive * a[l]) * u;
  }
}

double companion_spectral_radius(std::span<const ComplexMatrix> a) {
  if (a.empty()) return 0.0;
  const Index d = a[0].rows();
  const Index m = static_cast<Index>(a.size());
  ComplexMatrix companion = ComplexMatrix::Zero(d * m, d * m);
  for (Index i = 0; i < m; ++i) companion.block(0, i * d, d, d) = a[i];
  if (m > 1) companion.block(d, 0, d * (m - 1), d * (m - 1)).setIdentity();
  return matrix_spectral_radius(companion);
}

int burn_in_steps(double spectral_radius, int order) {
  if (spectral_radius <= 0.0) return order;
  const double steps = std::ceil(std::log(1e-8) / std::log(spectral_radius));
  return std::max(order, static_cast<int>(steps));
}

void general_ar_step(TapState& state, std::span<const ComplexMatrix> a, double innovation_variance,
                     Rng& rng) {
  const std::size_t order = a.size();
  const std::size_t delays = state.taps.size();
  if (order == 0) throw DimensionError("general_ar_step: needs at least one AR matrix");
  const Index r = state.taps[0].rows();
  const Index t = state.taps[0].cols();
  TapArray next(delays, ComplexMatrix::Zero(r, t));
  for (std::size_t m = 0; m < order; ++m) {
    const TapArray* past = nullptr;
    if (m == 0) {
      past = &state.taps;
    } else if (m - 1 < state.history.size()) {
      past = &state.history[m - 1];
    } else {
      continue;  // zero history before the first samples
    }
    if (a[m].rows() != static_cast<Index>(delays) || a[m].cols() != static_cast<Index>(delays)) {
      throw DimensionError("general_ar_step: A_m must be (L+1) x (L+1)");
    }
    for (std::size_t l = 0; l < delays; ++l) {
      for (std::size_t j = 0; j < delays; ++j) {
        const Complex coef = a[m](static_cast<Index>(l), static_cast<Index>(j));
        if (coef != Complex(0.0)) next[l] += coef * (*past)[j];
      }
    }
  }
  for (std::size_t l = 0; l < delays; ++l) {
    next[l] += rng.complex_gaussian_matrix(r, t, innovation_variance);
  }
  state.history.push_front(std::move(state.taps));
  while (state.history.size() > order - 1) state.history.pop_back();
  state.taps = std::move(next);
}

void mimo_block_ar_step(TapState& state, std::span<const ComplexMatrix> h,
                        double innovation_variance, Rng& rng) {
  if (h.size() != state.taps.size()) {
    throw DimensionError("mimo_block_ar_step: need one H_l per delay");
  }
  for (std::size_t l = 0; l < h.size(); ++l) {
    ComplexMatrix& c = state.taps[l];
    if (h[l].rows() != c.rows() || h[l].cols() != c.rows()) {
      throw DimensionError("mimo_block_ar_step: H_l must be R x R");
    }
    c = h[l] * c + rng.complex_gaussian_matrix(c.rows(), c.cols(), innovation_variance);
  }
}

ComplexMatrix rician_los(int l, int L, double a_l, int R, int T) {
  if (L < 1) throw ConfigError("model.rice_factor", "line-of-sight phase needs L >= 1");
  const double s = std::sin(std::numbers::pi * l / L);
  ComplexMatrix d(R, T);
  for (int r = 0; r < R; ++r) {
    for (int t = 0; t < T; ++t) {
      d(r, t) = a_l * std::exp(Complex(0.0, 2.0 * std::numbers::pi * (r - t) * s));
    }
  }
  return d;
}

ComplexMatrix rician_overlay(const ComplexMatrix& c, double rice_factor, double a_l, int L, int l) {
  if (!(rice_factor >= 0.0)) throw ConfigError("rice_factor", "must be >= 0");
  if (rice_factor == 0.0) return c;
  if (l < 0 || l > L) throw DimensionError("rician_overlay: delay index out of range");
  const ComplexMatrix d =
      rician_los(l, L, a_l, static_cast<int>(c.rows()), static_cast<int>(c.cols()));
  return std::sqrt(rice_factor / (rice_factor + 1.0)) * d +
         std::sqrt(1.0 / (rice_factor + 1.0)) * c;
}

ChannelPair iid_gaussian_pair(Index n, Index k, double variance, Rng& rng) {
  if (n < 1 || k < 1) throw DimensionError("iid_gaussian_pair: N, K must be >= 1");
  ChannelPair p;
  p.f = rng.complex_gaussian_matrix(n, k, variance);
  p.g = rng.complex_gaussian_matrix(n, k, variance);
  return p;
}

ChannelModel::ChannelModel(ModelConfig cfg)
    : cfg_(std::move(cfg)), n_(0), k_(0), rng_(cfg_.seed) {
  validate(cfg_);
  n_ = block_rows(cfg_);
  k_ = block_cols(cfg_);
  alpha_ = resolved_alpha(cfg_);
  innovation_variance_ = resolved_innovation_variance(cfg_);
  if (uses_profile(cfg_.variant)) profile_ = amplitude_profile(cfg_);

  const std::size_t delays = static_cast<std::size_t>(cfg_.L) + 1;
  switch (cfg_.variant) {
    case ModelVariant::kIidGaussian:
      break;
    case ModelVariant::kAr1Multipath:
    case ModelVariant::kRicianAr1:
      state_ = ar1_stationary_state(profile_, cfg_.R, cfg_.T, rng_);
      if (cfg_.variant == ModelVariant::kRicianAr1 && cfg_.rice_factor > 0.0) {
        for (int l = 0; l <= cfg_.L; ++l) {
          los_.push_back(rician_los(l, cfg_.L, profile_[l], cfg_.R, cfg_.T));
        }
      }
      break;
    case ModelVariant::kGeneralAr: {
      state_.taps.assign(delays, ComplexMatrix::Zero(cfg_.R, cfg_.T));
      const int order = static_cast<int>(cfg_.ar_matrices.size());
      burn_in_ = burn_in_steps(companion_spectral_radius(cfg_.ar_matrices), order);
      for (int i = 0; i < burn_in_; ++i) advance_symbol();
      break;
    }
    case ModelVariant::kMimoBlockAr: {
      if (cfg_.ar_matrices.empty()) cfg_.ar_matrices = mimo_dynamics(cfg_);
      state_.taps.assign(delays, ComplexMatrix::Zero(cfg_.R, cfg_.T));
      double radius = 0.0;
      for (const auto& h : cfg_.ar_matrices) radius = std::max(radius, matrix_spectral_radius(h));
      burn_in_ = burn_in_steps(radius, 1);
      for (int i = 0; i < burn_in_; ++i) advance_symbol();
      break;
    }
  }
}

void ChannelModel::advance_symbol() {
  switch (cfg_.variant) {
    case ModelVariant::kIidGaussian:
      break;
    case ModelVariant::kAr1Multipath:
    case ModelVariant::kRicianAr1:
      ar1_step(state_, alpha_, profile_, cfg_.T, rng_);
      break;
    case ModelVariant::kGeneralAr:
      general_ar_step(state_, cfg_.ar_matrices, innovation_variance_, rng_);
      break;
    case ModelVariant::kMimoBlockAr:
      mimo_block_ar_step(state_, cfg_.ar_matrices, innovation_variance_, rng_);
      break;
  }
}

TapArray ChannelModel::observed_taps() const {
  if (los_.empty()) return state_.taps;
  const double w_los = std::sqrt(cfg_.rice_factor / (cfg_.rice_factor + 1.0));
  const double w_diffuse = std::sqrt(1.0 / (cfg_.rice_factor + 1.0));
  TapArray out(state_.taps.size());
  for (std::size_t l = 0; l < out.size(); ++l) out[l] = w_los * los_[l] + w_diffuse * state_.taps[l];
  return out;
}

ChannelPair ChannelModel::next() {
  if (cfg_.variant == ModelVariant::kIidGaussian) {
    return iid_gaussian_pair(n_, k_, innovation_variance_, rng_);
  }
  if (cfg_.L == 0) {
    advance_symbol();
    return scalar_blocks(observed_taps());
  }
  std::vector<TapArray> window;
  window.reserve(static_cast<std::size_t>(cfg_.L));
  for (int i = 0; i < cfg_.L; ++i) {
    advance_symbol();
    window.push_back(observed_taps());
  }
  return taps_to_blocks(window, cfg_.L, cfg_.R, cfg_.T);
}

}  // namespace ergodic_mi
