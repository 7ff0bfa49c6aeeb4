#include "ergodic_mi/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "ergodic_mi/errors.hpp"
#include "ergodic_mi/estimators.hpp"
#include "ergodic_mi/kernels.hpp"
#include "ergodic_mi/rmt.hpp"
#include "ergodic_mi/rng.hpp"

namespace ergodic_mi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

RecursionOptions recursion_options(const ExperimentConfig& cfg) {
  return {.n_steps = cfg.n_steps, .burn_in = cfg.burn_in, .retain_increments = false};
}

std::vector<ChannelPair> take(ChannelModel& model, std::size_t count) {
  std::vector<ChannelPair> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(model.next());
  return out;
}

ResultRow make_row(const std::string& exp, double snr_db, std::string estimator,
                   const MiEstimate& e, std::int64_t replication, double ms) {
  return {exp, snr_db, std::move(estimator), e.value, e.std_error, e.n_steps, replication, ms,
          true};
}

// Mean over replications. The standard error is the across-replication one
// when there are at least two rows, else the single row's own. Aggregate rows
// are only emitted for two or more replications.
ResultRow mean_row(std::span<const ResultRow> rows, std::string estimator) {
  ResultRow out = rows.front();
  out.estimator = std::move(estimator);
  out.replication = -1;
  out.wall_time_ms = 0.0;
  double sum = 0.0;
  double ms = 0.0;
  for (const auto& r : rows) {
    sum += r.value;
    ms += r.wall_time_ms;
  }
  const double n = static_cast<double>(rows.size());
  out.value = sum / n;
  out.wall_time_ms = ms;
  if (rows.size() >= 2) {
    double ss = 0.0;
    for (const auto& r : rows) ss += (r.value - out.value) * (r.value - out.value);
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

std::vector<ResultRow> select(std::span<const ResultRow> rows, const std::string& estimator) {
  std::vector<ResultRow> out;
  for (const auto& r : rows) {
    if (r.estimator == estimator) out.push_back(r);
  }
  return out;
}

void append(std::vector<ResultRow>& dst, std::vector<ResultRow> src) {
  for (auto& r : src) dst.push_back(std::move(r));
}

std::string experiment_id(Experiment e) { return std::string(to_string(e)); }

}  // namespace

ModelConfig replication_model(const ExperimentConfig& cfg, std::size_t r) {
  ModelConfig m = cfg.model;
  m.seed = substream_seed(cfg.seed, r);
  return m;
}

std::vector<std::size_t> convergence_block_lengths(std::size_t block_length) {
  std::vector<std::size_t> out;
  for (int k = 5; k >= 0; --k) {
    const std::size_t b = std::max<std::size_t>(1, block_length >> k);
    if (out.empty() || out.back() != b) out.push_back(b);
  }
  return out;
}

std::vector<int> rmt_l_ladder(int L) {
  std::vector<int> out;
  for (int l = 1; l < L; l *= 2) out.push_back(l);
  out.push_back(L);
  return out;
}

double interquartile_range(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  auto q = [&](double p) {
    const double h = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
  };
  return q(0.75) - q(0.25);
}

double mp_scale(const ModelConfig& model) {
  if (model.variant == ModelVariant::kIidGaussian && model.R == model.T) {
    return 2.0 * model.T * resolved_innovation_variance(model);
  }
  if (model.variant == ModelVariant::kAr1Multipath && model.R == model.T &&
      resolved_alpha(model) == 0.0 && model.profile.kind == ProfileSpec::Kind::kFlat) {
    return 1.0;
  }
  return 0.0;
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const RunOptions& opt) {
  validate(cfg);
  const std::string id = experiment_id(Experiment::kSweep);
  const std::size_t reps = cfg.replications;
  const std::size_t grid = cfg.snr_grid_db.size();
  const Index k = block_cols(cfg.model);

  auto per_task = map_indices(grid * reps, resolve_thread_count(opt.threads), [&](std::size_t t) {
    const std::size_t s = t / reps;
    const std::size_t r = t % reps;
    const double db = cfg.snr_grid_db[s];
    const double rho = db_to_linear(db);
    ChannelModel model(replication_model(cfg, r));
    std::vector<ResultRow> rows;
    Stopwatch sw(opt.record_timing);
    const MiEstimate rec = recursive_mi(model, rho, k, recursion_options(cfg));
    rows.push_back(make_row(id, db, "recursive", rec, static_cast<std::int64_t>(r), sw.ms()));
    if (cfg.naive_block_length > 0) {
      Stopwatch sw2(opt.record_timing);
      const auto pairs = take(model, cfg.naive_block_length);
      rows.push_back(make_row(id, db, "naive", naive_mi(pairs, rho), static_cast<std::int64_t>(r),
                              sw2.ms()));
    }
    return rows;
  });

  std::vector<ResultRow> out;
  for (std::size_t s = 0; s < grid; ++s) {
    std::vector<ResultRow> block;
    for (std::size_t r = 0; r < reps; ++r) append(block, per_task[s * reps + r]);
    out.insert(out.end(), block.begin(), block.end());
    if (reps < 2) continue;
    out.push_back(mean_row(select(block, "recursive"), "recursive_mean"));
    if (cfg.naive_block_length > 0) out.push_back(mean_row(select(block, "naive"), "naive_mean"));
  }
  return out;
}

std::vector<ResultRow> run_convergence(const ExperimentConfig& cfg, const RunOptions& opt) {
  validate(cfg);
  if (cfg.naive_block_length < 1) {
    throw ConfigError("naive_block_length", "convergence needs a block length >= 1");
  }
  const std::string id = experiment_id(Experiment::kConvergence);
  const std::size_t reps = cfg.replications;
  const std::size_t grid = cfg.snr_grid_db.size();
  const auto lengths = convergence_block_lengths(cfg.naive_block_length);
  const Index k = block_cols(cfg.model);
  const int threads = resolve_thread_count(opt.threads);

  auto per_task = map_indices(grid * reps, threads, [&](std::size_t t) {
    const std::size_t s = t / reps;
    const std::size_t r = t % reps;
    const double db = cfg.snr_grid_db[s];
    const double rho = db_to_linear(db);
    ChannelModel model(replication_model(cfg, r));
    std::vector<ResultRow> rows;
    for (std::size_t b : lengths) {
      Stopwatch sw(opt.record_timing);
      const auto pairs = take(model, b);
      rows.push_back(make_row(id, db, "naive", naive_mi(pairs, rho), static_cast<std::int64_t>(r),
                              sw.ms()));
    }
    return rows;
  });
  // The reference line uses its own substream, index = replications.
  auto references = map_indices(grid, threads, [&](std::size_t s) {
    const double db = cfg.snr_grid_db[s];
    ChannelModel model(replication_model(cfg, reps));
    Stopwatch sw(opt.record_timing);
    const MiEstimate e = recursive_mi(model, db_to_linear(db), k, recursion_options(cfg));
    return make_row(id, db, "recursive_reference", e, -1, sw.ms());
  });

  std::vector<ResultRow> out;
  for (std::size_t s = 0; s < grid; ++s) {
    for (std::size_t r = 0; r < reps; ++r) append(out, per_task[s * reps + r]);
    out.push_back(references[s]);
    for (std::size_t j = 0; j < lengths.size(); ++j) {
      std::vector<double> values;
      for (std::size_t r = 0; r < reps; ++r) values.push_back(per_task[s * reps + r][j].value);
      ResultRow iqr{id, cfg.snr_grid_db[s], "naive_iqr", interquartile_range(values), 0.0,
                    lengths[j], -1, 0.0, true};
      out.push_back(iqr);
    }
  }
  return out;
}

std::vector<ResultRow> run_high_snr(const ExperimentConfig& cfg, const RunOptions& opt) {
  validate(cfg);
  const Index n = block_rows(cfg.model);
  const Index k = block_cols(cfg.model);
  if (n <= k) {
    throw ConfigError("model", "high-snr needs N > K (got N = " + std::to_string(n) +
                                   ", K = " + std::to_string(k) + ")");
  }
  const double alpha = resolved_alpha(cfg.model);
  const double f_d = cfg.model.f_d ? *cfg.model.f_d : (alpha > 0.0 ? -std::log(alpha) : kInf);
  const std::string id = experiment_id(Experiment::kHighSnr) + "[f_d=" + format_double(f_d) +
                         ";K_R=" + format_double(cfg.model.rice_factor) + "]";
  const std::size_t reps = cfg.replications;
  const std::size_t grid = cfg.snr_grid_db.size();

  // Tasks [0, grid*reps) are recursive runs; the last `reps` are kappa runs on
  // the same per-replication streams.
  auto per_task =
      map_indices((grid + 1) * reps, resolve_thread_count(opt.threads), [&](std::size_t t) {
        const std::size_t s = t / reps;
        const std::size_t r = t % reps;
        const auto rep = static_cast<std::int64_t>(r);
        ChannelModel model(replication_model(cfg, r));
        std::vector<ResultRow> rows;
        Stopwatch sw(opt.record_timing);
        if (s == grid) {
          const MiEstimate e = kappa_estimate(model, HpdMatrix::identity(k), recursion_options(cfg));
          rows.push_back(make_row(id, kInf, "kappa", e, rep, sw.ms()));
          return rows;
        }
        const double db = cfg.snr_grid_db[s];
        const double rho = db_to_linear(db);
        const MiEstimate e = recursive_mi(model, rho, k, recursion_options(cfg));
        rows.push_back(make_row(id, db, "recursive", e, rep, sw.ms()));
        MiEstimate off = e;
        off.value -= high_snr_slope_term(rho, n, k);
        rows.push_back(make_row(id, db, "offset", off, rep, 0.0));
        return rows;
      });

  std::vector<ResultRow> kappas;
  for (std::size_t r = 0; r < reps; ++r) append(kappas, per_task[grid * reps + r]);
  const ResultRow kappa_mean = mean_row(kappas, "kappa_mean");

  std::vector<ResultRow> out;
  for (std::size_t s = 0; s < grid; ++s) {
    std::vector<ResultRow> block;
    for (std::size_t r = 0; r < reps; ++r) append(block, per_task[s * reps + r]);
    out.insert(out.end(), block.begin(), block.end());
    const ResultRow off = mean_row(select(block, "offset"), "offset_mean");
    if (reps >= 2) {
      out.push_back(mean_row(select(block, "recursive"), "recursive_mean"));
      out.push_back(off);
    }
    const double db = cfg.snr_grid_db[s];
    ResultRow line{id, db, "asymptote",
                   high_snr_slope_term(db_to_linear(db), n, k) + kappa_mean.value,
                   kappa_mean.std_error, kappa_mean.n_steps, -1, 0.0, true};
    out.push_back(line);
    ResultRow gap{id, db, "gap", std::abs(off.value - kappa_mean.value),
                  std::hypot(off.std_error, kappa_mean.std_error), off.n_steps, -1, 0.0, true};
    out.push_back(gap);
  }
  out.insert(out.end(), kappas.begin(), kappas.end());
  if (reps >= 2) out.push_back(kappa_mean);
  return out;
}

std::vector<ResultRow> run_rmt_compare(const ExperimentConfig& cfg, const RunOptions& opt) {
  validate(cfg);
  const std::size_t reps = cfg.replications;
  const std::size_t grid = cfg.snr_grid_db.size();
  const int threads = resolve_thread_count(opt.threads);
  const bool with_ring = cfg.naive_block_length >= 2;

  std::vector<ResultRow> out;
  for (int L : rmt_l_ladder(cfg.model.L)) {
    ExperimentConfig sub = cfg;
    sub.model.L = L;
    if (sub.model.profile.kind == ProfileSpec::Kind::kExplicit && L != cfg.model.L) {
      // An explicit profile only fits its own L; smaller rungs fall back to flat.
      sub.model.profile = ProfileSpec{};
      sub.model.profile.kind = ProfileSpec::Kind::kFlat;
    }
    validate(sub.model);
    const std::string id = experiment_id(Experiment::kRmtCompare) + "[L=" + std::to_string(L) + "]";
    const Index k = block_cols(sub.model);

    auto per_task = map_indices(grid * reps, threads, [&](std::size_t t) {
      const std::size_t s = t / reps;
      const std::size_t r = t % reps;
      const auto rep = static_cast<std::int64_t>(r);
      const double db = cfg.snr_grid_db[s];
      const double rho = db_to_linear(db);
      ChannelModel model(replication_model(sub, r));
      std::vector<ResultRow> rows;
      Stopwatch sw(opt.record_timing);
      rows.push_back(make_row(id, db, "recursive",
                              recursive_mi(model, rho, k, recursion_options(sub)), rep, sw.ms()));
      if (with_ring) {
        Stopwatch sw2(opt.record_timing);
        const auto pairs = take(model, cfg.naive_block_length);
        MiEstimate ring;
        ring.value = ring_mi(pairs, rho);
        ring.n_steps = pairs.size();
        rows.push_back(make_row(id, db, "ring", ring, rep, sw2.ms()));
      }
      return rows;
    });

    const ChannelModel probe(replication_model(sub, 0));
    double norm2 = 0.0;
    for (double a : probe.profile()) norm2 += a * a;
    out.push_back({id, kInf, "profile_norm", std::sqrt(norm2), 0.0, probe.profile().size(), -1,
                   0.0, false});
    for (std::size_t s = 0; s < grid; ++s) {
      std::vector<ResultRow> block;
      for (std::size_t r = 0; r < reps; ++r) append(block, per_task[s * reps + r]);
      out.insert(out.end(), block.begin(), block.end());
      if (reps >= 2) {
        out.push_back(mean_row(select(block, "recursive"), "recursive_mean"));
        if (with_ring) out.push_back(mean_row(select(block, "ring"), "ring_mean"));
      }
      if (sub.model.R == sub.model.T) {
        const double db = cfg.snr_grid_db[s];
        out.push_back({id, db, "mp_closed", mp_closed_form(db_to_linear(db)), 0.0, 0, -1, 0.0,
                       true});
      }
    }
  }
  return out;
}

std::vector<ResultRow> run_dos_histogram(const ExperimentConfig& cfg, const RunOptions& opt) {
  validate(cfg);
  if (cfg.naive_block_length < 1) {
    throw ConfigError("naive_block_length", "dos-histogram needs a block length >= 1");
  }
  const std::string id = experiment_id(Experiment::kDosHistogram);
  const std::size_t reps = cfg.replications;

  auto spectra = map_indices(reps, resolve_thread_count(opt.threads), [&](std::size_t r) {
    ChannelModel model(replication_model(cfg, r));
    const auto pairs = take(model, cfg.naive_block_length);
    return gram_eigenvalues(pairs);
  });

  std::vector<ResultRow> out;
  for (double db : cfg.snr_grid_db) {
    std::vector<ResultRow> block;
    for (std::size_t r = 0; r < reps; ++r) {
      MiEstimate e;
      e.value = mi_from_eigenvalues(spectra[r], db_to_linear(db), spectra[r].size());
      e.n_steps = cfg.naive_block_length;
      block.push_back(make_row(id, db, "spectral", e, static_cast<std::int64_t>(r), 0.0));
    }
    out.insert(out.end(), block.begin(), block.end());
    if (reps >= 2) out.push_back(mean_row(block, "spectral_mean"));
  }

  std::vector<double> eig;
  for (const auto& s : spectra) {
    for (Index i = 0; i < s.size(); ++i) eig.push_back(std::max(0.0, s[i]));
  }
  std::sort(eig.begin(), eig.end());
  const std::size_t m = eig.size();
  const double scale = mp_scale(cfg.model);
  double hi = eig.empty() ? 0.0 : eig.back();
  if (scale > 0.0) hi = std::max(hi, 4.0 * scale);
  if (!(hi > 0.0)) {
    out.push_back({id, kInf, "dos@0", 1.0, 0.0, m, -1, 0.0, false});
    return out;
  }

  const double width = hi / kHistogramBins;
  std::vector<std::size_t> counts(kHistogramBins, 0);
  for (double x : eig) {
    const auto b = std::min<std::size_t>(kHistogramBins - 1, static_cast<std::size_t>(x / width));
    ++counts[b];
  }
  for (int b = 0; b < kHistogramBins; ++b) {
    const double lo = b * width;
    const double center = lo + 0.5 * width;
    out.push_back({id, kInf, "dos@" + format_double(center),
                   static_cast<double>(counts[b]) / static_cast<double>(m), 0.0, m, -1, 0.0,
                   false});
    if (scale > 0.0) {
      const double mass = mp_cdf((lo + width) / scale) - mp_cdf(lo / scale);
      out.push_back({id, kInf, "mp@" + format_double(center), mass, 0.0, m, -1, 0.0, false});
    }
  }
  if (scale > 0.0) {
    // Kolmogorov distance between the empirical CDF and the rescaled law.
    double ks = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double f = mp_cdf(eig[i] / scale);
      ks = std::max({ks, std::abs(static_cast<double>(i + 1) / m - f),
                     std::abs(static_cast<double>(i) / m - f)});
    }
    out.push_back({id, kInf, "ks_mp", ks, 0.0, m, -1, 0.0, false});
  }
  return out;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  switch (cfg.experiment) {
    case Experiment::kSweep: return run_sweep(cfg, opt);
    case Experiment::kConvergence: return run_convergence(cfg, opt);
    case Experiment::kHighSnr: return run_high_snr(cfg, opt);
    case Experiment::kRmtCompare: return run_rmt_compare(cfg, opt);
    case Experiment::kDosHistogram: return run_dos_histogram(cfg, opt);
  }
  throw ConfigError("experiment", "unhandled experiment");
}

}  // namespace ergodic_mi
