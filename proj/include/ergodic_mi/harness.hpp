#pragma once

// Experiment runners behind the CLI.
//
// Every replication r owns a ChannelModel seeded with substream_seed(seed, r)
// and reuses that stream across the SNR grid. Tasks run on a work pool and the
// rows are merged in (SNR index, replication index) order, so the output does
// not depend on the thread count.

#include <cstddef>
#include <vector>

#include "ergodic_mi/experiment_config.hpp"
#include "ergodic_mi/result_table.hpp"

namespace ergodic_mi {

struct RunOptions {
  int threads = 0;             // 0: OpenMP default
  bool record_timing = false;  // otherwise wall_time_ms is written as 0
};

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const RunOptions& opt = {});
std::vector<ResultRow> run_convergence(const ExperimentConfig& cfg, const RunOptions& opt = {});
std::vector<ResultRow> run_high_snr(const ExperimentConfig& cfg, const RunOptions& opt = {});
std::vector<ResultRow> run_rmt_compare(const ExperimentConfig& cfg, const RunOptions& opt = {});
std::vector<ResultRow> run_dos_histogram(const ExperimentConfig& cfg, const RunOptions& opt = {});
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

// Model for replication r.
ModelConfig replication_model(const ExperimentConfig& cfg, std::size_t r);

// Six block lengths B >> 5, ..., B >> 0 (at least 1, duplicates dropped).
std::vector<std::size_t> convergence_block_lengths(std::size_t block_length);
// 1, 2, 4, ... below L, then L itself.
std::vector<int> rmt_l_ladder(int L);

// Interquartile range with linear interpolation between order statistics.
double interquartile_range(std::vector<double> xs);

// Variance scale s such that eigenvalues / s follow the standard
// Marchenko-Pastur law on [0, 4]; 0 when the model has no such limit.
double mp_scale(const ModelConfig& model);

inline constexpr int kHistogramBins = 40;

}  // namespace ergodic_mi
