#pragma once

// Declarative experiment description and its JSON schema.
//
// {
//   "spec_version": "1",
//   "experiment": "sweep" | "convergence" | "high-snr" | "rmt-compare" | "dos-histogram",
//   "model": {
//     "variant": "iid-gaussian" | "ar1-multipath" | "general-ar" | "mimo-block-ar" | "rician-ar1",
//     "L": 3, "R": 2, "T": 2,
//     "alpha": 0.95, "f_d": 0.05,                      // either or both (consistent)
//     "profile": "flat" | "wyner" | {"kind": "exponential", "decay": 0.4}
//                | {"kind": "explicit", "values": [...]},
//     "rice_factor": 10,
//     "ar_matrices": [ [[0.5]], {"re": [[...]], "im": [[...]]} ],
//     "innovation_variance": 0.5,
//     "seed": 7
//   },
//   "snr_grid_db": [0, 6, 12],
//   "n_steps": 4000, "burn_in": 200, "replications": 150, "seed": 1,
//   "naive_block_length": 80,
//   "output": "out.csv",
//   "units": "nats" | "bits"
// }
//
// Unknown fields are rejected at every level.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ergodic_mi/channel_models.hpp"

namespace ergodic_mi {

inline constexpr std::string_view kConfigSchemaVersion = "1";

enum class Experiment { kSweep, kConvergence, kHighSnr, kRmtCompare, kDosHistogram };
enum class Units { kNats, kBits };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view s);
std::string_view to_string(Units u);
Units parse_units(std::string_view s);

struct ExperimentConfig {
  std::string spec_version{kConfigSchemaVersion};
  Experiment experiment = Experiment::kSweep;
  ModelConfig model;
  std::vector<double> snr_grid_db;
  std::size_t n_steps = 4000;
  std::size_t burn_in = 200;
  std::size_t replications = 150;
  std::uint64_t seed = 0;
  std::size_t naive_block_length = 0;
  std::string output;
  Units units = Units::kNats;
};

// Throws ConfigError carrying the JSON path of the offending field.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

void validate(const ExperimentConfig& cfg);

// 10^{dB/10}.
double db_to_linear(double db);

}  // namespace ergodic_mi
