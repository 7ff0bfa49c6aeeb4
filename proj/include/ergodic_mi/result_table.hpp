#pragma once

// Result rows and their CSV form.
//
// Header: experiment,snr_db,estimator,value,std_error,n_steps,replication,wall_time_ms
// Floats use 12 significant digits; SNR-independent rows carry snr_db = inf;
// rows aggregated over replications carry replication = -1.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ergodic_mi/experiment_config.hpp"

namespace ergodic_mi {

inline constexpr std::string_view kCsvHeader =
    "experiment,snr_db,estimator,value,std_error,n_steps,replication,wall_time_ms";

struct ResultRow {
  std::string experiment;
  double snr_db = 0.0;
  std::string estimator;
  double value = 0.0;  // nats unless converted at output
  double std_error = 0.0;
  std::size_t n_steps = 0;
  std::int64_t replication = 0;
  double wall_time_ms = 0.0;
  // False for masses, norms and other values that must not be unit-converted.
  // Not serialized.
  bool information = true;
};

std::string format_double(double x);

// Throws Error when a row has a non-finite value or negative std_error.
void write_csv(std::ostream& out, std::span<const ResultRow> rows, Units units);
std::string to_csv(std::span<const ResultRow> rows, Units units);

// Parses the writer's output. Rows come back with information = true.
std::vector<ResultRow> parse_csv(std::istream& in);

}  // namespace ergodic_mi
