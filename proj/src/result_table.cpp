#include "ergodic_mi/result_table.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ergodic_mi/errors.hpp"

namespace ergodic_mi {

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

void check_field(const std::string& s, const char* what) {
  if (s.find_first_of(",\n\r\"") != std::string::npos) {
    throw Error(std::string("csv: ") + what + " contains a reserved character: " + s);
  }
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) {
    throw Error("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& s, std::size_t line) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) {
    throw Error("csv line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

void write_csv(std::ostream& out, std::span<const ResultRow> rows, Units units) {
  out << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    if (!std::isfinite(r.value)) throw Error("csv: non-finite value for " + r.estimator);
    if (!(r.std_error >= 0.0)) throw Error("csv: negative std_error for " + r.estimator);
    check_field(r.experiment, "experiment");
    check_field(r.estimator, "estimator");
    const double scale =
        (units == Units::kBits && r.information) ? 1.0 / std::numbers::ln2 : 1.0;
    out << r.experiment << ',' << format_double(r.snr_db) << ',' << r.estimator << ','
        << format_double(r.value * scale) << ',' << format_double(r.std_error * scale) << ','
        << r.n_steps << ',' << r.replication << ',' << format_double(r.wall_time_ms) << '\n';
  }
}

std::string to_csv(std::span<const ResultRow> rows, Units units) {
  std::ostringstream ss;
  write_csv(ss, rows, units);
  return ss.str();
}

std::vector<ResultRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error("csv: missing or wrong header");
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 8) {
      throw Error("csv line " + std::to_string(lineno) + ": expected 8 fields");
    }
    ResultRow r;
    r.experiment = cells[0];
    r.snr_db = parse_double(cells[1], lineno);
    r.estimator = cells[2];
    r.value = parse_double(cells[3], lineno);
    r.std_error = parse_double(cells[4], lineno);
    const std::int64_t steps = parse_int(cells[5], lineno);
    if (steps < 0) throw Error("csv line " + std::to_string(lineno) + ": negative n_steps");
    r.n_steps = static_cast<std::size_t>(steps);
    r.replication = parse_int(cells[6], lineno);
    r.wall_time_ms = parse_double(cells[7], lineno);
    if (!std::isfinite(r.value) || r.std_error < 0.0) {
      throw Error("csv line " + std::to_string(lineno) + ": row violates schema");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace ergodic_mi
