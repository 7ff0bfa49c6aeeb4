#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "ergodic_mi/errors.hpp"
#include "ergodic_mi/harness.hpp"
#include "ergodic_mi/rmt.hpp"

using namespace ergodic_mi;
using nlohmann::json;

namespace {

ExperimentConfig parse(const std::string& text) {
  return experiment_config_from_json(json::parse(text));
}

std::string config_error_field(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

ExperimentConfig zero_channel(Experiment e) {
  ExperimentConfig c = parse(R"({"model": {"variant": "iid-gaussian", "R": 2, "T": 2,
    "innovation_variance": 0}, "snr_grid_db": [6], "n_steps": 300, "burn_in": 100,
    "replications": 1, "seed": 1, "naive_block_length": 8})");
  c.experiment = e;
  return c;
}

std::vector<ResultRow> rows_named(const std::vector<ResultRow>& rows, const std::string& name) {
  std::vector<ResultRow> out;
  for (const auto& r : rows) {
    if (r.estimator == name) out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("config parsing and field-path errors") {
  const ExperimentConfig c = parse(R"({"spec_version": "1", "experiment": "high-snr",
    "model": {"variant": "ar1-multipath", "L": 3, "R": 3, "T": 2, "f_d": 0.05,
              "profile": {"kind": "exponential", "decay": 0.4}},
    "snr_grid_db": [20, 30], "n_steps": 1000, "burn_in": 100, "replications": 4,
    "seed": 18446744073709551615, "units": "bits"})");
  CHECK(c.experiment == Experiment::kHighSnr);
  CHECK(c.model.L == 3);
  CHECK(c.seed == 18446744073709551615ull);
  CHECK(c.units == Units::kBits);

  CHECK(config_error_field(R"({"model": {"variant": "iid-gaussian"}, "snr_grid_db": [0], "bogus": 1})") ==
        "bogus");
  CHECK(config_error_field(R"({"model": {"variant": "iid-gaussian", "colour": 1}, "snr_grid_db": [0]})") ==
        "model.colour");
  CHECK(config_error_field(R"({"model": {"variant": "iid-gaussian"}, "snr_grid_db": []})") ==
        "snr_grid_db");
  CHECK(config_error_field(
            R"({"model": {"variant": "iid-gaussian"}, "snr_grid_db": [0], "n_steps": 10, "burn_in": 10})") ==
        "n_steps");
  CHECK(config_error_field(R"({"model": {"variant": "iid-gaussian"}, "snr_grid_db": [0], "replications": 0})") ==
        "replications");
  CHECK(config_error_field(R"({"model": {"variant": "ar1-multipath", "alpha": 1.0}, "snr_grid_db": [0]})") ==
        "model.alpha");
  CHECK(config_error_field(R"({"model": {"variant": "iid-gaussian"}, "snr_grid_db": ["x"]})") ==
        "snr_grid_db[0]");
  CHECK(config_error_field(R"({"model": {"variant": "general-ar", "ar_matrices": [[[1.01]]]},
                               "snr_grid_db": [0]})") == "model.ar_matrices");
  CHECK(config_error_field(R"({"spec_version": "2", "model": {"variant": "iid-gaussian"},
                               "snr_grid_db": [0]})") == "spec_version");
}

TEST_CASE("config JSON round trip") {
  const ExperimentConfig c = parse(R"({"experiment": "rmt-compare",
    "model": {"variant": "mimo-block-ar", "L": 1, "R": 2, "T": 2, "seed": 3,
              "ar_matrices": [{"re": [[0.5, 0], [0, 0.5]], "im": [[0, 0.1], [0.1, 0]]}, [[0.2, 0], [0, 0.2]]],
              "innovation_variance": 0.25},
    "snr_grid_db": [0, 6], "n_steps": 500, "burn_in": 50, "replications": 2, "seed": 9,
    "naive_block_length": 16, "output": "x.csv"})");
  const ExperimentConfig back = experiment_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.model.ar_matrices[0](0, 1) == Complex(0.0, 0.1));
}

TEST_CASE("CSV round trip and units") {
  std::vector<ResultRow> rows{
      {"sweep", 6.0, "recursive", 1.2345678901234, 0.001, 4000, 0, 0.0, true},
      {"dos-histogram", INFINITY, "dos@0.05", 0.25, 0.0, 1024, -1, 0.0, false}};
  std::istringstream in(to_csv(rows, Units::kNats));
  const auto back = parse_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].value == doctest::Approx(rows[0].value).epsilon(1e-11));
  CHECK(std::isinf(back[1].snr_db));
  CHECK(back[1].replication == -1);
  CHECK(back[0].n_steps == 4000);

  std::istringstream bits(to_csv(rows, Units::kBits));
  const auto b = parse_csv(bits);
  CHECK(b[0].value == doctest::Approx(rows[0].value / std::log(2.0)).epsilon(1e-11));
  CHECK(b[1].value == 0.25);

  const std::string text = to_csv(rows, Units::kNats);
  CHECK(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);

  rows[0].value = NAN;
  CHECK_THROWS(to_csv(rows, Units::kNats));
}

TEST_CASE("sweep on a zero channel gives a single zero row") {
  const auto cfg = [] {
    auto c = zero_channel(Experiment::kSweep);
    c.naive_block_length = 0;
    return c;
  }();
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].value == 0.0);
  CHECK(rows[0].estimator == "recursive");
}

TEST_CASE("sweep output is deterministic across runs and thread counts") {
  auto cfg = parse(R"({"model": {"variant": "ar1-multipath", "L": 1, "R": 2, "T": 2, "f_d": 0.05},
    "snr_grid_db": [0, 10], "n_steps": 400, "burn_in": 50, "replications": 3, "seed": 11,
    "naive_block_length": 10})");
  const std::string a = to_csv(run_sweep(cfg, {.threads = 1}), Units::kNats);
  const std::string b = to_csv(run_sweep(cfg, {.threads = 3}), Units::kNats);
  CHECK(a == b);
  cfg.seed = 12;
  CHECK(to_csv(run_sweep(cfg, {.threads = 1}), Units::kNats) != a);
}

TEST_CASE("sweep: recursive and naive agree on the multipath MIMO setting") {
  const auto cfg = parse(R"({"model": {"variant": "ar1-multipath", "L": 3, "R": 2, "T": 2,
      "f_d": 0.05, "profile": {"kind": "exponential", "decay": 0.4}},
    "snr_grid_db": [6], "n_steps": 3000, "burn_in": 200, "replications": 16, "seed": 21,
    "naive_block_length": 100})");
  const auto rows = run_sweep(cfg);
  const ResultRow rec = rows_named(rows, "recursive_mean").at(0);
  const ResultRow naive = rows_named(rows, "naive_mean").at(0);
  CHECK(std::abs(rec.value - naive.value) <= 3.0 * std::hypot(rec.std_error, naive.std_error));
}

TEST_CASE("convergence: dispersion shrinks with block length") {
  const auto cfg = parse(R"({"model": {"variant": "iid-gaussian", "R": 2, "T": 2},
    "snr_grid_db": [6], "n_steps": 2000, "burn_in": 100, "replications": 40, "seed": 5,
    "naive_block_length": 256})");
  const auto rows = run_convergence(cfg);
  const auto iqr = rows_named(rows, "naive_iqr");
  REQUIRE(iqr.size() == 6);
  int inversions = 0;
  for (std::size_t i = 1; i < iqr.size(); ++i) {
    CHECK(iqr[i].n_steps > iqr[i - 1].n_steps);
    if (iqr[i].value > iqr[i - 1].value) ++inversions;
  }
  CHECK(inversions <= 1);

  const auto ref1 = rows_named(rows, "recursive_reference");
  const auto ref2 = rows_named(run_convergence(cfg), "recursive_reference");
  REQUIRE(ref1.size() == 1);
  CHECK(ref1[0].value == ref2[0].value);

  for (const auto& r : run_convergence(zero_channel(Experiment::kConvergence))) {
    CHECK(r.value == 0.0);
  }
}

TEST_CASE("high-SNR study") {
  const auto cfg = parse(R"({"model": {"variant": "ar1-multipath", "L": 3, "R": 3, "T": 2,
      "f_d": 0.05, "profile": {"kind": "exponential", "decay": 0.4}},
    "snr_grid_db": [20, 30, 40], "n_steps": 6000, "burn_in": 200, "replications": 2, "seed": 8})");
  const auto rows = run_high_snr(cfg);
  const auto gap = rows_named(rows, "gap");
  REQUIRE(gap.size() == 3);
  CHECK(gap[2].value < gap[0].value);
  CHECK(rows_named(rows, "kappa").size() == 2);
  CHECK(rows_named(rows, "asymptote").size() == 3);
  CHECK(rows.front().experiment == "high-snr[f_d=0.05;K_R=0]");

  auto square = cfg;
  square.model.R = 2;
  CHECK_THROWS_AS(run_high_snr(square), ConfigError);

  // Rice-factor sensitivity: values recorded, no direction asserted.
  for (double kr : {0.0, 10.0, 100.0}) {
    auto c = cfg;
    c.model.variant = ModelVariant::kRicianAr1;
    c.model.rice_factor = kr;
    c.snr_grid_db = {30};
    c.n_steps = 1500;
    c.replications = 1;
    const auto kappa = rows_named(run_high_snr(c), "kappa");
    REQUIRE(kappa.size() == 1);
    CHECK(std::isfinite(kappa[0].value));
  }
}

TEST_CASE("RMT comparison rows") {
  const auto cfg = parse(R"({"model": {"variant": "ar1-multipath", "L": 8, "alpha": 0,
      "profile": "wyner"},
    "snr_grid_db": [0, 6], "n_steps": 400, "burn_in": 50, "replications": 2, "seed": 4,
    "naive_block_length": 9})");
  const auto rows = run_rmt_compare(cfg);
  const auto closed = rows_named(rows, "mp_closed");
  REQUIRE(closed.size() == 8);  // L in {1, 2, 4, 8}, two SNRs each
  for (const auto& r : closed) {
    CHECK(r.value == mp_closed_form(db_to_linear(r.snr_db)));
  }
  const auto norms = rows_named(rows, "profile_norm");
  REQUIRE(norms.size() == 4);
  for (const auto& r : norms) CHECK(format_double(r.value) == "1");
  CHECK(rows_named(rows, "ring").size() == 16);
}

TEST_CASE("density-of-states histogram") {
  const auto cfg = parse(R"({"model": {"variant": "iid-gaussian", "R": 32, "T": 32},
    "snr_grid_db": [6], "n_steps": 10, "burn_in": 0, "replications": 1, "seed": 3,
    "naive_block_length": 32})");
  const auto rows = run_dos_histogram(cfg);
  double mass = 0.0;
  double mp_mass = 0.0;
  for (const auto& r : rows) {
    if (r.estimator.rfind("dos@", 0) == 0) mass += r.value;
    if (r.estimator.rfind("mp@", 0) == 0) mp_mass += r.value;
  }
  CHECK(std::abs(mass - 1.0) <= 1e-12);
  CHECK(std::abs(mp_mass - 1.0) <= 1e-12);
  const auto ks = rows_named(rows, "ks_mp");
  REQUIRE(ks.size() == 1);
  CHECK(ks[0].n_steps == 1024);
  CHECK(ks[0].value <= 0.05);

  const auto zero = run_dos_histogram(zero_channel(Experiment::kDosHistogram));
  int bins = 0;
  for (const auto& r : zero) {
    if (r.estimator.rfind("dos@", 0) == 0) {
      ++bins;
      CHECK(r.estimator == "dos@0");
      CHECK(r.value == 1.0);
    }
  }
  CHECK(bins == 1);
}

TEST_CASE("helpers") {
  CHECK(convergence_block_lengths(256) == std::vector<std::size_t>{8, 16, 32, 64, 128, 256});
  CHECK(convergence_block_lengths(4) == std::vector<std::size_t>{1, 2, 4});
  CHECK(rmt_l_ladder(63) == std::vector<int>{1, 2, 4, 8, 16, 32, 63});
  CHECK(rmt_l_ladder(1) == std::vector<int>{1});
  CHECK(interquartile_range({1.0, 2.0, 3.0, 4.0, 5.0}) == doctest::Approx(2.0));
  CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
}
