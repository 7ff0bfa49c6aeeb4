#include "ergodic_mi/experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ergodic_mi/errors.hpp"

namespace ergodic_mi {

using nlohmann::json;

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& path, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError(join(path, key), "unknown field");
  }
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
  return d;
}

std::int64_t get_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::size_t get_count(const json& v, const std::string& path) {
  const std::int64_t x = get_integer(v, path);
  if (x < 0) throw ConfigError(path, "must be >= 0");
  return static_cast<std::size_t>(x);
}

std::uint64_t get_seed(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const auto x = v.get<std::int64_t>();
    if (x < 0) throw ConfigError(path, "seed must be >= 0");
    return static_cast<std::uint64_t>(x);
  }
  throw ConfigError(path, "expected an unsigned integer");
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

std::vector<std::vector<double>> get_real_rows(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array()) throw ConfigError(rp, "expected a row array");
    std::vector<double> row;
    for (std::size_t j = 0; j < v[i].size(); ++j) {
      row.push_back(get_number(v[i][j], rp + "[" + std::to_string(j) + "]"));
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw ConfigError(rp, "ragged matrix");
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw ConfigError(path, "empty matrix");
  return rows;
}

ComplexMatrix matrix_from_json(const json& v, const std::string& path) {
  std::vector<std::vector<double>> re;
  std::vector<std::vector<double>> im;
  if (v.is_object()) {
    reject_unknown(v, path, {"re", "im"});
    if (!v.contains("re")) throw ConfigError(join(path, "re"), "missing");
    re = get_real_rows(v.at("re"), join(path, "re"));
    if (v.contains("im")) {
      im = get_real_rows(v.at("im"), join(path, "im"));
      if (im.size() != re.size() || im.front().size() != re.front().size()) {
        throw ConfigError(join(path, "im"), "shape differs from re");
      }
    }
  } else {
    re = get_real_rows(v, path);
  }
  const auto rows = static_cast<Index>(re.size());
  const auto cols = static_cast<Index>(re.front().size());
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = Complex(re[i][j], im.empty() ? 0.0 : im[i][j]);
    }
  }
  return m;
}

json matrix_to_json(const ComplexMatrix& m) {
  json re = json::array();
  json im = json::array();
  bool has_imag = false;
  for (Index i = 0; i < m.rows(); ++i) {
    json rr = json::array();
    json ir = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ir.push_back(m(i, j).imag());
      has_imag = has_imag || m(i, j).imag() != 0.0;
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  if (!has_imag) return re;
  return json{{"re", re}, {"im", im}};
}

ProfileSpec profile_from_json(const json& v, const std::string& path) {
  ProfileSpec p;
  auto kind_from = [&](const std::string& s) {
    if (s == "exponential") return ProfileSpec::Kind::kExponential;
    if (s == "wyner") return ProfileSpec::Kind::kWyner;
    if (s == "flat") return ProfileSpec::Kind::kFlat;
    if (s == "explicit") return ProfileSpec::Kind::kExplicit;
    throw ConfigError(path, "unknown profile '" + s + "'");
  };
  if (v.is_string()) {
    p.kind = kind_from(v.get<std::string>());
    if (p.kind == ProfileSpec::Kind::kExplicit) throw ConfigError(path, "explicit profile needs values");
    return p;
  }
  reject_unknown(v, path, {"kind", "decay", "values"});
  if (!v.contains("kind")) throw ConfigError(join(path, "kind"), "missing");
  p.kind = kind_from(get_string(v.at("kind"), join(path, "kind")));
  if (v.contains("decay")) {
    if (p.kind != ProfileSpec::Kind::kExponential) {
      throw ConfigError(join(path, "decay"), "only valid for the exponential profile");
    }
    p.decay = get_number(v.at("decay"), join(path, "decay"));
  }
  if (v.contains("values")) {
    if (p.kind != ProfileSpec::Kind::kExplicit) {
      throw ConfigError(join(path, "values"), "only valid for the explicit profile");
    }
    const json& vals = v.at("values");
    if (!vals.is_array()) throw ConfigError(join(path, "values"), "expected an array");
    for (std::size_t i = 0; i < vals.size(); ++i) {
      p.values.push_back(get_number(vals[i], join(path, "values") + "[" + std::to_string(i) + "]"));
    }
  } else if (p.kind == ProfileSpec::Kind::kExplicit) {
    throw ConfigError(join(path, "values"), "missing");
  }
  return p;
}

json profile_to_json(const ProfileSpec& p) {
  switch (p.kind) {
    case ProfileSpec::Kind::kExponential: return json{{"kind", "exponential"}, {"decay", p.decay}};
    case ProfileSpec::Kind::kWyner: return json{{"kind", "wyner"}};
    case ProfileSpec::Kind::kFlat: return json{{"kind", "flat"}};
    case ProfileSpec::Kind::kExplicit: return json{{"kind", "explicit"}, {"values", p.values}};
  }
  return {};
}

ModelConfig parse_model(const json& j, const std::string& path) {
  reject_unknown(j, path,
                 {"variant", "L", "R", "T", "alpha", "f_d", "profile", "rice_factor",
                  "ar_matrices", "innovation_variance", "seed"});
  ModelConfig m;
  if (!j.contains("variant")) throw ConfigError(join(path, "variant"), "missing");
  m.variant = parse_model_variant(get_string(j.at("variant"), join(path, "variant")));
  auto small_int = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    const std::int64_t v = get_integer(j.at(key), join(path, key));
    if (v < 0 || v > 4096) throw ConfigError(join(path, key), "out of range");
    out = static_cast<int>(v);
  };
  small_int("L", m.L);
  small_int("R", m.R);
  small_int("T", m.T);
  if (j.contains("alpha")) m.alpha = get_number(j.at("alpha"), join(path, "alpha"));
  if (j.contains("f_d")) m.f_d = get_number(j.at("f_d"), join(path, "f_d"));
  if (j.contains("profile")) m.profile = profile_from_json(j.at("profile"), join(path, "profile"));
  if (j.contains("rice_factor")) {
    m.rice_factor = get_number(j.at("rice_factor"), join(path, "rice_factor"));
  }
  if (j.contains("ar_matrices")) {
    const json& arr = j.at("ar_matrices");
    if (!arr.is_array()) throw ConfigError(join(path, "ar_matrices"), "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      m.ar_matrices.push_back(
          matrix_from_json(arr[i], join(path, "ar_matrices") + "[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("innovation_variance")) {
    m.innovation_variance =
        get_number(j.at("innovation_variance"), join(path, "innovation_variance"));
  }
  if (j.contains("seed")) m.seed = get_seed(j.at("seed"), join(path, "seed"));
  return m;
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::kSweep: return "sweep";
    case Experiment::kConvergence: return "convergence";
    case Experiment::kHighSnr: return "high-snr";
    case Experiment::kRmtCompare: return "rmt-compare";
    case Experiment::kDosHistogram: return "dos-histogram";
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view s) {
  for (Experiment e : {Experiment::kSweep, Experiment::kConvergence, Experiment::kHighSnr,
                       Experiment::kRmtCompare, Experiment::kDosHistogram}) {
    if (to_string(e) == s) return e;
  }
  throw ConfigError("experiment", "unknown experiment '" + std::string(s) + "'");
}

std::string_view to_string(Units u) { return u == Units::kBits ? "bits" : "nats"; }

Units parse_units(std::string_view s) {
  if (s == "nats") return Units::kNats;
  if (s == "bits") return Units::kBits;
  throw ConfigError("units", "expected 'nats' or 'bits'");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

ModelConfig model_config_from_json(const json& j) {
  ModelConfig m = parse_model(j, "model");
  try {
    validate(m);
  } catch (const UnstableModel& e) {
    throw ConfigError("model.ar_matrices", e.what());
  }
  return m;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  reject_unknown(j, "",
                 {"spec_version", "experiment", "model", "snr_grid_db", "n_steps", "burn_in",
                  "replications", "seed", "naive_block_length", "output", "units"});
  ExperimentConfig c;
  if (j.contains("spec_version")) {
    c.spec_version = get_string(j.at("spec_version"), "spec_version");
    if (c.spec_version != kConfigSchemaVersion) {
      throw ConfigError("spec_version", "unsupported schema version '" + c.spec_version + "'");
    }
  }
  if (j.contains("experiment")) {
    c.experiment = parse_experiment(get_string(j.at("experiment"), "experiment"));
  }
  if (!j.contains("model")) throw ConfigError("model", "missing");
  c.model = model_config_from_json(j.at("model"));
  if (!j.contains("snr_grid_db")) throw ConfigError("snr_grid_db", "missing");
  const json& grid = j.at("snr_grid_db");
  if (!grid.is_array()) throw ConfigError("snr_grid_db", "expected an array");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    c.snr_grid_db.push_back(get_number(grid[i], "snr_grid_db[" + std::to_string(i) + "]"));
  }
  if (j.contains("n_steps")) c.n_steps = get_count(j.at("n_steps"), "n_steps");
  if (j.contains("burn_in")) c.burn_in = get_count(j.at("burn_in"), "burn_in");
  if (j.contains("replications")) c.replications = get_count(j.at("replications"), "replications");
  if (j.contains("seed")) c.seed = get_seed(j.at("seed"), "seed");
  if (j.contains("naive_block_length")) {
    c.naive_block_length = get_count(j.at("naive_block_length"), "naive_block_length");
  }
  if (j.contains("output")) c.output = get_string(j.at("output"), "output");
  if (j.contains("units")) c.units = parse_units(get_string(j.at("units"), "units"));
  validate(c);
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return experiment_config_from_json(j);
}

json to_json(const ModelConfig& m) {
  json j{{"variant", std::string(to_string(m.variant))},
         {"L", m.L},
         {"R", m.R},
         {"T", m.T},
         {"profile", profile_to_json(m.profile)},
         {"rice_factor", m.rice_factor},
         {"seed", m.seed}};
  if (m.alpha) j["alpha"] = *m.alpha;
  if (m.f_d) j["f_d"] = *m.f_d;
  if (!m.ar_matrices.empty()) {
    json arr = json::array();
    for (const auto& a : m.ar_matrices) arr.push_back(matrix_to_json(a));
    j["ar_matrices"] = std::move(arr);
  }
  if (m.innovation_variance) j["innovation_variance"] = *m.innovation_variance;
  return j;
}

json to_json(const ExperimentConfig& c) {
  json j{{"spec_version", c.spec_version},
         {"experiment", std::string(to_string(c.experiment))},
         {"model", to_json(c.model)},
         {"snr_grid_db", c.snr_grid_db},
         {"n_steps", c.n_steps},
         {"burn_in", c.burn_in},
         {"replications", c.replications},
         {"seed", c.seed},
         {"naive_block_length", c.naive_block_length},
         {"units", std::string(to_string(c.units))}};
  if (!c.output.empty()) j["output"] = c.output;
  return j;
}

void validate(const ExperimentConfig& c) {
  if (c.snr_grid_db.empty()) throw ConfigError("snr_grid_db", "must be non-empty");
  if (c.n_steps <= c.burn_in) throw ConfigError("n_steps", "must exceed burn_in");
  if (c.replications < 1) throw ConfigError("replications", "must be >= 1");
  validate(c.model);
}

}  // namespace ergodic_mi
