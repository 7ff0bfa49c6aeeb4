#pragma once

#include <stdexcept>
#include <string>

namespace ergodic_mi {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Cholesky failed or an eigenvalue fell below the semidefinite tolerance.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

// AR dynamics with spectral radius >= 1.
class UnstableModel : public Error {
 public:
  UnstableModel(const std::string& what, double radius)
      : Error(what), spectral_radius_(radius) {}
  double spectral_radius() const noexcept { return spectral_radius_; }

 private:
  double spectral_radius_;
};

// Invalid configuration; `field` is a dotted path such as "model.alpha".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace ergodic_mi
