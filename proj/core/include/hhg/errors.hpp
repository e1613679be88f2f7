#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hhg {

/// Base of every error the library raises. The subclasses map one-to-one onto
/// the CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration. `key()` names the offending config
/// key when one is known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, std::string key = {})
      : Error(key.empty() ? message : key + ": " + message), detail_(message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }
  /// The message without the key prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::string key_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SolverInstability : public Error {
 public:
  SolverInstability(const std::string& message, std::size_t step)
      : Error(message + " (time step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace hhg
