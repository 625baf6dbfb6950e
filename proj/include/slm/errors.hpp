#pragma once

#include <stdexcept>
#include <string>

namespace slm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite coordinates or arguments outside a function's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation not defined for the given object (e.g. sampling a zero kernel).
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// Inserting a point that already exists would make the configuration non-simple.
class CoincidenceError : public Error {
 public:
  using Error::Error;
};

class InvalidHandle : public Error {
 public:
  using Error::Error;
};

/// Incrementally maintained rate sums drifted away from a full recomputation.
class NumericalDriftError : public Error {
 public:
  using Error::Error;
};

/// Master-equation truncation lost more probability mass than tolerated.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Rates depend on geometry, so the count process is not a Markov chain by itself.
class NotCountDetermined : public Error {
 public:
  using Error::Error;
};

/// Invalid user input. `key()` is the dotted path of the offending config key.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace slm
