#pragma once

#include <stdexcept>
#include <string>

namespace kaonlab {

// Base of every error the library throws. The CLI maps each subclass onto its
// own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid physical constants or an unreadable/malformed configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Problems with user supplied data files.
class DataError : public Error {
 public:
  enum class Kind { io, parse, no_data, bad_sigma, missing_theory };

  DataError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Arguments outside a function's domain (negative times, empty bounds,
// non-normalized states, brackets without a sign change, ...).
class MathError : public Error {
 public:
  using Error::Error;
};

}  // namespace kaonlab
