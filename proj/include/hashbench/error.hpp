#pragma once

#include <stdexcept>
#include <string>

namespace hashbench {

/// Base of every error raised by the library. Each subclass names one
/// failure category so callers (and tests) can dispatch on it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched lengths or dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A rank cutoff or index outside its valid range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// AP requested for a query with no correct item in the database.
class UndefinedApError : public Error {
 public:
  using Error::Error;
};

/// Too few items for the requested sampling/training.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Degenerate input (single-class labels, zero bandwidth, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Stored code or parameter that cannot have come from a valid encoder.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Codec cannot serve the requested protocol (e.g. no decoder).
class UnsupportedCodecError : public Error {
 public:
  using Error::Error;
};

/// A runtime self-check failed. `invariant()` is the short name printed by
/// the CLI.
class InvariantViolation : public Error {
 public:
  InvariantViolation(std::string invariant, const std::string& detail)
      : Error("invariant violated: " + invariant + ": " + detail),
        invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

inline void check_invariant(bool ok, const char* name, const std::string& detail = {}) {
  if (!ok) throw InvariantViolation(name, detail);
}

}  // namespace hashbench
