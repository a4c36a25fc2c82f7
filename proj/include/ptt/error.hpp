#pragma once

#include <stdexcept>
#include <string>

namespace ptt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array or grid sizes that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on input that violates its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function (negative time, ksq = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid model or scenario parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A constructed object failed its own post-construction check.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Too few samples for a fit or check.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Records or samples delivered out of time order.
class SequencingError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or iteration failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration text; carries the offending key and line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, int line, const std::string& what)
      : Error(describe(key, line, what)), key_(key), line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string describe(const std::string& key, int line, const std::string& what) {
    std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
    std::string which = key.empty() ? "" : "'" + key + "': ";
    return "config error: " + where + which + what;
  }
  std::string key_;
  int line_;
};

/// Snapshot file is not a well-formed PTTF file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Snapshot written by a format version this build does not read.
class UnsupportedVersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Snapshot parsed but the state it holds breaks the FlowState invariants.
class CorruptStateError : public Error {
 public:
  using Error::Error;
};

/// A runtime-checked bound or invariant was violated.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace ptt
