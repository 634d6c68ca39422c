#pragma once

#include <stdexcept>
#include <string>

namespace musob {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A measure spec (or other input document) is malformed. `path()` is the
/// JSON path of the offending field, e.g. `$.segments[1].power`.
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& message);
  [[nodiscard]] const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The operation's precondition does not hold for this input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Problem size exceeds a solver guard.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Inputs were derived from different measures.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// An integrand or callback produced a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(double location, const std::string& message);
  [[nodiscard]] double location() const noexcept { return location_; }

 private:
  double location_;
};

/// The measure is valid but outside what a construction supports.
class UnsupportedSpecError : public Error {
 public:
  using Error::Error;
};

}  // namespace musob
