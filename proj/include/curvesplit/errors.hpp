#pragma once

#include <stdexcept>
#include <string>

namespace curvesplit {

/// Base class for every error raised by the library. `code()` is a short
/// machine-readable tag used in CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

  /// Invariant violations indicate a bug or a malformed certificate; all
  /// other errors are input validation failures.
  virtual bool is_invariant_violation() const noexcept { return false; }

 private:
  std::string code_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
  explicit ValidationError(const std::string& message) : Error("validation", message) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("domain", message) {}
};

class IncompleteResolutionError : public Error {
 public:
  explicit IncompleteResolutionError(const std::string& message)
      : Error("incomplete-resolution", message) {}
};

class ResourceError : public Error {
 public:
  ResourceError(const std::string& message, int crossings, int cap)
      : Error("resource", message), crossings_(crossings), cap_(cap) {}

  int crossings() const noexcept { return crossings_; }
  int cap() const noexcept { return cap_; }

 private:
  int crossings_;
  int cap_;
};

class MoveMismatchError : public Error {
 public:
  explicit MoveMismatchError(const std::string& message) : Error("move-mismatch", message) {}
};

/// A homotopy script failed at a specific event (1-based step index).
class ScriptError : public Error {
 public:
  ScriptError(std::string code, const std::string& message, int step)
      : Error(std::move(code), message), step_(step) {}

  int step() const noexcept { return step_; }

 private:
  int step_;
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& message) : Error("precondition", message) {}
};

class GenericityError : public Error {
 public:
  explicit GenericityError(const std::string& message) : Error("genericity", message) {}
};

class RadiusError : public Error {
 public:
  explicit RadiusError(const std::string& message) : Error("radius", message) {}
};

/// A slice reached the length bound (step 0 is the initial diagram).
class BoundError : public ScriptError {
 public:
  BoundError(const std::string& message, int step) : ScriptError("bound", message, step) {}
};

/// Frames could not be turned into a move sequence; `step()` is the index of
/// the later frame of the offending pair.
class DetectionError : public ScriptError {
 public:
  using ScriptError::ScriptError;
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& message) : Error("invariant-violation", message) {}
  bool is_invariant_violation() const noexcept override { return true; }
};

}  // namespace curvesplit
