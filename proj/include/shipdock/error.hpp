#pragma once

#include <stdexcept>
#include <string>

namespace shipdock {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A thruster angle or force outside its admissible range.
class BoundViolation : public Error {
 public:
  using Error::Error;
};

// Geometric input that cannot form a valid polygon (too few / collinear points).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// Violated function precondition (e.g. dilating a polygon that excludes the origin).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Singular inertia matrix during model assembly.
class AssemblyError : public Error {
 public:
  using Error::Error;
};

// Sizes of vectors/layouts that do not agree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Scenario file problems. `field` is a JSON pointer (or "line N" for syntax errors).
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace shipdock
