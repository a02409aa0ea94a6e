#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace vortexlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (zero cluster sum, bad catalog
/// parameters, mismatched sizes, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The superposition scale r is too large for the clusters to fit.
class ScaleTooLargeError : public PreconditionError {
 public:
  ScaleTooLargeError(const std::string& what, double max_admissible_r)
      : PreconditionError(what), max_admissible_r_(max_admissible_r) {}
  double max_admissible_r() const { return max_admissible_r_; }

 private:
  double max_admissible_r_;
};

/// Configuration fails the rigid-rotation residual test.
class NotAnEquilibriumError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Base for state-validity failures. `time` is NaN outside of integration.
class GeometryError : public Error {
 public:
  GeometryError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class DomainError : public GeometryError {
 public:
  DomainError(const std::string& what, int vortex,
              double time = std::numeric_limits<double>::quiet_NaN())
      : GeometryError(what, time), vortex_(vortex) {}
  int vortex() const { return vortex_; }

 private:
  int vortex_;
};

class CollisionError : public GeometryError {
 public:
  CollisionError(const std::string& what, int first, int second,
                 double time = std::numeric_limits<double>::quiet_NaN())
      : GeometryError(what, time), first_(first), second_(second) {}
  int first() const { return first_; }
  int second() const { return second_; }

 private:
  int first_;
  int second_;
};

class StepSizeUnderflowError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace vortexlab
