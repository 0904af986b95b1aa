#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sgn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "Error"; }
};

class GridMismatch : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "GridMismatch"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "InvalidArgument"; }
};

/// Depth reached zero or became negative.
class DryState : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "DryState"; }
};

class NewtonDivergence : public Error {
 public:
  NewtonDivergence(const std::string& what, std::vector<double> trace)
      : Error(what), residual_trace(std::move(trace)) {}
  const char* kind() const noexcept override { return "NewtonDivergence"; }

  /// Residual max-norm at every Newton iterate, starting with the initial guess.
  std::vector<double> residual_trace;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "SingularJacobian"; }
};

class SolverBreakdown : public Error {
 public:
  SolverBreakdown(const std::string& what, double res) : Error(what), residual(res) {}
  const char* kind() const noexcept override { return "SolverBreakdown"; }
  double residual;
};

class InsufficientSnapshots : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "InsufficientSnapshots"; }
};

class CertificationFailure : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "CertificationFailure"; }
};

class InstabilityDetected : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "InstabilityDetected"; }
};

/// A step failed inside a longer run; wraps the cause with its position.
class RunFailure : public Error {
 public:
  RunFailure(const std::string& what, std::string cause_kind, long step, double t)
      : Error(what), cause(std::move(cause_kind)), step_index(step), time(t) {}
  const char* kind() const noexcept override { return "RunFailure"; }
  std::string cause;
  long step_index;
  double time;
};

}  // namespace sgn
