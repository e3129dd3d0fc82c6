#pragma once

#include <stdexcept>
#include <string>

namespace opgx {

enum class ErrorKind {
  usage,       // bad arguments, unknown names, malformed input
  domain,      // scalar evaluated outside its domain
  spectrum,    // eigenvalue outside the admissible interval
  not_psd,     // matrix has a negative eigenvalue beyond clamping
  singular,    // inverse/log/negative power of a singular matrix
  numerical,   // solver failure, resampling exhausted
  hypothesis,  // a theorem hypothesis does not hold for the inputs
  io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(ErrorKind::numerical, what), residual_(residual) {}
  NumericalError(ErrorKind kind, const std::string& what) : Error(kind, what) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_ = 0.0;
};

/// Raised by oracles when a stated hypothesis fails; `hypothesis()` names it.
class HypothesisError : public Error {
 public:
  HypothesisError(std::string hypothesis, const std::string& detail)
      : Error(ErrorKind::hypothesis, hypothesis + ": " + detail), hypothesis_(std::move(hypothesis)) {}
  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

}  // namespace opgx
