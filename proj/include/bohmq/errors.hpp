#ifndef BOHMQ_ERRORS_HPP
#define BOHMQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bohmq {

/// Raised when a function handed to eval_on_grid produces a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an iterative solver exhausts its budget before meeting tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Raised when a computation produces non-finite values it cannot guard.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised on malformed run configuration; carries the offending line when known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace bohmq

#endif
