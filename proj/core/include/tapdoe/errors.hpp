#pragma once

#include <stdexcept>
#include <string>

namespace tapdoe {

/// Bad user input: malformed files, inconsistent configuration, invalid designs.
/// The CLI maps this family to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax or validation failure in a mechanism file, carrying the 1-based line.
class ParseError : public InputError {
 public:
  ParseError(int line, const std::string& what)
      : InputError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Numerical failure: solver divergence, singular matrices, non-finite values.
/// The CLI maps this family to exit code 1.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SimulationError : public NumericalError {
 public:
  SimulationError(double time, const std::string& what)
      : NumericalError("simulation failed at t = " + std::to_string(time) + " s: " + what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace tapdoe
