#pragma once

#include <stdexcept>
#include <string>

namespace eqs {

/// File or text input could not be parsed. Carries a 1-based line number
/// when the failing location is known (0 otherwise).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, long line = 0)
      : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Invalid scenario configuration or inconsistent user input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degenerate or inconsistent geometry (zero-volume tets, bad node indices, ...).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown: non-finite values, indefinite operators, solver failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eqs
