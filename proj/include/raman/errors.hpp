#pragma once

#include <stdexcept>
#include <string>

namespace raman {

// Invalid parameters and domain violations are reported with
// std::invalid_argument. The types below cover failures that callers
// (mainly the CLI) need to tell apart.

/// The Fock-space oracle could not represent the state within its
/// truncation budget.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fewer data points than the fit needs.
class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// All abscissae coincide, so the model cannot be identified.
class DegenerateDesign : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Too many bootstrap refits failed.
class UnstableFit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace raman
