#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lightsnn {

// Precondition violations on public operations surface as std::invalid_argument.

/// Thrown when a tensor operation produces NaN or Inf.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An architecture whose operations cannot be realized on its cell geometry.
class InvalidArchitecture : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The caller broke a stateful contract (e.g. forward on a non-reset network).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed dataset or tensor file.
class DataFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed architecture or report text. Carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace lightsnn
