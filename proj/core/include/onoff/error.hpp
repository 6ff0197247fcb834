#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace onoff {

/// Argument outside an operation's domain (negative mean, η > 1, m > n̄, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but carries no usable information (e.g. an
/// all-zero no-click vector that cannot be renormalized).
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The model cannot explain the data at the current iterate, or a
/// logarithm of zero would be required.
class NumericDegeneracy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed CSV/JSON input. `line()` is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace onoff
