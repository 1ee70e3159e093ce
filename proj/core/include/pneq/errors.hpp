#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pneq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Multiplicity arithmetic exceeded the configured cap.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// A transition (or step) was fired at a marking that does not enable it.
class NotEnabledError : public Error {
 public:
  using Error::Error;
};

/// An enumeration was refused because the instance exceeds its configured cap.
class TooLargeError : public Error {
 public:
  using Error::Error;
};

/// Syntax or semantic error in a textual net/marking/relation, with position.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(message + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line(line),
        column(column) {}

  std::size_t line;
  std::size_t column;
};

}  // namespace pneq
