#pragma once

#include <stdexcept>
#include <string>

namespace fdm {

/// Precondition violated by the caller (bad degree, bad form index, size mismatch, ...).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical kernel could not complete (nonpositive pivot, eigensolver stall, ...).
class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

/// Well-formed input describing an invalid object (e.g. an inverted cell).
class InvalidData : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A matrix lacks the structure an algorithm relies on.
class InvalidStructure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace fdm
