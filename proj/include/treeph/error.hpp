#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treeph {

/// Malformed input text. Carries the 1-based line number of the offending record.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// An edge names a vertex id that was never declared.
class ReferenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The same vertex (or subject) id was declared twice.
class DuplicateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A statistic is undefined for the given input (constant vector, constant regressor...).
class DegenerateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Two diagrams have differing numbers of essential (infinite-death) dots.
class InfiniteDistanceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using ArgumentError = std::invalid_argument;

}  // namespace treeph
