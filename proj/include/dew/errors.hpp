#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dew {

// Base class for all errors raised by this library. The CLI maps any
// dew::Error to a diagnostic on stderr and a usage/parse exit code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed trace input. Carries the 1-based line number of the offending
// line so drivers can point at the input.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

// A value is syntactically fine but outside the supported domain, e.g. an
// address wider than the supported width.
class RangeError : public Error {
public:
  using Error::Error;
};

// Invalid cache geometry or sweep specification.
class ConfigError : public Error {
public:
  using Error::Error;
};

// A forest would exceed its node budget.
class ResourceError : public Error {
public:
  using Error::Error;
};

// Mismatched inputs to a cross-check (different configuration sets).
class UsageError : public Error {
public:
  using Error::Error;
};

// Raised by shadow-check mode when a short-circuit decision or a structural
// invariant disagrees with a full re-evaluation. The message contains a
// state dump of the offending node.
class ShadowViolation : public Error {
public:
  using Error::Error;
};

}  // namespace dew
