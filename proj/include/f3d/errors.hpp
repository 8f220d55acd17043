#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace f3d {

/// Input violates a documented precondition or invariant. CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written. CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed serialized data. `location` names where the problem was found:
/// a byte offset for binary and JSON syntax errors, a JSON pointer for field
/// errors, or a path for unresolvable references.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::string location)
      : ValidationError(what + " (at " + location + ")"), location_(std::move(location)) {}

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

/// Correspondence set too degenerate for a rigid fit (collinear or coincident).
class DegenerateAlignment : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace f3d
