#pragma once

#include <stdexcept>
#include <string>

namespace projgraph {

/// Bad argument or malformed input (maps to CLI exit code 2).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exhaustive enumeration was requested above the configured node cap
/// (maps to CLI exit code 3).
class EnumerationCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written (maps to CLI exit code 4).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace projgraph
