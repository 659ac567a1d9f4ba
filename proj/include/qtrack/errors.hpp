#pragma once

#include <stdexcept>
#include <string>

namespace qtrack {

// Bad configuration values (flags, config keys, out-of-range sizes).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input files; message names file and line where possible.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values showing up where finite math is required.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched array/matrix shapes between producer and consumer.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qtrack
