#pragma once

#include <stdexcept>

namespace fedloc {

// Bad arguments to a library operation (shape mismatch, empty input, ...).
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unusable configuration value, e.g. a missing-RSS constant that is not
// below the weakest detectable signal.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file that does not match the expected layout; the message names
// the offending line where applicable.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-order wire traffic; the offending connection gets
// closed by whoever throws this.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fedloc
