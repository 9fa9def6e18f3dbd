#pragma once

#include <stdexcept>
#include <string>

namespace aircine {

// Invalid configuration or scenario input. Mapped to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Degenerate geometry or non-finite numeric state. Mapped to CLI exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Instance exceeds an explicit size guard. Mapped to CLI exit code 4.
struct SizeLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace aircine
