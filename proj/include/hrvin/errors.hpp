#pragma once

#include <stdexcept>

namespace hrvin {

// Raised on invalid configuration input (file or programmatic). Mapped to
// exit code 2 by the CLI.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised on filesystem failures. Mapped to exit code 3 by the CLI.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hrvin
