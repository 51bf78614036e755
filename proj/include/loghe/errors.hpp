#pragma once

#include <stdexcept>
#include <string>

namespace loghe {

/// Invalid run configuration (bad key, bad value, inconsistent sizes).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite value produced by a numerical kernel. `mode` is the offending
/// coefficient index, or -1 when the failure is not mode-attributable.
struct NumericalError : std::runtime_error {
  int mode;
  NumericalError(const std::string& what, int mode_index = -1)
      : std::runtime_error(what), mode(mode_index) {}
};

}  // namespace loghe
