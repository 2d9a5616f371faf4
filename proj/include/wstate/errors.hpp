#pragma once

#include <stdexcept>

namespace wstate {

/// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  static constexpr int exit_code = 2;
};

/// Integration failed a numerical guard: step too coarse, positivity lost
/// (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  static constexpr int exit_code = 3;
};

}  // namespace wstate
