/**
 * errors.hpp — error categories mapped to CLI exit codes.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace dm {

/// Bad command line. Exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad scenario/topology configuration. Exit code 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent dataset/model file. Exit code 4.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite loss or other numeric failure. Exit code 5.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dm
