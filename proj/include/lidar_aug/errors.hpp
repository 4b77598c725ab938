#pragma once

#include <stdexcept>
#include <string>

namespace lidar_aug {

// Configuration / usage problems (bad parameters, malformed policy configs).
// The CLI maps these to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problems with input data (corrupt files, missing calibration, bad labels).
// The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace lidar_aug
