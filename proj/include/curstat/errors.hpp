#pragma once

#include <stdexcept>

namespace curstat {

/// Violated precondition on an argument (bad bandwidth, t outside the support, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unreadable or malformed dataset.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace curstat
