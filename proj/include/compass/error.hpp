#pragma once

#include <stdexcept>
#include <string>

namespace compass {

/// Root of every error the toolkit throws. Module headers derive the named
/// failure kinds from this so callers can catch broadly or precisely.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration input (config file syntax, invalid parameter values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem or persistence failure.
class StorageError : public Error {
 public:
  using Error::Error;
};

}  // namespace compass
