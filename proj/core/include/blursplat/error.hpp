#pragma once

#include <stdexcept>
#include <string>

namespace blursplat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read, written or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A run configuration is missing keys or holds invalid values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A loss or parameter became non-finite during optimization.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace blursplat
