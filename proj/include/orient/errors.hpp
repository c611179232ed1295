#pragma once

#include <stdexcept>
#include <string>

namespace orient {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Every effective noise variance is zero, so the likelihood is undefined.
class ZeroVariance : public Error {
 public:
  using Error::Error;
};

/// SNR requested for a noiseless model.
class ZeroNoise : public Error {
 public:
  using Error::Error;
};

class FileError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace orient
