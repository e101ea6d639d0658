// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAP_ERROR_HPP_
#define TAP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace tap {

// Base of every error thrown by the library. Each subclass maps onto one
// failure category named in the module contracts.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public Error {  // malformed container / file header
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class IntegrityError : public Error {  // checksum, version or config mismatch
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tap

#endif  // TAP_ERROR_HPP_
