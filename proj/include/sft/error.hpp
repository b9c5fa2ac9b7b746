#pragma once

#include <stdexcept>
#include <string>

namespace sft {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The resize floors to zero rows or columns: the input is smaller than one patch.
class DegenerateResize : public Error {
 public:
  using Error::Error;
};

class InvalidDuration : public Error {
 public:
  using Error::Error;
};

class NonDivisibleStride : public Error {
 public:
  using Error::Error;
};

class InvalidOutputShape : public Error {
 public:
  using Error::Error;
};

class InvalidCount : public Error {
 public:
  using Error::Error;
};

/// Slow and fast frame sets of an interleaved arrangement overlap or leave gaps.
class PartitionViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sft
