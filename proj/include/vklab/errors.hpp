#pragma once

#include <stdexcept>
#include <string>

namespace vklab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A NaN or infinity appeared in a sampled quantity.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

/// Two operands live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

class ResolutionTooCoarse : public Error {
 public:
  using Error::Error;
};

/// Invalid argument or grid description (bad spacing, bad CSV, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class NotAdmissible : public Error {
 public:
  using Error::Error;
};

class NoPlateau : public Error {
 public:
  using Error::Error;
};

class SpecInvalid : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class PreconditionNotVerified : public Error {
 public:
  using Error::Error;
};

}  // namespace vklab
