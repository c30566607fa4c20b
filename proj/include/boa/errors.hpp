#pragma once

#include <stdexcept>
#include <string>

namespace boa {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor dimensions violate an operation's precondition.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A mixing coefficient left the range the operators accept.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// An inverse transform produced a non-negligible imaginary part where the
// caller asserted a conjugate-symmetric spectrum.
class AsymmetryError : public Error {
 public:
  using Error::Error;
};

class UnknownOpError : public Error {
 public:
  using Error::Error;
};

// Aliasing probe lies inside the band an operator retains.
class FrequencyRangeError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

}  // namespace boa
