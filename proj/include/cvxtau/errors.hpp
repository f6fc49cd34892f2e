#pragma once

#include <stdexcept>
#include <string>

namespace cvxtau {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed measure: negative mass, total mass != 1, overlapping pieces,
/// or a symmetric flag that the tails contradict.
class InvalidMeasure : public Error {
 public:
  using Error::Error;
};

class NotSymmetric : public Error {
 public:
  NotSymmetric() : Error("measure is not flagged symmetric") {}
};

/// Purely atomic on (0, inf) while still carrying mass there.
class NoDensity : public Error {
 public:
  NoDensity() : Error("measure has no absolutely continuous part on (0, inf)") {}
};

class UnboundedBelow : public Error {
 public:
  using Error::Error;
};

class Unbounded : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class SlopeBoundViolated : public Error {
 public:
  using Error::Error;
};

class DivergentIntegral : public Error {
 public:
  using Error::Error;
};

class NotInClass : public Error {
 public:
  using Error::Error;
};

class EmptyBase : public Error {
 public:
  EmptyBase() : Error("no sample fell inside the base set A") {}
};

class UnsupportedSet : public Error {
 public:
  using Error::Error;
};

/// Configuration / serialization problems (bad keys, wrong types).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cvxtau
