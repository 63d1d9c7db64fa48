#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace rslab {

// Base class for every failure this library reports. All errors are thrown,
// never encoded in return values; callers that want a soft failure catch the
// specific subclass they can recover from.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation requested at (or numerically indistinguishable from) a pole.
class PoleHit : public Error {
 public:
  PoleHit(const std::string& msg, std::complex<double> where)
      : Error(msg), where_(where) {}
  std::complex<double> where() const { return where_; }

 private:
  std::complex<double> where_;
};

class OutOfStrip : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class ShiftDepthExceeded : public Error {
 public:
  using Error::Error;
};

class RealPeriodRatio : public Error {
 public:
  using Error::Error;
};

class NonconvergentProduct : public Error {
 public:
  using Error::Error;
};

class DegenerateLattice : public Error {
 public:
  using Error::Error;
};

class InsideCone : public Error {
 public:
  using Error::Error;
};

class CoincidingCoordinates : public Error {
 public:
  using Error::Error;
};

class StripExceeded : public Error {
 public:
  using Error::Error;
};

class GaugeSingular : public Error {
 public:
  using Error::Error;
};

class SingularDenominator : public Error {
 public:
  using Error::Error;
};

// Exact-arithmetic path hit a vanishing denominator (invalid sample or an
// invalid negative-index Pochhammer extension).
class ZeroDenominator : public Error {
 public:
  using Error::Error;
};
using DenominatorZero = ZeroDenominator;

// An identity that is supposed to hold exactly failed. Must never fire; if it
// does, the message carries the offending sample.
class IdentityViolation : public Error {
 public:
  using Error::Error;
};

class ToleranceExceeded : public Error {
 public:
  using Error::Error;
};
using ToleranceNotMet = ToleranceExceeded;

class NonconvergentSeries : public Error {
 public:
  using Error::Error;
};

class SlopeMismatch : public Error {
 public:
  using Error::Error;
};

class RegimeViolation : public Error {
 public:
  using Error::Error;
};

class DegenerateConfiguration : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rslab
