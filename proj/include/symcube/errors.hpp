#pragma once

#include <stdexcept>
#include <string>

namespace symcube {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied an argument outside the operation's domain
/// (non-prime modulus, zero where a unit is required, ...).
class InputError : public Error {
public:
  using Error::Error;
};

class SingularCurve : public Error {
public:
  SingularCurve() : Error("singular Weierstrass model (discriminant is zero)") {}
};

class NonIntegralModel : public Error {
public:
  using Error::Error;
};

/// A documented precondition does not hold, e.g. a classifier was handed a
/// model that is not minimal at the prime.
class PreconditionError : public Error {
public:
  using Error::Error;
};

class UndefinedGamma : public Error {
public:
  UndefinedGamma() : Error("gamma invariant undefined: c6 = 0") {}
};

/// Raised when the classification tables produce no (or more than one) row
/// for data that should always match exactly one.
class ClassificationError : public Error {
public:
  using Error::Error;
};

/// Two independent computations disagreed. Indicates a bug, not bad input.
class InternalError : public Error {
public:
  using Error::Error;
};

} // namespace symcube
