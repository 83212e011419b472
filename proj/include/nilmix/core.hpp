#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nilmix {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
/// Variable-precision binary float. New values take the process-wide default
/// precision, which PrecisionScope sets for the duration of a computation.
using Real = boost::multiprecision::mpfr_float;

using RationalVector = std::vector<Rational>;
using RealVector = std::vector<Real>;
using IntVector = std::vector<std::int64_t>;

inline constexpr unsigned kDefaultPrecisionBits = 128;
inline constexpr const char* kLibraryVersion = "1.0.0";

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input (bad dimensions, unparsable data, schema violations).
class InputError : public Error {
public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Certified intervals could not separate or identify values at the
/// requested working precision. Retrying with more bits may succeed.
class PrecisionError : public Error {
public:
  PrecisionError(const std::string& what, unsigned bits)
      : Error(what + " (at " + std::to_string(bits) + " bits)"), bits_(bits) {}
  unsigned bits() const noexcept { return bits_; }

private:
  unsigned bits_;
};

/// A supported frequency has an exactly vanishing divisor.
class ObstructionError : public Error {
public:
  ObstructionError(const std::string& what, IntVector frequency)
      : Error(what), frequency_(std::move(frequency)) {}
  const IntVector& frequency() const noexcept { return frequency_; }

private:
  IntVector frequency_;
};

/// Enumeration would exceed the configured work budget.
class BudgetError : public Error {
public:
  using Error::Error;
};

/// Degenerate data: zero observables, coincident times, empty fits.
class DegenerateError : public Error {
public:
  using Error::Error;
};

/// Sets the default mpfr precision for the lifetime of the scope.
class PrecisionScope {
public:
  explicit PrecisionScope(unsigned bits)
      : saved_(Real::default_precision()) {
    Real::default_precision(bits_to_digits(bits));
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

  static unsigned bits_to_digits(unsigned bits) { return bits * 30103u / 100000u + 2u; }

private:
  unsigned saved_;
};

/// Value with a certified absolute error radius. `exact` marks values known
/// exactly by an algebraic argument (radius is then zero).
struct CertifiedReal {
  double value = 0.0;
  double radius = 0.0;
  bool exact = false;

  double lo() const { return value - radius; }
  double hi() const { return value + radius; }
  bool certified_positive() const { return lo() > 0.0; }
  bool certified_negative() const { return hi() < 0.0; }
  bool certified_zero() const { return exact && value == 0.0; }
};

/// Neumaier compensated summation. Adding terms in a fixed order gives
/// bit-identical results.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::fabs(sum_) >= std::fabs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace nilmix
