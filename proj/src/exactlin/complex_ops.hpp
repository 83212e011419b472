#pragma once

// Minimal complex arithmetic over mpfr reals (std::complex is only specified
// for the builtin floating types).

#include "nilmix/exactlin.hpp"

namespace nilmix::exactlin::detail {

inline ComplexReal cadd(const ComplexReal& a, const ComplexReal& b) { return {a.re + b.re, a.im + b.im}; }
inline ComplexReal csub(const ComplexReal& a, const ComplexReal& b) { return {a.re - b.re, a.im - b.im}; }
inline ComplexReal cmul(const ComplexReal& a, const ComplexReal& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline ComplexReal cdiv(const ComplexReal& a, const ComplexReal& b) {
  Real den = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}
inline Real cabs(const ComplexReal& a) { return sqrt(a.re * a.re + a.im * a.im); }
inline ComplexReal cconj(const ComplexReal& a) { return {a.re, -a.im}; }

inline Real to_real(const Rational& q) { return Real(numerator(q)) / Real(denominator(q)); }

/// Horner evaluation of p and p' at z.
inline void horner(const Polynomial& p, const ComplexReal& z, ComplexReal& value, ComplexReal& deriv) {
  value = {Real(0), Real(0)};
  deriv = {Real(0), Real(0)};
  const auto& c = p.coeffs();
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    deriv = cadd(cmul(deriv, z), value);
    value = cmul(value, z);
    value.re += to_real(*it);
  }
}

}  // namespace nilmix::exactlin::detail
