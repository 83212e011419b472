#include "nilmix/fracsolve.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace nilmix::fracsolve {

namespace {

std::string show(const IntVector& z) {
  std::string s = "(";
  for (std::size_t k = 0; k < z.size(); ++k) s += (k ? "," : "") + std::to_string(z[k]);
  return s + ")";
}

// D_i at frequency z = magnitude * phase with magnitude |2 pi z.v_i|^r and
// phase 1 (modulus) or (i sign(z.v_i))^r (signed). The phase is a unit in
// {1, i, -1, -i}, so both modes share the magnitude bit for bit.
struct Divisor {
  double magnitude;
  Complex phase;
  Complex value() const { return magnitude * phase; }
  // c / D with the phase applied exactly
  Complex divide(const Complex& c) const { return (c / magnitude) * std::conj(phase); }
};

Divisor divisor(const DirectionBasis& v, std::size_t i, const IntVector& z, double r, Mode mode) {
  const double d = 2 * std::numbers::pi * v.dot(i, z);
  Divisor out{std::pow(std::abs(d), r), 1.0};
  if (mode == Mode::signed_power) {
    const Complex unit(0.0, d < 0 ? -1.0 : 1.0);
    for (long k = 0; k < std::lround(r); ++k) out.phase *= unit;
  }
  return out;
}

}  // namespace

FractionalSolution solve_fractional(const FourierObservable& f, const DirectionBasis& v, double r, Mode mode) {
  if (!(r > 0)) throw InputError("order r must be positive");
  if (mode == Mode::signed_power && r != std::round(r)) throw InputError("signed mode needs an integer order r");
  for (const auto& d : v.v)
    if (d.size() != f.dim()) throw InputError("direction length differs from the torus dimension");
  auto split = split_small_divisor(f, v);

  FractionalSolution s;
  s.directions = v;
  s.r = r;
  s.mode = mode;
  s.phi.assign(v.size(), FourierObservable(f.dim()));
  s.phi_small.assign(v.size(), FourierObservable(f.dim()));
  if (!split.zero.empty()) {
    s.dropped_mean = split.zero.coeffs().begin()->second;
    s.warnings.push_back("observable has nonzero mean; the zero mode was dropped");
  }
  for (const auto* part : {&split.large, &split.small})
    for (const auto& [z, c] : part->coeffs()) {
      const std::size_t i = split.selector.at(z);
      if (v.resonant(i, z))
        throw ObstructionError(std::string("resonant frequency ") + show(z) +
                                   (v.exact.empty() ? " (resonance at float precision)" : ""),
                               z);
      const Complex phi = divisor(v, i, z, r, mode).divide(c);
      s.phi[i].set(z, phi);
      if (part == &split.small) s.phi_small[i].set(z, phi);
    }

  auto applied = apply_operator(s);
  for (const auto& [z, c] : f.coeffs()) {
    if (split.zero.coeffs().count(z)) continue;
    s.residual = std::max(s.residual, std::abs(applied.at(z) - c));
  }
  for (const auto& [z, c] : applied.coeffs())
    if (!f.coeffs().count(z)) s.residual = std::max(s.residual, std::abs(c));
  for (std::size_t i = 0; i < v.size(); ++i) {
    s.norms.push_back(sobolev_norm(s.phi[i], 0));
    s.small_norms.push_back(sobolev_norm(s.phi_small[i], 0));
  }
  return s;
}

FourierObservable apply_operator(const FractionalSolution& s) {
  const std::size_t dim = s.phi.empty() ? 0 : s.phi.front().dim();
  std::set<IntVector> support;
  for (const auto& p : s.phi)
    for (const auto& [z, c] : p.coeffs()) support.insert(z);
  FourierObservable out(dim);
  for (const auto& z : support) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < s.phi.size(); ++i) {
      const Complex c = s.phi[i].at(z);
      if (c != Complex(0.0)) acc += divisor(s.directions, i, z, s.r, s.mode).value() * c;
    }
    out.set(z, acc);
  }
  return out;
}

}  // namespace nilmix::fracsolve
