#pragma once

// Fractional coboundary equations in two computable models: trigonometric
// polynomials on tori (Fourier coefficients indexed by Z^d) and the
// Schrodinger line model with the r = 1/2 integrability threshold.

#include "nilmix/core.hpp"

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace nilmix::fracsolve {

using Complex = std::complex<double>;

/// Finitely supported Fourier series on T^d. Coefficients are stored in
/// lexicographic order of the frequency, which is the canonical iteration
/// order; zero coefficients are never stored.
class FourierObservable {
public:
  explicit FourierObservable(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  const std::map<IntVector, Complex>& coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }
  std::size_t size() const { return coeffs_.size(); }

  /// Sets (or with c == 0 erases) the coefficient at z.
  void set(const IntVector& z, Complex c);
  void add(const IntVector& z, Complex c);
  Complex at(const IntVector& z) const;

  bool mean_zero() const;
  /// max |z| over the support (Euclidean), 0 for the empty series
  double support_radius() const;
  double max_abs() const;

  FourierObservable operator+(const FourierObservable& other) const;
  FourierObservable operator*(Complex a) const;
  /// Pointwise product, computed by coefficient convolution.
  FourierObservable product(const FourierObservable& other) const;
  /// The complex conjugate function: coefficients conj(f_{-z}).
  FourierObservable conjugate() const;
  /// L^2 inner product int f conj(g).
  Complex inner(const FourierObservable& other) const;

private:
  std::size_t dim_;
  std::map<IntVector, Complex> coeffs_;
};

/// Gaussian rational a + b i.
struct GaussianRational {
  Rational re;
  Rational im;

  GaussianRational() = default;
  GaussianRational(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}
  bool is_zero() const { return re == 0 && im == 0; }
  GaussianRational conj() const { return {re, -im}; }
  Complex to_complex() const { return {re.convert_to<double>(), im.convert_to<double>()}; }
  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) = default;
};

/// Finitely supported Fourier series with exact Gaussian rational coefficients.
class ExactObservable {
public:
  explicit ExactObservable(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  const std::map<IntVector, GaussianRational>& coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }
  void set(const IntVector& z, const GaussianRational& c);
  GaussianRational at(const IntVector& z) const;
  bool mean_zero() const;
  ExactObservable product(const ExactObservable& other) const;
  FourierObservable to_double() const;
  /// Exact conversion: every double is a dyadic rational.
  static ExactObservable from_double(const FourierObservable& f);

private:
  std::size_t dim_;
  std::map<IntVector, GaussianRational> coeffs_;
};

/// Real observables: cos(2 pi k.x) and sin(2 pi k.x).
FourierObservable cos_mode(const IntVector& k, double amplitude = 1.0);
FourierObservable sin_mode(const IntVector& k, double amplitude = 1.0);
ExactObservable exact_cos_mode(const IntVector& k);
ExactObservable exact_sin_mode(const IntVector& k);

/// f = f_o + f_perp: f_o keeps the modes z with z.t = 0 for every direction t.
std::pair<FourierObservable, FourierObservable> project_torus_factor(const FourierObservable& f,
                                                                      const std::vector<RationalVector>& directions);

/// Directions v_1..v_t in R^d. When `exact` is set the directions are rational
/// and the resonance test z.v = 0 is exact.
struct DirectionBasis {
  std::vector<std::vector<double>> v;
  std::vector<RationalVector> exact;

  DirectionBasis() = default;
  DirectionBasis(std::vector<std::vector<double>> dirs) : v(std::move(dirs)) {}
  static DirectionBasis rational(const std::vector<RationalVector>& dirs);
  std::size_t size() const { return v.size(); }
  double dot(std::size_t i, const IntVector& z) const;
  /// z.v_i == 0 exactly (rational) or |z.v_i| < 1e-15 |z| |v_i| (floating point)
  bool resonant(std::size_t i, const IntVector& z) const;
};

struct SmallDivisorSplit {
  FourierObservable large;  // sum_j |z.v_j| >= 1
  FourierObservable small;  // 0 < sum_j |z.v_j| < 1, z != 0
  FourierObservable zero;   // z = 0
  /// Smallest index attaining max_j |z.v_j|, for every supported z != 0.
  std::map<IntVector, std::size_t> selector;
};

SmallDivisorSplit split_small_divisor(const FourierObservable& f, const DirectionBasis& v);

enum class Mode { modulus, signed_power };

struct FractionalSolution {
  DirectionBasis directions;
  double r = 0.0;
  Mode mode = Mode::modulus;
  /// phi_i is supported on the frequencies with selector i.
  std::vector<FourierObservable> phi;
  /// the small-divisor parts phi_{[2],i}
  std::vector<FourierObservable> phi_small;
  /// sup_z |sum_i D_i(phi_i)_z - f_z|, D_i = |2 pi z.v_i|^r or (2 pi i z.v_i)^r
  double residual = 0.0;
  std::vector<double> norms;
  std::vector<double> small_norms;
  /// the mode f_0 dropped from a non-mean-zero input
  Complex dropped_mean = 0.0;
  std::vector<std::string> warnings;
};

/// Solves sum_i |v_i|^r phi_i = f (modulus mode) or sum_i v_i^r phi_i = f
/// (signed mode, integer r). A nonzero mean is dropped with a warning.
/// Throws ObstructionError for a supported frequency with z.v_sel(z) = 0.
FractionalSolution solve_fractional(const FourierObservable& f, const DirectionBasis& v, double r,
                                    Mode mode = Mode::modulus);

/// Applies the operator of a solution to phi: sum_i D_i phi_i.
FourierObservable apply_operator(const FractionalSolution& s);

/// (sum_z (1 + 4 pi^2 |z|^2)^s |f_z|^2)^(1/2)
double sobolev_norm(const FourierObservable& f, double s);
/// (sum_z (1 + sum_i 4 pi^2 |z.v_i|^2)^s |f_z|^2)^(1/2)
double partial_sobolev_norm(const FourierObservable& f, double s, const DirectionBasis& v);

/// Bound (C/t)^(-r) (2 pi)^(-r) |f|_{r d} on |phi_{[2],i}| implied by a
/// Diophantine constant C for the t directions in Z^d.
double small_divisor_bound(const FourierObservable& f, double c, std::size_t t, double r);

/// Real profile xi on [-1, 1].
struct Profile {
  std::function<double(double)> xi;
  std::string name;

  static Profile function(std::function<double(double)> f, std::string name);
  /// Piecewise linear interpolation of (x, xi(x)) samples, x strictly increasing.
  static Profile samples(std::vector<std::pair<double, double>> points, std::string name);
};

struct ThresholdResult {
  double r = 0.0;
  double h = 0.0;
  double value = 0.0;  // I(r, h)
  double error_estimate = 0.0;
  /// a with |xi(x)|^2 |x|^(-2r) ~ |x|^a near the origin
  double tail_exponent = 0.0;
  bool convergent = false;
  std::string verdict;
};

/// I(r, h) = int_{h <= |x| <= 1} |xi(x)|^2 |x|^(-2r) dx by composite midpoint
/// rules on dyadic shells, and the verdict on the limit h -> 0.
ThresholdResult schrodinger_threshold(const Profile& p, double r, double h);

}  // namespace nilmix::fracsolve
