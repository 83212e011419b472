#pragma once

// Exact rational linear algebra: matrices and polynomials over Q,
// factorization over Q, primary decomposition and certified Lyapunov data.

#include "nilmix/core.hpp"

#include <compare>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace nilmix::exactlin {

/// Dense row-major matrix with exact rational entries.
class RationalMatrix {
public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols);

  static RationalMatrix identity(std::size_t n);
  static RationalMatrix from_rows(std::initializer_list<std::initializer_list<long>> rows);
  static RationalMatrix from_int_rows(const std::vector<std::vector<std::int64_t>>& rows);
  static RationalMatrix from_columns(const std::vector<RationalVector>& columns, std::size_t rows);
  /// Block diagonal matrix diag(a, b).
  static RationalMatrix direct_sum(const RationalMatrix& a, const RationalMatrix& b);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_ && rows_ > 0; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  RationalVector row(std::size_t i) const;
  RationalVector column(std::size_t j) const;
  RationalMatrix transpose() const;
  RationalMatrix submatrix(const std::vector<std::size_t>& rows,
                           const std::vector<std::size_t>& cols) const;

  RationalVector apply(const RationalVector& v) const;
  Rational trace() const;
  Rational determinant() const;
  std::size_t rank() const;
  RationalMatrix inverse() const;
  /// Integer power; negative exponents use the exact inverse.
  RationalMatrix power(std::int64_t e) const;

  bool is_integer() const;
  bool is_zero() const;
  /// Integer entries with determinant +1 or -1.
  bool is_unimodular_integer() const;

  /// Basis of the right kernel, each vector scaled to a primitive integer vector.
  std::vector<RationalVector> kernel() const;

  std::vector<std::vector<double>> to_double() const;
  std::vector<std::vector<Real>> to_real() const;
  std::string to_string() const;

  friend RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b);
  friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b);
  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
  friend RationalMatrix operator*(const Rational& s, const RationalMatrix& a);
  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

/// Reduces `m` in place to reduced row echelon form; returns pivot columns.
std::vector<std::size_t> rref(RationalMatrix& m);

/// Scales a nonzero rational vector to a primitive integer vector whose first
/// nonzero entry is positive.
RationalVector primitive_integer(const RationalVector& v);

Rational dot(const RationalVector& a, const RationalVector& b);

/// Polynomial over Q, coefficients in ascending degree. The zero polynomial has
/// no coefficients; otherwise the leading coefficient is nonzero.
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(RationalVector coeffs);
  static Polynomial from_ints(std::initializer_list<long> ascending);
  static Polynomial monomial(unsigned degree, const Rational& c = 1);
  static Polynomial constant(const Rational& c);

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const RationalVector& coeffs() const { return c_; }
  Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
  const Rational& leading() const { return c_.back(); }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }
  bool is_integral() const;

  Polynomial monic() const;
  /// Integer coefficients with gcd 1 and positive leading coefficient.
  Polynomial primitive() const;
  Polynomial derivative() const;
  /// p(-x)
  Polynomial reflect() const;
  /// x^deg p(1/x)
  Polynomial reciprocal() const;

  Rational evaluate(const Rational& x) const;
  RationalMatrix evaluate(const RationalMatrix& m) const;

  /// Quotient and remainder; throws on division by zero.
  std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const;

  std::string to_string(const std::string& var = "x") const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) = default;

private:
  void trim();
  RationalVector c_;
};

Polynomial pow(const Polynomial& p, unsigned e);
/// Monic gcd (zero if both are zero).
Polynomial gcd(const Polynomial& a, const Polynomial& b);
/// Canonical factor order: by degree, then lexicographically by ascending coefficients.
bool canonical_less(const Polynomial& a, const Polynomial& b);

/// Characteristic polynomial det(xI - M), computed exactly.
Polynomial char_poly(const RationalMatrix& m);

struct FactorPower {
  Polynomial factor;
  unsigned multiplicity = 0;
};

/// Square-free decomposition p = c * prod_i s_i^i with s_i monic, square-free and
/// pairwise coprime. Entry i-1 holds s_i (possibly the constant 1).
std::vector<Polynomial> squarefree_decomposition(const Polynomial& p);

/// Irreducible factorization over Q. Factors are primitive integer polynomials
/// with positive leading coefficient, in canonical order; the content is dropped.
std::vector<FactorPower> factor_over_q(const Polynomial& p);

bool is_irreducible(const Polynomial& p);

/// The d-th cyclotomic polynomial.
Polynomial cyclotomic(unsigned d);
unsigned euler_totient(unsigned n);

/// Returns d when q is the cyclotomic polynomial Phi_d. Throws InputError when
/// q is not a monic irreducible integer polynomial.
std::optional<unsigned> is_cyclotomic(const Polynomial& q);

struct PrimaryBlock {
  Polynomial factor;
  unsigned multiplicity = 0;
  /// Exact basis of ker factor(M)^multiplicity (primitive integer vectors).
  std::vector<RationalVector> basis;
  std::optional<unsigned> cyclotomic_order;
};

struct PrimaryDecomposition {
  Polynomial char_poly;
  std::vector<PrimaryBlock> blocks;
};

PrimaryDecomposition primary_decomposition(const RationalMatrix& m);

/// Subspace of Q^n kept as a reduced row echelon basis, so equality is structural.
class RationalSubspace {
public:
  explicit RationalSubspace(std::size_t ambient = 0) : ambient_(ambient) {}
  static RationalSubspace span(const std::vector<RationalVector>& vectors, std::size_t ambient);
  static RationalSubspace whole(std::size_t ambient);

  std::size_t ambient() const { return ambient_; }
  std::size_t dim() const { return basis_.size(); }
  bool is_zero() const { return basis_.empty(); }
  const std::vector<RationalVector>& basis() const { return basis_; }
  /// Basis scaled to primitive integer vectors.
  std::vector<RationalVector> integer_basis() const;

  bool contains(const RationalVector& v) const;
  bool contains(const RationalSubspace& other) const;
  RationalSubspace orthogonal_complement() const;
  RationalSubspace intersect(const RationalSubspace& other) const;
  RationalSubspace sum(const RationalSubspace& other) const;
  /// Image under a square matrix.
  RationalSubspace image(const RationalMatrix& m) const;
  /// Z-basis of the lattice (subspace intersected with Z^n).
  std::vector<RationalVector> lattice_basis() const;

  friend bool operator==(const RationalSubspace& a, const RationalSubspace& b) = default;

private:
  std::size_t ambient_ = 0;
  std::vector<RationalVector> basis_;
};

/// Complex number at mpfr working precision.
struct ComplexReal {
  Real re;
  Real im;
};

/// Approximate root with a certified inclusion radius: the disk of `radius`
/// about `value` contains exactly one root when the disks are disjoint.
struct IsolatedRoot {
  ComplexReal value;
  Real radius;
};

/// All roots of a square-free polynomial with Weierstrass inclusion radii,
/// computed at `bits` of working precision. Throws PrecisionError when the
/// inclusion disks are not pairwise disjoint.
std::vector<IsolatedRoot> isolate_roots(const Polynomial& squarefree, unsigned bits);

/// One Lyapunov subspace L_{i,j} inside the primary block F_i.
struct LyapunovSubspace {
  std::size_t primary_index = 0;
  CertifiedReal exponent;
  std::size_t dim = 0;
  /// Real basis vectors, each scaled so its largest-magnitude entry is +1.
  std::vector<RealVector> basis;
  bool exact_basis = false;
  double residual = 0.0;
};

/// Subspaces with a common exponent merged across primary blocks.
struct LyapunovBlock {
  CertifiedReal exponent;
  std::size_t multiplicity = 0;
  std::vector<std::size_t> members;  // indices into LyapunovSplitting::subspaces
};

struct LyapunovSplitting {
  unsigned precision_bits = kDefaultPrecisionBits;
  PrimaryDecomposition primary;
  std::vector<LyapunovSubspace> subspaces;  // by primary block, then ascending exponent
  std::vector<LyapunovBlock> blocks;        // ascending exponent
  CertifiedReal exponent_sum;               // sum of multiplicity * exponent
  double max_residual = 0.0;

  std::vector<RealVector> w_plus() const;
  std::vector<RealVector> w_zero() const;
  std::vector<RealVector> w_minus() const;
  std::vector<RealVector> block_max() const;
  std::vector<RealVector> block_min() const;
  /// Per primary block: indices of its subspaces in ascending exponent order.
  std::vector<std::vector<std::size_t>> by_primary() const;
};

/// Certified Lyapunov data of an invertible rational matrix. Precision starts
/// at `bits` and doubles up to `max_bits` before a PrecisionError escapes.
LyapunovSplitting lyapunov_data(const RationalMatrix& m, unsigned bits = kDefaultPrecisionBits,
                                unsigned max_bits = 2048);

/// Largest relative invariance residual |Mv - P(Mv)| / |v| over the basis,
/// P the orthogonal projection onto the span of the basis.
double invariance_residual(const RationalMatrix& m, const std::vector<RealVector>& basis);

}  // namespace nilmix::exactlin
