#pragma once

// Nilpotent Lie algebras in Malcev coordinates, lattice automorphisms and the
// spectral classification of automorphisms and commuting Z^l actions.

#include "nilmix/exactlin.hpp"

#include <complex>
#include <string>
#include <vector>

namespace nilmix::nilalg {

using exactlin::LyapunovSplitting;
using exactlin::PrimaryDecomposition;
using exactlin::RationalMatrix;
using exactlin::RationalSubspace;

/// Structure constants [e_i, e_j] = sum_k c[i][j][k] e_k over an ordered basis
/// split into layers E^1, ..., E^k.
class NilpotentAlgebra {
public:
  NilpotentAlgebra() = default;
  /// `layer_starts` lists the first basis index of every layer, starting with 0.
  NilpotentAlgebra(std::size_t dim, std::vector<std::size_t> layer_starts);
  static NilpotentAlgebra abelian(std::size_t dim);

  /// Sets [e_i, e_j] = value and [e_j, e_i] = -value.
  void set_bracket(std::size_t i, std::size_t j, const RationalVector& value);
  /// Sets one raw constant without enforcing antisymmetry (for validation input).
  void set_constant(std::size_t i, std::size_t j, std::size_t k, const Rational& value);

  std::size_t dim() const { return dim_; }
  const std::vector<std::size_t>& layer_starts() const { return layer_starts_; }
  std::size_t layer_count() const { return layer_starts_.size(); }
  /// 1-based layer index of basis vector i.
  std::size_t layer_of(std::size_t i) const;
  /// Basis indices of layer j (1-based).
  std::vector<std::size_t> layer(std::size_t j) const;
  /// Span of the basis vectors in layers j, j+1, ... (1-based).
  RationalSubspace layers_from(std::size_t j) const;

  const RationalVector& bracket(std::size_t i, std::size_t j) const { return c_[i * dim_ + j]; }
  RationalVector bracket(const RationalVector& x, const RationalVector& y) const;

private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> layer_starts_;
  std::vector<RationalVector> c_;
};

struct Check {
  std::string name;
  bool passed = true;
  std::string detail;
  std::vector<std::size_t> witness;  // offending basis indices
};

struct Diagnostics {
  bool ok = true;
  unsigned step = 0;  // nilpotency step (algebra diagnostics only)
  std::vector<Check> checks;
  const Check* find(const std::string& name) const;
};

Diagnostics validate_algebra(const NilpotentAlgebra& a);

/// n_1 = n, n_j = [n_{j-1}, n], ending with the zero subspace.
std::vector<RationalSubspace> central_series(const NilpotentAlgebra& a);

Diagnostics validate_automorphism(const NilpotentAlgebra& a, const RationalMatrix& m);

/// Induced action on n/[n,n] in the basis given by the first layer.
RationalMatrix abelianization_action(const NilpotentAlgebra& a, const RationalMatrix& m);

struct SpectralClassification {
  bool ergodic = false;
  bool rational_type = false;
  RationalSubspace n_z1;  // sum of non-cyclotomic primary blocks
  RationalSubspace n_z2;  // sum of cyclotomic primary blocks
  RationalMatrix abelianization;
  PrimaryDecomposition abelian_primary;
  LyapunovSplitting lyapunov;
  std::vector<RealVector> w_minus, w_zero, w_plus;
};

/// Throws InputError for dimension mismatches and PreconditionError when `m`
/// is not a lattice automorphism of `a`.
SpectralClassification classify(const NilpotentAlgebra& a, const RationalMatrix& m,
                                unsigned bits = kDefaultPrecisionBits);

/// Root-of-unity part n^{(z,2)} of a single matrix.
RationalSubspace root_of_unity_part(const RationalMatrix& m);

/// dα(z) = prod_k M_k^{z_k} for commuting generators.
RationalMatrix action_matrix(const std::vector<RationalMatrix>& generators, const IntVector& z);

/// Throws PreconditionError unless all generators commute exactly.
void require_commuting(const std::vector<RationalMatrix>& generators);

/// Lyapunov functional chi of a commuting family: chi(z) is the Lyapunov
/// exponent of dα(z) on the joint subspace.
struct LyapunovFunctional {
  std::vector<CertifiedReal> coeffs;  // chi(e_k)
  std::vector<std::size_t> block;     // block index in each generator's splitting
  std::size_t multiplicity = 0;
  bool zero = false;
  /// A joint eigenvector (double precision) used to re-identify the functional.
  std::vector<std::complex<double>> witness;

  CertifiedReal evaluate(const IntVector& z) const;
};

struct FunctionalSet {
  std::vector<LyapunovFunctional> functionals;
  std::vector<RationalMatrix> generators;
  unsigned precision_bits = kDefaultPrecisionBits;

  /// Certified sign of chi(z) (-1, 0, +1). Ambiguous intervals are resolved
  /// exactly through the Lyapunov data of dα(z).
  int sign(std::size_t index, const IntVector& z) const;
  /// Whether chi_a(z) and chi_b(z) are certified different.
  bool differ(std::size_t a, std::size_t b, const IntVector& z) const;
};

FunctionalSet lyapunov_functionals(const std::vector<RationalMatrix>& generators,
                                   unsigned bits = kDefaultPrecisionBits);

struct ActionClassification {
  RationalSubspace n2;  // intersection of n^{(z,2)} over z != 0
  bool rational_type = false;
  bool has_ergodic_generator = false;
};

ActionClassification classify_action(const NilpotentAlgebra& a, const std::vector<RationalMatrix>& generators);

struct RegularElement {
  IntVector z;
  RationalSubspace n_z2;
  RationalSubspace n2;
  /// min |chi(z)| over nonzero functionals (certified lower bound)
  double min_functional = 0.0;
  /// min |chi_a(z) - chi_b(z)| over distinct functionals (certified lower bound)
  double min_separation = 0.0;
  std::vector<IntVector> chain;  // successive z_i of the root-of-unity reduction
};

RegularElement find_regular_element(const NilpotentAlgebra& a, const std::vector<RationalMatrix>& generators,
                                    unsigned bits = kDefaultPrecisionBits);

bool is_regular(const FunctionalSet& fs, const IntVector& z);

}  // namespace nilmix::nilalg
