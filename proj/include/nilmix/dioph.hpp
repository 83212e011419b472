#pragma once

// Empirical Diophantine certificates: the smallest value of
// |m|^dimE * sum_i |m . v_i| over nonzero integer m in a Euclidean ball.

#include "nilmix/nilalg.hpp"

#include <string>
#include <vector>

namespace nilmix::dioph {

struct DiophantineCertificate {
  std::string label;
  std::vector<RealVector> basis;  // v_1..v_t in scan coordinates
  std::size_t ambient_dim = 0;
  double radius = 0.0;
  /// Lower estimate of the minimum over the ball (rounded toward zero).
  double c_emp = 0.0;
  /// Canonical minimizer: first nonzero entry positive, lexicographically
  /// smallest among exact ties.
  IntVector argmin;
  bool pass = false;
  bool exact = false;  // evaluated in exact rational arithmetic
  std::uint64_t candidates = 0;  // lattice points evaluated after pruning
};

/// Scans 0 != m in Z^dimE with |m| <= R. Real directions are evaluated at
/// 256-bit working precision on the pruned candidate set.
DiophantineCertificate diophantine_certificate(const std::vector<RealVector>& v, std::size_t dim_e, double radius);
/// Exact variant for rational directions.
DiophantineCertificate diophantine_certificate(const std::vector<RationalVector>& v, std::size_t dim_e,
                                               double radius);

struct Lemma9Report {
  std::vector<DiophantineCertificate> certificates;  // labelled by subspace
  bool all_pass = true;
};

/// Certificates for W+, W-, the block-max and block-min sums in Z^m, and for
/// every Lyapunov subspace L_{i,j} inside its primary block F_i, scanned in
/// the coordinates of an exact lattice basis of F_i.
Lemma9Report verify_lemma9(const exactlin::RationalMatrix& m, double radius, unsigned bits = kDefaultPrecisionBits);

/// Lifts V (inside n_i) to F inside E through the layer-i coordinates and
/// certifies F in the coordinates of an integer basis of E.
DiophantineCertificate type_i_subspace(const nilalg::NilpotentAlgebra& a, std::size_t layer,
                                       const std::vector<RealVector>& v, const std::vector<RationalVector>& e,
                                       double radius);

}  // namespace nilmix::dioph
