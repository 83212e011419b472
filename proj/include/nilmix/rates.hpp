#pragma once

// Explicit rate quantities: rho, chi, Sobolev orders s_i(r), order-2
// envelopes, the Holder rate gamma(s), the directional rate Theta and the
// counting densities of good time tuples.

#include "nilmix/nilalg.hpp"

#include <string>
#include <vector>

namespace nilmix::rates {

using exactlin::RationalMatrix;
using nilalg::FunctionalSet;
using nilalg::NilpotentAlgebra;

struct RateReport {
  CertifiedReal rho;
  CertifiedReal chi;
  unsigned delta = 0;  // 0 for irrational type, 1 for rational type
  unsigned s0 = 0;     // dim n + 1
  CertifiedReal rho0;  // min{chi/2, rho/4}
  std::vector<CertifiedReal> rho_max, rho_min;  // per abelianization primary block
  std::vector<std::size_t> layer_dims;          // dim n_i - dim n_{i+1}
  std::vector<double> exponents;                // Lyapunov exponents of M on n
};

/// Throws PreconditionError for non-ergodic automorphisms.
RateReport rho_chi(const NilpotentAlgebra& a, const RationalMatrix& m, unsigned bits = kDefaultPrecisionBits);

/// s_i(r) = r (dim n_i - dim n_{i+1}) for every layer, and s(r) = max_i s_i(r).
struct SobolevOrders {
  std::vector<double> s_i;
  double s = 0.0;
};
SobolevOrders sobolev_orders(const RateReport& report, double r);

/// bound(m) = C1 exp(-rate1 |m|) + delta C2 exp(-rate2 |m|) with
/// rate1 = (chi - eps) r and rate2 = rho/2 - eps.
struct Envelope {
  double rate1 = 0.0;
  double rate2 = 0.0;
  unsigned delta = 0;
  double r = 0.0;
  double eps = 0.0;
  double operator()(double m, double c1 = 1.0, double c2 = 1.0) const;
};
/// Throws InputError unless r > 0 and 0 < eps < min{chi, rho/2}.
Envelope order2_envelope(const RateReport& report, double r, double eps);

struct HolderRate {
  double gamma = 0.0;
  double rho0 = 0.0;
  unsigned s0 = 0;
  /// Set when s lies outside 0 < s < 1, the range where the Holder bound applies.
  std::string warning;
};
HolderRate holder_rate(const RateReport& report, double s);

/// Time tuple z_1..z_n in Z^l.
struct TimeTuple {
  std::vector<IntVector> times;

  std::size_t size() const { return times.size(); }
  /// min over i != j of |z_i - z_j| (Euclidean)
  double gap() const;
  /// max over i, j of |z_i - z_j|
  double max_gap() const;
  /// the concatenated vector in Z^{n l}
  IntVector flat() const;
};

struct PairTheta {
  std::size_t i = 0, j = 0;
  double value = 0.0;  // min over nonzero chi of |chi((z_i - z_j)/|z_i - z_j|)|
  bool regular = true;  // no nonzero functional vanishes on z_i - z_j
};

struct ThetaReport {
  CertifiedReal theta;
  bool regular = true;
  std::vector<PairTheta> pairs;
};

/// Throws DegenerateError when two times coincide.
ThetaReport theta(const FunctionalSet& fs, const TimeTuple& tuple);

struct DensityOptions {
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 0x6E696C6D;
  /// Lattice points examined one by one for the T_{n,delta} count; the radius
  /// is reduced until the ball fits.
  std::uint64_t point_budget = 20000000;
};

struct DensityReport {
  unsigned n = 0;
  double radius = 0.0;
  std::uint64_t total = 0;        // lattice points in the ball of Z^{n l}
  std::uint64_t r_count = 0;      // points of R_n in the ball
  double r_fraction = 0.0;
  double eps = 0.0;
  double delta = 0.0;             // from the spherical Monte Carlo estimate
  double excluded_measure = 0.0;  // estimated measure of the delta-neighbourhood
  double t_radius = 0.0;
  std::uint64_t t_total = 0;
  std::uint64_t t_count = 0;
  double t_fraction = 0.0;
  /// Rational subspaces of R^{n l} whose unit spheres make up L(M).
  std::vector<exactlin::RationalSubspace> excluded;
};

DensityReport density_estimate(const FunctionalSet& fs, unsigned n, double radius, double eps,
                               const DensityOptions& options = {});

/// Integer kernel span of a Lyapunov functional, found among integer vectors
/// with entries bounded by `search`.
exactlin::RationalSubspace rational_kernel(const FunctionalSet& fs, std::size_t index, std::int64_t search = 8);

/// Number of points of Z^dim in the closed Euclidean ball of the given radius.
std::uint64_t ball_count(std::size_t dim, double radius);

}  // namespace nilmix::rates
