#pragma once

// Exact correlations of trigonometric polynomials under toral automorphisms
// and commuting Z^l actions, summed over frequency resonances.

#include "nilmix/exactlin.hpp"
#include "nilmix/fracsolve.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nilmix::correlate {

using exactlin::RationalMatrix;
using fracsolve::Complex;
using fracsolve::ExactObservable;
using fracsolve::FourierObservable;
using fracsolve::GaussianRational;

inline constexpr std::uint64_t kDefaultBudget = 10000000;

/// <f o M^m, g> = sum_k f(k) conj(g((M^T)^m k)). M must be an integer
/// unimodular matrix; negative m uses the inverse.
Complex correlation2(const FourierObservable& f, const FourierObservable& g, const RationalMatrix& m,
                     std::int64_t power);
GaussianRational correlation2(const ExactObservable& f, const ExactObservable& g, const RationalMatrix& m,
                              std::int64_t power);

/// int prod_i f_i(alpha(z_i) x) dx for the action alpha(z) = prod_j M_j^{z_j}
/// of commuting generators: the sum over resonant tuples with
/// sum_i alpha(z_i)^T k_i = 0 of prod_i f_i(k_i). Enumeration meets in the
/// middle; BudgetError when either half has more than `budget` tuples.
Complex correlation_n(const std::vector<FourierObservable>& f, const std::vector<RationalMatrix>& generators,
                      const std::vector<IntVector>& times, std::uint64_t budget = kDefaultBudget);
GaussianRational correlation_n(const std::vector<ExactObservable>& f, const std::vector<RationalMatrix>& generators,
                               const std::vector<IntVector>& times, std::uint64_t budget = kDefaultBudget);

/// m* such that correlation2(f, g, M, m) = 0 for every m > m*, for a 2x2
/// hyperbolic M and mean-zero f. Uses the expansion of the unstable
/// component of k under M^T against the support radius of g.
std::int64_t resonance_horizon(const FourierObservable& f, const FourierObservable& g, const RationalMatrix& m);

struct CorrelationEntry {
  std::vector<IntVector> times;
  Complex value;
  double gap = 0.0;
  double max_gap = 0.0;
};

enum class GapKind { min_gap, max_gap };

struct DecayFit {
  double rate = 0.0;       // envelope rate tested
  GapKind kind = GapKind::min_gap;
  double c = 0.0;          // fitted envelope constant
  bool envelope_ok = false;
  double slope = 0.0;      // least squares of log|value| against the gap
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t used = 0;    // entries above the floor
};

struct CorrelationSeries {
  std::vector<CorrelationEntry> entries;
  std::optional<DecayFit> fit;
  /// expected limit, for the counterexample series
  std::optional<Complex> limit;
  /// columns: t1_1..tn_l, gap, maxgap, re, im, abs
  std::string to_csv() const;
};

CorrelationEntry make_entry(std::vector<IntVector> times, Complex value);

/// Fits C as the largest |value| e^{rate gap} over the entries whose gap is at
/// most the median gap, then checks |value| <= C e^{-rate gap} on every entry.
/// The regression uses the entries with |value| > 1e-14; DegenerateError when
/// fewer than three remain.
DecayFit decay_fit(const CorrelationSeries& series, double rate, GapKind kind = GapKind::min_gap);

/// int (f1 o a^m)^2 (f2 o a^{2m})^n over the range of m. Requires f1 mean-zero
/// and c = int f2^n != 0 (PreconditionError otherwise); the limit is c int f1^2.
CorrelationSeries counterexample_maxgap(const ExactObservable& f1, const ExactObservable& f2, unsigned n,
                                        const RationalMatrix& m, std::int64_t m_first, std::int64_t m_last);

/// Product action on T^d x T^d by diag(M, I), diag(I, M) with A = alpha(1,2),
/// B = alpha(1,1), F = alpha(0,1). For f(x, y) = g(x) the correlation
/// int (f o A^m)(conj f o B^m) is |g|^2 for every m while the two times drift
/// apart linearly.
CorrelationSeries no_uniform_bound_demo(const RationalMatrix& m, const FourierObservable& g, std::int64_t m_first,
                                        std::int64_t m_last);

}  // namespace nilmix::correlate
