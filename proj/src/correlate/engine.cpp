#include "nilmix/correlate.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <map>

namespace nilmix::correlate {

namespace {

using BigVec = std::vector<Integer>;
using BigMat = std::vector<BigVec>;

struct ComplexAcc {
  CompensatedSum re, im;
  void add(const Complex& c) {
    re.add(c.real());
    im.add(c.imag());
  }
  Complex value() const { return {re.value(), im.value()}; }
};

struct ExactAcc {
  GaussianRational s;
  void add(const GaussianRational& c) { s = s + c; }
  GaussianRational value() const { return s; }
};

template <class Obs>
struct Traits;
template <>
struct Traits<FourierObservable> {
  using Value = Complex;
  using Acc = ComplexAcc;
  static Value conj(const Value& c) { return std::conj(c); }
  static Value one() { return 1.0; }
};
template <>
struct Traits<ExactObservable> {
  using Value = GaussianRational;
  using Acc = ExactAcc;
  static Value conj(const Value& c) { return c.conj(); }
  static Value one() { return GaussianRational(1); }
};

void check_unimodular(const RationalMatrix& m) {
  if (!m.is_square() || !m.is_unimodular_integer())
    throw PreconditionError("generator must be an integer unimodular matrix");
}

// (alpha(z))^T as a big integer matrix
BigMat transport(const std::vector<RationalMatrix>& gens, const IntVector& z) {
  const std::size_t n = gens.front().rows();
  RationalMatrix a = RationalMatrix::identity(n);
  for (std::size_t j = 0; j < gens.size(); ++j)
    if (z[j] != 0) a = a * gens[j].power(z[j]);
  BigMat t(n, BigVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) t[i][k] = numerator(a(k, i));
  return t;
}

BigVec apply(const BigMat& t, const IntVector& k) {
  BigVec out(t.size(), Integer(0));
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < k.size(); ++j)
      if (k[j] != 0) out[i] += t[i][j] * k[j];
  return out;
}

bool to_int(const BigVec& v, IntVector* out) {
  out->resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > std::numeric_limits<std::int64_t>::max() || v[i] < std::numeric_limits<std::int64_t>::min())
      return false;
    (*out)[i] = v[i].convert_to<std::int64_t>();
  }
  return true;
}

template <class Obs>
typename Traits<Obs>::Value corr2(const Obs& f, const Obs& g, const RationalMatrix& m, std::int64_t power) {
  check_unimodular(m);
  if (f.dim() != g.dim() || f.dim() != m.rows()) throw InputError("observable and matrix dimensions differ");
  const auto t = transport({m}, {power});
  typename Traits<Obs>::Acc acc;
  IntVector j;
  for (const auto& [k, c] : f.coeffs()) {
    if (!to_int(apply(t, k), &j)) continue;
    auto it = g.coeffs().find(j);
    if (it != g.coeffs().end()) acc.add(c * Traits<Obs>::conj(it->second));
  }
  return acc.value();
}

template <class Obs>
using PartialSums = std::map<BigVec, typename Traits<Obs>::Acc>;

// All partial sums sum_i T_i k_i over the factors in [lo, hi) with the
// product of their coefficients.
template <class Obs>
PartialSums<Obs> half_sums(const std::vector<Obs>& f, const std::vector<BigMat>& t, std::size_t lo, std::size_t hi,
                           std::uint64_t budget) {
  const std::size_t n = t.front().size();
  std::uint64_t count = 1;
  for (std::size_t i = lo; i < hi; ++i) {
    const std::uint64_t s = f[i].coeffs().size();
    if (s != 0 && count > budget / s) throw BudgetError("resonance enumeration exceeds the budget of " +
                                                        std::to_string(budget) + " partial sums");
    count *= s;
  }
  // transported supports
  std::vector<std::vector<std::pair<BigVec, typename Traits<Obs>::Value>>> moved(hi - lo);
  for (std::size_t i = lo; i < hi; ++i)
    for (const auto& [k, c] : f[i].coeffs()) moved[i - lo].emplace_back(apply(t[i], k), c);

  PartialSums<Obs> out;
  BigVec sum(n, Integer(0));
  std::function<void(std::size_t, const typename Traits<Obs>::Value&)> rec = [&](std::size_t p, const auto& prod) {
    if (p == moved.size()) {
      out[sum].add(prod);
      return;
    }
    for (const auto& [v, c] : moved[p]) {
      for (std::size_t a = 0; a < n; ++a) sum[a] += v[a];
      rec(p + 1, prod * c);
      for (std::size_t a = 0; a < n; ++a) sum[a] -= v[a];
    }
  };
  rec(0, Traits<Obs>::one());
  return out;
}

template <class Obs>
typename Traits<Obs>::Value corrn(const std::vector<Obs>& f, const std::vector<RationalMatrix>& gens,
                                  const std::vector<IntVector>& times, std::uint64_t budget) {
  if (f.empty()) throw InputError("correlation needs at least one observable");
  if (times.size() != f.size()) throw InputError("number of times differs from the number of observables");
  if (gens.empty()) throw InputError("correlation needs at least one generator");
  for (const auto& g : gens) {
    check_unimodular(g);
    if (g.rows() != gens.front().rows()) throw InputError("generators have different sizes");
  }
  for (std::size_t a = 0; a < gens.size(); ++a)
    for (std::size_t b = a + 1; b < gens.size(); ++b)
      if (!(gens[a] * gens[b] == gens[b] * gens[a])) throw PreconditionError("generators do not commute");
  for (const auto& x : f)
    if (x.dim() != gens.front().rows()) throw InputError("observable dimension differs from the generators");
  for (const auto& z : times)
    if (z.size() != gens.size()) throw InputError("time vector length differs from the number of generators");

  std::vector<BigMat> t;
  for (const auto& z : times) t.push_back(transport(gens, z));
  const std::size_t h = f.size() / 2;
  auto first = half_sums(f, t, 0, h, budget);
  auto second = half_sums(f, t, h, f.size(), budget);
  typename Traits<Obs>::Acc acc;
  for (const auto& [s, a] : first) {
    BigVec neg = s;
    for (auto& x : neg) x = -x;
    auto it = second.find(neg);
    if (it != second.end()) acc.add(a.value() * it->second.value());
  }
  return acc.value();
}

}  // namespace

Complex correlation2(const FourierObservable& f, const FourierObservable& g, const RationalMatrix& m,
                     std::int64_t power) {
  return corr2(f, g, m, power);
}

GaussianRational correlation2(const ExactObservable& f, const ExactObservable& g, const RationalMatrix& m,
                              std::int64_t power) {
  return corr2(f, g, m, power);
}

Complex correlation_n(const std::vector<FourierObservable>& f, const std::vector<RationalMatrix>& generators,
                      const std::vector<IntVector>& times, std::uint64_t budget) {
  return corrn(f, generators, times, budget);
}

GaussianRational correlation_n(const std::vector<ExactObservable>& f, const std::vector<RationalMatrix>& generators,
                               const std::vector<IntVector>& times, std::uint64_t budget) {
  return corrn(f, generators, times, budget);
}

std::int64_t resonance_horizon(const FourierObservable& f, const FourierObservable& g, const RationalMatrix& m) {
  check_unimodular(m);
  if (m.rows() != 2) throw PreconditionError("resonance horizon is implemented for 2x2 matrices");
  if (!f.mean_zero()) throw PreconditionError("resonance horizon needs a mean-zero observable");
  if (f.empty() || g.empty()) return 0;
  const auto d = m.transpose().to_double();
  Eigen::Matrix2d t;
  t << d[0][0], d[0][1], d[1][0], d[1][1];
  Eigen::EigenSolver<Eigen::Matrix2d> es(t);
  const auto ev = es.eigenvalues();
  if (std::abs(ev(0).imag()) > 0 || std::abs(std::abs(ev(0).real()) - 1.0) < 1e-12)
    throw PreconditionError("matrix is not hyperbolic");
  const int iu = std::abs(ev(0).real()) > std::abs(ev(1).real()) ? 0 : 1;
  const double lambda = std::abs(ev(iu).real());
  Eigen::Matrix2d basis = es.eigenvectors().real();
  basis.col(0).normalize();
  basis.col(1).normalize();
  const double sin_theta = std::abs(basis.determinant());
  const Eigen::Matrix2d inv = basis.inverse();
  double a_min = std::numeric_limits<double>::infinity();
  for (const auto& [k, c] : f.coeffs()) {
    const Eigen::Vector2d coords = inv * Eigen::Vector2d(static_cast<double>(k[0]), static_cast<double>(k[1]));
    a_min = std::min(a_min, std::abs(coords(iu)));
  }
  // |(M^T)^m k| >= lambda^m |a(k)| sin(theta) exceeds the support radius of g
  const double target = g.support_radius() * (1 + 1e-6) + 1e-9;
  std::int64_t mm = 0;
  while (std::pow(lambda, static_cast<double>(mm)) * a_min * sin_theta * (1 - 1e-9) <= target) ++mm;
  return mm - 1;
}

}  // namespace nilmix::correlate
