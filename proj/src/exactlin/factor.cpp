#include "complex_ops.hpp"

#include <algorithm>
#include <numeric>

namespace nilmix::exactlin {

using namespace detail;

namespace {

unsigned coefficient_bits(const Polynomial& p) {
  unsigned bits = 1;
  for (const auto& c : p.coeffs()) {
    Integer a = abs(numerator(c));
    if (a != 0) bits = std::max<unsigned>(bits, static_cast<unsigned>(msb(a)) + 1);
  }
  return bits;
}

// Product of (x - r) over the chosen roots; returns the integer polynomial when
// every coefficient rounds cleanly, otherwise nullopt.
std::optional<Polynomial> rounded_product(const std::vector<IsolatedRoot>& roots,
                                          const std::vector<std::size_t>& pick) {
  std::vector<ComplexReal> c{{Real(1), Real(0)}};
  for (std::size_t idx : pick) {
    const ComplexReal& r = roots[idx].value;
    std::vector<ComplexReal> next(c.size() + 1, ComplexReal{Real(0), Real(0)});
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] = cadd(next[k + 1], c[k]);
      next[k] = csub(next[k], cmul(c[k], r));
    }
    c = std::move(next);
  }
  RationalVector coeffs;
  for (const auto& z : c) {
    Real scale = 1 + abs(z.re);
    if (abs(z.im) > scale * Real(1e-12)) return std::nullopt;
    Real nearest = round(z.re);
    if (abs(z.re - nearest) > scale * Real(1e-12)) return std::nullopt;
    coeffs.emplace_back(Integer(nearest.convert_to<Integer>()));
  }
  return Polynomial(std::move(coeffs));
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Irreducible factors of a monic square-free integer polynomial, found by
// grouping numerically computed roots and confirming each factor by exact division.
std::vector<Polynomial> factor_monic_squarefree(const Polynomial& q) {
  if (q.degree() <= 1) return {q};
  unsigned bits = 128 + 8 * static_cast<unsigned>(q.degree()) + 2 * coefficient_bits(q);
  std::vector<IsolatedRoot> roots;
  for (;; bits *= 2) {
    try {
      roots = isolate_roots(q, bits);
      break;
    } catch (const PrecisionError&) {
      if (bits > 8192) throw;
    }
  }
  PrecisionScope scope(bits);
  std::vector<Polynomial> factors;
  Polynomial current = q;
  std::vector<std::size_t> alive(roots.size());
  std::iota(alive.begin(), alive.end(), 0);
  std::size_t k = 1;
  while (2 * k <= alive.size()) {
    bool found = false;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    do {
      std::vector<std::size_t> pick;
      for (auto i : idx) pick.push_back(alive[i]);
      auto cand = rounded_product(roots, pick);
      if (!cand) continue;
      auto [quot, rem] = current.divmod(*cand);
      if (!rem.is_zero()) continue;
      factors.push_back(*cand);
      current = quot;
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < alive.size(); ++i)
        if (std::find(idx.begin(), idx.end(), i) == idx.end()) rest.push_back(alive[i]);
      alive = std::move(rest);
      found = true;
      break;
    } while (next_combination(idx, alive.size()));
    if (!found) ++k;
  }
  if (current.degree() > 0) factors.push_back(current);
  return factors;
}

}  // namespace

std::vector<FactorPower> factor_over_q(const Polynomial& p) {
  if (p.is_zero()) throw InputError("cannot factor the zero polynomial");
  std::vector<FactorPower> out;
  auto parts = squarefree_decomposition(p);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Polynomial& s = parts[i];
    if (s.degree() < 1) continue;
    Polynomial prim = s.primitive();
    const Integer a = numerator(prim.leading());
    const int n = prim.degree();
    // Q(y) = a^(n-1) P(y/a) is monic with integer coefficients.
    RationalVector qc(n + 1);
    for (int k = 0; k <= n; ++k) {
      Integer scale = 1;
      for (int e = 0; e < n - 1 - k; ++e) scale *= a;
      qc[k] = k == n ? Rational(1) : Rational(numerator(prim.coeff(k)) * scale);
    }
    for (const auto& g : factor_monic_squarefree(Polynomial(qc))) {
      // back-substitute y = a x
      RationalVector gc(g.coeffs().size());
      Integer ak = 1;
      for (std::size_t k = 0; k < gc.size(); ++k) {
        gc[k] = g.coeff(k) * Rational(ak);
        ak *= a;
      }
      out.push_back({Polynomial(std::move(gc)).primitive(), static_cast<unsigned>(i + 1)});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const FactorPower& x, const FactorPower& y) { return canonical_less(x.factor, y.factor); });
  return out;
}

bool is_irreducible(const Polynomial& p) {
  if (p.degree() < 1) return false;
  auto f = factor_over_q(p);
  return f.size() == 1 && f[0].multiplicity == 1 && f[0].factor.degree() == p.degree();
}

PrimaryDecomposition primary_decomposition(const RationalMatrix& m) {
  if (!m.is_square()) throw InputError("primary decomposition of non-square matrix");
  PrimaryDecomposition pd;
  pd.char_poly = char_poly(m);
  for (auto& [q, c] : factor_over_q(pd.char_poly)) {
    PrimaryBlock block;
    block.factor = q;
    block.multiplicity = c;
    block.basis = pow(q, c).evaluate(m).kernel();
    if (block.basis.size() != static_cast<std::size_t>(q.degree()) * c)
      throw Error("primary block dimension mismatch for " + q.to_string());
    // a primitive factor that is not monic has non-integral roots
    if (q.is_monic()) block.cyclotomic_order = is_cyclotomic(q);
    pd.blocks.push_back(std::move(block));
  }
  return pd;
}

}  // namespace nilmix::exactlin
