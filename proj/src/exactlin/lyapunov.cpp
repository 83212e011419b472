#include "complex_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nilmix::exactlin {

using namespace detail;

namespace {

using RealMatrix = std::vector<std::vector<Real>>;

CertifiedReal certify(const Real& mid, const Real& radius) {
  CertifiedReal c;
  c.value = mid.convert_to<double>();
  c.radius = radius.convert_to<double>() + std::abs(c.value) * 0x1p-51 + 0x1p-1000;
  return c;
}

CertifiedReal exact_zero() {
  CertifiedReal c;
  c.exact = true;
  return c;
}

bool overlaps(const CertifiedReal& a, const CertifiedReal& b) { return a.lo() <= b.hi() && b.lo() <= a.hi(); }

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Indices j whose inclusion disk meets the disk (c, r).
std::vector<std::size_t> hits(const std::vector<IsolatedRoot>& roots, const ComplexReal& c, const Real& r) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < roots.size(); ++j)
    if (cabs(csub(c, roots[j].value)) <= r + roots[j].radius) out.push_back(j);
  return out;
}

RealMatrix to_real_matrix(const RationalMatrix& m) { return m.to_real(); }

RealMatrix mat_mul(const RealMatrix& a, const RealMatrix& b) {
  const std::size_t n = a.size(), k = b.size(), p = b.front().size();
  RealMatrix c(n, std::vector<Real>(p, Real(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t j = 0; j < p; ++j) c[i][j] += a[i][l] * b[l][j];
  return c;
}

// h(M) for a real polynomial h given by ascending coefficients.
RealMatrix poly_at(const std::vector<Real>& h, const RealMatrix& m) {
  const std::size_t n = m.size();
  RealMatrix acc(n, std::vector<Real>(n, Real(0)));
  for (auto it = h.rbegin(); it != h.rend(); ++it) {
    acc = mat_mul(acc, m);
    for (std::size_t i = 0; i < n; ++i) acc[i][i] += *it;
  }
  return acc;
}

RealVector normalize_max(RealVector v) {
  Real best = 0;
  for (const auto& x : v)
    if (abs(x) > abs(best)) best = x;
  if (best != 0)
    for (auto& x : v) x /= best;
  return v;
}

// Kernel of a matrix whose nullity is known, by Gaussian elimination with full pivoting.
std::vector<RealVector> numeric_kernel(RealMatrix a, std::size_t nullity, unsigned bits) {
  const std::size_t n = a.size();
  const std::size_t rank = n - nullity;
  std::vector<std::size_t> colperm(n);
  std::iota(colperm.begin(), colperm.end(), 0);
  Real scale = 0;
  for (const auto& row : a)
    for (const auto& x : row) scale = std::max<Real>(scale, abs(x));
  if (scale == 0) scale = 1;
  for (std::size_t s = 0; s < rank; ++s) {
    std::size_t pr = s, pc = s;
    Real best = -1;
    for (std::size_t i = s; i < n; ++i)
      for (std::size_t j = s; j < n; ++j)
        if (abs(a[i][colperm[j]]) > best) {
          best = abs(a[i][colperm[j]]);
          pr = i;
          pc = j;
        }
    if (best <= scale * ldexp(Real(1), -static_cast<int>(bits) / 2))
      throw PrecisionError("numerical kernel rank collapsed", bits);
    std::swap(a[s], a[pr]);
    std::swap(colperm[s], colperm[pc]);
    const Real& piv = a[s][colperm[s]];
    for (std::size_t i = s + 1; i < n; ++i) {
      Real f = a[i][colperm[s]] / piv;
      if (f == 0) continue;
      for (std::size_t j = s; j < n; ++j) a[i][colperm[j]] -= f * a[s][colperm[j]];
    }
  }
  std::vector<RealVector> basis;
  for (std::size_t f = rank; f < n; ++f) {
    RealVector x(n, Real(0));
    x[colperm[f]] = 1;
    for (std::size_t s = rank; s-- > 0;) {
      Real acc = a[s][colperm[f]];
      for (std::size_t j = s + 1; j < rank; ++j) acc += a[s][colperm[j]] * x[colperm[j]];
      x[colperm[s]] = -acc / a[s][colperm[s]];
    }
    basis.push_back(normalize_max(std::move(x)));
  }
  return basis;
}

struct RootClass {
  std::vector<std::size_t> members;
  CertifiedReal exponent;
};

// Groups the roots of one irreducible factor by certified modulus.
std::vector<RootClass> classify_roots(const Polynomial& q, const std::vector<IsolatedRoot>& roots,
                                      unsigned bits) {
  const std::size_t n = roots.size();
  UnionFind uf(n);
  std::vector<bool> unit(n, false);
  const bool palindromic = q == q.reciprocal() || q == Polynomial::constant(-1) * q.reciprocal();
  unsigned rot = 0;
  for (std::size_t k = 1; k < q.coeffs().size(); ++k)
    if (q.coeff(k) != 0) rot = std::gcd(rot, static_cast<unsigned>(k));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& zi = roots[i].value;
    const Real& ri = roots[i].radius;
    // complex conjugation permutes the roots
    auto c = hits(roots, cconj(zi), ri);
    if (c.size() == 1) uf.unite(i, c[0]);
    Real m = cabs(zi);
    if (palindromic && m > ri) {
      // z -> 1/conj(z) permutes the roots; a fixed point lies on the unit circle
      ComplexReal center{zi.re / (m * m), zi.im / (m * m)};
      Real rad = ri / (m * (m - ri));
      auto h = hits(roots, center, rad);
      if (h.size() == 1 && h[0] == i) unit[i] = true;
    }
    if (rot > 1) {
      // q(x) = g(x^rot): rotation by a rot-th root of unity permutes the roots
      Real theta = 2 * acos(Real(-1)) / rot;
      ComplexReal w{cos(theta), sin(theta)};
      auto h = hits(roots, cmul(zi, w), ri * (1 + ldexp(Real(1), -static_cast<int>(bits) / 2)));
      if (h.size() == 1) uf.unite(i, h[0]);
    }
  }
  std::vector<RootClass> classes;
  std::vector<long> class_of(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = uf.find(i);
    if (class_of[r] < 0) {
      class_of[r] = static_cast<long>(classes.size());
      classes.emplace_back();
    }
    classes[class_of[r]].members.push_back(i);
  }
  for (auto& cls : classes) {
    bool on_unit = false;
    std::size_t best = cls.members.front();
    for (auto i : cls.members) {
      on_unit = on_unit || unit[i];
      if (roots[i].radius < roots[best].radius) best = i;
    }
    if (on_unit) {
      cls.exponent = exact_zero();
      continue;
    }
    Real m = cabs(roots[best].value);
    Real r = roots[best].radius;
    if (m <= r) throw PrecisionError("root modulus not separated from zero", bits);
    cls.exponent = certify(log(m), r / (m - r));
    if (cls.exponent.lo() <= 0.0 && cls.exponent.hi() >= 0.0)
      throw PrecisionError("Lyapunov exponent sign not certified for " + q.to_string(), bits);
  }
  for (std::size_t a = 0; a < classes.size(); ++a)
    for (std::size_t b = 0; b < a; ++b) {
      const auto& ea = classes[a].exponent;
      const auto& eb = classes[b].exponent;
      if (ea.exact && eb.exact) throw Error("distinct root classes both on the unit circle");
      if (overlaps(ea, eb))
        throw PrecisionError("overlapping but unidentified root moduli for " + q.to_string(), bits);
    }
  std::sort(classes.begin(), classes.end(),
            [](const RootClass& a, const RootClass& b) { return a.exponent.value < b.exponent.value; });
  return classes;
}

LyapunovSplitting compute(const RationalMatrix& m, unsigned bits) {
  PrecisionScope scope(bits);
  LyapunovSplitting out;
  out.precision_bits = bits;
  out.primary = primary_decomposition(m);
  const std::size_t n = m.rows();
  RealMatrix mreal = to_real_matrix(m);

  for (std::size_t bi = 0; bi < out.primary.blocks.size(); ++bi) {
    const auto& block = out.primary.blocks[bi];
    auto exact_basis = [&] {
      std::vector<RealVector> basis;
      for (const auto& v : block.basis) {
        RealVector r(n);
        for (std::size_t k = 0; k < n; ++k) r[k] = to_real(v[k]);
        basis.push_back(normalize_max(std::move(r)));
      }
      return basis;
    };
    auto push_whole = [&](CertifiedReal e) {
      LyapunovSubspace s;
      s.primary_index = bi;
      s.exponent = e;
      s.dim = block.basis.size();
      s.basis = exact_basis();
      s.exact_basis = true;
      out.subspaces.push_back(std::move(s));
    };
    if (block.cyclotomic_order) {
      push_whole(exact_zero());
      continue;
    }
    if (block.factor.degree() == 1) {
      Rational root = -block.factor.coeff(0) / block.factor.coeff(1);
      if (root == 0) throw PreconditionError("matrix is singular");
      Real mod = abs(to_real(root));
      push_whole(certify(log(mod), abs(log(mod)) * ldexp(Real(1), -static_cast<int>(bits) + 4)));
      continue;
    }
    auto roots = isolate_roots(block.factor, bits);
    auto classes = classify_roots(block.factor, roots, bits);
    if (classes.size() == 1) {
      push_whole(classes.front().exponent);
      continue;
    }
    for (const auto& cls : classes) {
      // real polynomial prod (x - z) over the class, raised to the multiplicity
      std::vector<ComplexReal> h{{Real(1), Real(0)}};
      for (auto idx : cls.members) {
        const auto& z = roots[idx].value;
        std::vector<ComplexReal> next(h.size() + 1, ComplexReal{Real(0), Real(0)});
        for (std::size_t k = 0; k < h.size(); ++k) {
          next[k + 1] = cadd(next[k + 1], h[k]);
          next[k] = csub(next[k], cmul(h[k], z));
        }
        h = std::move(next);
      }
      std::vector<Real> hr;
      for (const auto& c : h) hr.push_back(c.re);
      RealMatrix hm = poly_at(hr, mreal);
      RealMatrix hp = hm;
      for (unsigned e = 1; e < block.multiplicity; ++e) hp = mat_mul(hp, hm);
      LyapunovSubspace s;
      s.primary_index = bi;
      s.exponent = cls.exponent;
      s.dim = cls.members.size() * block.multiplicity;
      s.basis = numeric_kernel(std::move(hp), s.dim, bits);
      out.subspaces.push_back(std::move(s));
    }
  }

  for (auto& s : out.subspaces) {
    s.residual = invariance_residual(m, s.basis);
    out.max_residual = std::max(out.max_residual, s.residual);
    if (s.residual > 1e-9) throw PrecisionError("Lyapunov subspace invariance residual too large", bits);
  }

  // Merge subspaces across primary blocks when their exponents are certified equal.
  const auto& blocks = out.primary.blocks;
  auto mirrored = [&](std::size_t a, std::size_t b) {
    return blocks[a].factor.reflect().primitive() == blocks[b].factor;
  };
  std::vector<std::size_t> order(out.subspaces.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out.subspaces[a].exponent.value < out.subspaces[b].exponent.value;
  });
  for (std::size_t idx : order) {
    const auto& s = out.subspaces[idx];
    bool merged = false;
    for (auto& blk : out.blocks) {
      const auto& t = out.subspaces[blk.members.front()];
      const bool equal = (s.exponent.exact && t.exponent.exact && s.exponent.value == t.exponent.value) ||
                         (overlaps(s.exponent, t.exponent) && mirrored(s.primary_index, t.primary_index));
      if (equal) {
        blk.members.push_back(idx);
        blk.multiplicity += s.dim;
        if (s.exponent.radius < blk.exponent.radius && !blk.exponent.exact) blk.exponent = s.exponent;
        merged = true;
        break;
      }
      if (overlaps(s.exponent, t.exponent))
        throw PrecisionError("Lyapunov exponents of distinct blocks not separated", bits);
    }
    if (!merged) out.blocks.push_back({s.exponent, s.dim, {idx}});
  }

  Real sum = 0;
  double rad = 0;
  bool all_exact = true;
  for (const auto& s : out.subspaces) {
    sum += Real(s.exponent.value) * static_cast<long>(s.dim);
    rad += s.exponent.radius * static_cast<double>(s.dim);
    all_exact = all_exact && s.exponent.exact;
  }
  out.exponent_sum = certify(sum, Real(rad));
  out.exponent_sum.exact = all_exact;
  if (all_exact) out.exponent_sum.radius = 0.0;
  return out;
}

}  // namespace

double invariance_residual(const RationalMatrix& m, const std::vector<RealVector>& basis) {
  if (basis.empty()) return 0.0;
  const std::size_t n = m.rows();
  RealMatrix mr = m.to_real();
  // orthonormalize (Gram-Schmidt, two passes)
  std::vector<RealVector> q;
  for (const auto& b : basis) {
    RealVector v = b;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : q) {
        Real d = 0;
        for (std::size_t k = 0; k < n; ++k) d += u[k] * v[k];
        for (std::size_t k = 0; k < n; ++k) v[k] -= d * u[k];
      }
    Real nv = 0;
    for (const auto& x : v) nv += x * x;
    nv = sqrt(nv);
    if (nv == 0) throw Error("dependent basis in residual check");
    for (auto& x : v) x /= nv;
    q.push_back(std::move(v));
  }
  double worst = 0.0;
  for (const auto& b : basis) {
    RealVector w(n, Real(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) w[i] += mr[i][k] * b[k];
    RealVector r = w;
    for (const auto& u : q) {
      Real d = 0;
      for (std::size_t k = 0; k < n; ++k) d += u[k] * w[k];
      for (std::size_t k = 0; k < n; ++k) r[k] -= d * u[k];
    }
    Real nr = 0, nb = 0;
    for (std::size_t k = 0; k < n; ++k) {
      nr += r[k] * r[k];
      nb += b[k] * b[k];
    }
    worst = std::max(worst, Real(sqrt(nr / nb)).convert_to<double>());
  }
  return worst;
}

LyapunovSplitting lyapunov_data(const RationalMatrix& m, unsigned bits, unsigned max_bits) {
  if (!m.is_square()) throw InputError("Lyapunov data of non-square matrix");
  if (m.determinant() == 0) throw PreconditionError("Lyapunov data needs an invertible matrix");
  for (;;) {
    try {
      return compute(m, bits);
    } catch (const PrecisionError&) {
      if (bits * 2 > max_bits) throw;
      bits *= 2;
    }
  }
}

namespace {
std::vector<RealVector> gather(const LyapunovSplitting& s, auto pred) {
  std::vector<RealVector> out;
  for (const auto& sub : s.subspaces)
    if (pred(sub)) out.insert(out.end(), sub.basis.begin(), sub.basis.end());
  return out;
}
}  // namespace

std::vector<RealVector> LyapunovSplitting::w_plus() const {
  return gather(*this, [](const LyapunovSubspace& s) { return s.exponent.certified_positive(); });
}
std::vector<RealVector> LyapunovSplitting::w_zero() const {
  return gather(*this, [](const LyapunovSubspace& s) { return s.exponent.certified_zero(); });
}
std::vector<RealVector> LyapunovSplitting::w_minus() const {
  return gather(*this, [](const LyapunovSubspace& s) { return s.exponent.certified_negative(); });
}

std::vector<std::vector<std::size_t>> LyapunovSplitting::by_primary() const {
  std::vector<std::vector<std::size_t>> out(primary.blocks.size());
  for (std::size_t i = 0; i < subspaces.size(); ++i) out[subspaces[i].primary_index].push_back(i);
  for (auto& v : out)
    std::sort(v.begin(), v.end(), [&](std::size_t a, std::size_t b) {
      return subspaces[a].exponent.value < subspaces[b].exponent.value;
    });
  return out;
}

std::vector<RealVector> LyapunovSplitting::block_max() const {
  std::vector<RealVector> out;
  for (const auto& idx : by_primary()) {
    const auto& b = subspaces[idx.back()].basis;
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

std::vector<RealVector> LyapunovSplitting::block_min() const {
  std::vector<RealVector> out;
  for (const auto& idx : by_primary()) {
    const auto& b = subspaces[idx.front()].basis;
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

}  // namespace nilmix::exactlin
