#include "nilmix/dioph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace nilmix::dioph {

namespace {

using LD = long double;

bool canonical(const IntVector& m) {
  for (auto x : m)
    if (x != 0) return x > 0;
  return false;
}

std::int64_t norm2(const IntVector& m) {
  std::int64_t s = 0;
  for (auto x : m) s += x * x;
  return s;
}

// Precise comparison of candidates: returns <0, 0, >0 like a three-way compare
// of the objective values, with 0 meaning "tied".
struct Evaluator {
  std::function<void(const IntVector&)> load;  // caches the precise value of m
  std::function<int(const IntVector&, const IntVector&)> compare;
};

struct ScanResult {
  IntVector argmin;
  std::uint64_t candidates = 0;
};

// |m|^d from the squared norm.
LD norm_power(std::int64_t n2, std::size_t d) {
  LD out = (d % 2) ? std::sqrt(static_cast<LD>(n2)) : 1.0L;
  for (std::size_t i = 0; i < d / 2; ++i) out *= static_cast<LD>(n2);
  return out;
}

// Pruned scan of the ball. The objective is bounded below by
// |m|^d |m . v_1|, so for every choice of the other coordinates only the few
// values of the coordinate m_j with the largest weight in v_1 that keep
// |m . v_1| small can compete. Approximate long double values select a
// candidate set that contains every minimizer; the evaluator then decides
// among the candidates.
ScanResult scan(const std::vector<std::vector<LD>>& v, std::size_t d, double radius, const Evaluator& ev) {
  const std::int64_t r2 = static_cast<std::int64_t>(std::floor(radius * radius + 1e-9));
  const std::vector<LD>& v0 = v[0];

  std::size_t j = 0;
  for (std::size_t k = 1; k < d; ++k)
    if (std::fabs(v0[k]) > std::fabs(v0[j])) j = k;
  const LD vj = v0[j];
  LD scale = 0;
  for (auto x : v0) scale = std::max(scale, std::fabs(x));

  ScanResult res;
  IntVector best;
  LD best_val = std::numeric_limits<LD>::infinity();
  std::vector<IntVector> pending;

  // objective and a bound on its rounding error
  auto approx = [&](const IntVector& m, std::int64_t n2, LD* err) {
    LD s = 0, mag = 0;
    for (const auto& vi : v) {
      LD dot = 0;
      for (std::size_t k = 0; k < d; ++k) {
        const LD t = static_cast<LD>(m[k]) * vi[k];
        dot += t;
        mag += std::fabs(t);
      }
      s += std::fabs(dot);
    }
    const LD w = norm_power(n2, d);
    *err = w * (mag + s) * 1e-15L;
    return w * s;
  };
  auto settle = [&] {
    for (const auto& m : pending) {
      ev.load(m);
      if (best.empty()) {
        best = m;
        continue;
      }
      int c = ev.compare(m, best);
      if (c < 0 || (c == 0 && m < best)) best = m;
    }
    pending.clear();
    LD err = 0;
    if (!best.empty()) best_val = std::min(best_val, approx(best, norm2(best), &err));
  };
  auto offer = [&](const IntVector& m, std::int64_t n2) {
    if (!canonical(m)) return;
    ++res.candidates;
    LD err = 0;
    LD f = approx(m, n2, &err);
    if (f - err > best_val * (1 + 1e-9L)) return;
    if (f < best_val) best_val = f;
    pending.push_back(m);
    if (pending.size() > 4096) settle();
  };

  // unit vectors give a finite starting bound
  for (std::size_t k = 0; k < d; ++k) {
    IntVector e(d, 0);
    e[k] = 1;
    offer(e, 1);
  }

  std::vector<std::size_t> others;
  for (std::size_t k = 0; k < d; ++k)
    if (k != j) others.push_back(k);
  IntVector m(d, 0);

  auto leaf = [&](std::int64_t used, LD rest) {
    if (used == 0) {
      // along the axis the objective grows like |m_j|^(d+1)
      m[j] = 1;
      offer(m, 1);
      m[j] = 0;
      return;
    }
    const LD bound = best_val * (1 + 1e-9L) / norm_power(used, d) + 1e-15L * (std::fabs(rest) + scale);
    const LD center = -rest / vj;
    const LD half = bound / std::fabs(vj);
    const LD lo = std::ceil(center - half), hi = std::floor(center + half);
    if (lo > hi) return;
    for (std::int64_t x = static_cast<std::int64_t>(lo); x <= static_cast<std::int64_t>(hi); ++x) {
      const std::int64_t n2 = used + x * x;
      if (n2 > r2) continue;
      m[j] = x;
      offer(m, n2);
    }
    m[j] = 0;
  };

  const std::size_t depth = others.size();
  std::function<void(std::size_t, std::int64_t, LD)> rec = [&](std::size_t p, std::int64_t used, LD rest) {
    if (p == depth) {
      leaf(used, rest);
      return;
    }
    const std::size_t k = others[p];
    const std::int64_t lim = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(r2 - used))));
    const LD vk = v0[k];
    if (p + 1 == depth) {
      for (std::int64_t x = -lim; x <= lim; ++x) {
        const std::int64_t u = used + x * x;
        if (u > r2) continue;
        m[k] = x;
        leaf(u, rest + static_cast<LD>(x) * vk);
      }
    } else {
      for (std::int64_t x = -lim; x <= lim; ++x) {
        const std::int64_t u = used + x * x;
        if (u > r2) continue;
        m[k] = x;
        rec(p + 1, u, rest + static_cast<LD>(x) * vk);
      }
    }
    m[k] = 0;
  };
  rec(0, 0, 0.0L);
  settle();
  res.argmin = best;
  return res;
}

void check_inputs(std::size_t count, std::size_t dim_e, double radius, const std::vector<std::size_t>& lengths) {
  if (count == 0) throw InputError("Diophantine certificate needs at least one direction");
  if (dim_e == 0) throw InputError("ambient lattice dimension must be positive");
  if (!(radius >= 1.0)) throw InputError("scan radius must be at least 1");
  for (auto l : lengths)
    if (l != dim_e) throw InputError("direction length differs from the ambient lattice dimension");
}

}  // namespace

DiophantineCertificate diophantine_certificate(const std::vector<RealVector>& v, std::size_t dim_e, double radius) {
  std::vector<std::size_t> lengths;
  for (const auto& x : v) lengths.push_back(x.size());
  check_inputs(v.size(), dim_e, radius, lengths);
  PrecisionScope scope(256);
  std::vector<std::vector<LD>> vl;
  std::vector<RealVector> vp;
  for (const auto& x : v) {
    bool nonzero = false;
    std::vector<LD> row;
    RealVector rp;
    for (const auto& c : x) {
      row.push_back(c.convert_to<LD>());
      rp.emplace_back(c);
      nonzero = nonzero || c != 0;
    }
    if (!nonzero) throw InputError("Diophantine directions must be nonzero");
    vl.push_back(std::move(row));
    vp.push_back(std::move(rp));
  }
  std::map<IntVector, Real> cache;
  auto value = [&](const IntVector& m) -> const Real& {
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    Real s = 0;
    for (const auto& vi : vp) {
      Real dot = 0;
      for (std::size_t k = 0; k < dim_e; ++k) dot += vi[k] * m[k];
      s += abs(dot);
    }
    Real f = pow(Real(norm2(m)), Real(dim_e) / 2) * s;
    return cache.emplace(m, f).first->second;
  };
  Evaluator ev;
  ev.load = [&](const IntVector& m) { value(m); };
  ev.compare = [&](const IntVector& a, const IntVector& b) {
    const Real& x = value(a);
    const Real& y = value(b);
    Real tol = ldexp(Real(1), -200) * (abs(x) + abs(y));
    if (abs(x - y) <= tol) return 0;
    return x < y ? -1 : 1;
  };
  auto res = scan(vl, dim_e, radius, ev);

  DiophantineCertificate c;
  c.basis = v;
  c.ambient_dim = dim_e;
  c.radius = radius;
  c.argmin = res.argmin;
  c.candidates = res.candidates;
  const Real& best = value(res.argmin);
  double approx = best.convert_to<double>();
  if (Real(approx) > best) approx = std::nextafter(approx, 0.0);
  // allow for the rounding of the 256-bit evaluation itself
  c.c_emp = approx <= 0.0 ? 0.0 : std::nextafter(approx * (1 - 0x1p-60), 0.0);
  if (best == 0) c.c_emp = 0.0;
  c.pass = c.c_emp > 0.0;
  return c;
}

DiophantineCertificate diophantine_certificate(const std::vector<RationalVector>& v, std::size_t dim_e,
                                               double radius) {
  std::vector<std::size_t> lengths;
  for (const auto& x : v) lengths.push_back(x.size());
  check_inputs(v.size(), dim_e, radius, lengths);
  std::vector<std::vector<LD>> vl;
  for (const auto& x : v) {
    bool nonzero = false;
    std::vector<LD> row;
    for (const auto& c : x) {
      row.push_back(c.convert_to<LD>());
      nonzero = nonzero || c != 0;
    }
    if (!nonzero) throw InputError("Diophantine directions must be nonzero");
    vl.push_back(std::move(row));
  }
  // the squared objective (|m|^2)^dimE * S^2 is rational
  std::map<IntVector, Rational> cache;
  auto value = [&](const IntVector& m) -> const Rational& {
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    Rational s = 0;
    for (const auto& vi : v) {
      Rational dot = 0;
      for (std::size_t k = 0; k < dim_e; ++k) dot += vi[k] * m[k];
      s += abs(dot);
    }
    Rational f = s * s;
    const Rational n2(norm2(m));
    for (std::size_t k = 0; k < dim_e; ++k) f *= n2;
    return cache.emplace(m, f).first->second;
  };
  Evaluator ev;
  ev.load = [&](const IntVector& m) { value(m); };
  ev.compare = [&](const IntVector& a, const IntVector& b) {
    const Rational& x = value(a);
    const Rational& y = value(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  };
  auto res = scan(vl, dim_e, radius, ev);

  DiophantineCertificate c;
  {
    PrecisionScope scope(256);
    for (const auto& x : v) {
      RealVector r;
      for (const auto& q : x) r.emplace_back(Real(numerator(q)) / Real(denominator(q)));
      c.basis.push_back(std::move(r));
    }
    const Rational& sq = value(res.argmin);
    Real root = sqrt(Real(numerator(sq)) / Real(denominator(sq)));
    double approx = root.convert_to<double>();
    if (Real(approx) > root) approx = std::nextafter(approx, 0.0);
    c.c_emp = sq == 0 ? 0.0 : approx;
  }
  c.ambient_dim = dim_e;
  c.radius = radius;
  c.argmin = res.argmin;
  c.candidates = res.candidates;
  c.exact = true;
  c.pass = c.c_emp > 0.0;
  return c;
}

}  // namespace nilmix::dioph
