#include "nilmix/rates.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

namespace nilmix::rates {

namespace {

using exactlin::RationalSubspace;

std::int64_t isqrt(std::int64_t n) {
  if (n < 0) return -1;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::int64_t squared_radius(double radius) { return static_cast<std::int64_t>(std::floor(radius * radius + 1e-9)); }

struct BallCounter {
  std::vector<std::vector<std::int64_t>> memo;
  std::int64_t count(std::size_t dim, std::int64_t r2) {
    if (r2 < 0) return 0;
    if (dim == 0) return 1;
    if (dim == 1) return 2 * isqrt(r2) + 1;
    auto& table = memo[dim];
    if (table.size() <= static_cast<std::size_t>(r2)) table.resize(r2 + 1, -1);
    if (table[r2] >= 0) return table[r2];
    std::int64_t total = 0;
    const std::int64_t lim = isqrt(r2);
    for (std::int64_t x = -lim; x <= lim; ++x) total += count(dim - 1, r2 - x * x);
    return table[r2] = total;
  }
};

// Integer constraint rows whose common kernel is the subspace.
std::vector<IntVector> constraints(const RationalSubspace& s) {
  std::vector<IntVector> out;
  for (const auto& row : s.orthogonal_complement().integer_basis()) {
    IntVector r;
    for (const auto& x : row) r.push_back(numerator(x).convert_to<std::int64_t>());
    out.push_back(std::move(r));
  }
  return out;
}

bool satisfies(const std::vector<IntVector>& rows, const IntVector& z) {
  for (const auto& r : rows) {
    std::int64_t s = 0;
    for (std::size_t k = 0; k < z.size(); ++k) s += r[k] * z[k];
    if (s != 0) return false;
  }
  return true;
}

// Calls f(z) for every nonzero lattice point z of S with |z|^2 <= r2
// (Fincke-Pohst enumeration over the coefficients of a lattice basis).
void enumerate_subspace(const RationalSubspace& s, std::int64_t r2, const std::function<void(const IntVector&)>& f) {
  auto basis = s.lattice_basis();
  const std::size_t k = basis.size();
  const std::size_t n = s.ambient();
  if (k == 0) return;
  std::vector<IntVector> b(k, IntVector(n));
  Eigen::MatrixXd gram(k, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t t = 0; t < n; ++t) b[a][t] = numerator(basis[a][t]).convert_to<std::int64_t>();
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t c = 0; c < k; ++c) {
      double g = 0;
      for (std::size_t t = 0; t < n; ++t) g += static_cast<double>(b[a][t] * b[c][t]);
      gram(a, c) = g;
    }
  // c^T G c = sum_i d_i (c_i + sum_{j>i} mu_ij c_j)^2 with G = U^T D U, U unit upper triangular
  Eigen::MatrixXd u = gram.llt().matrixU();
  std::vector<double> d(k);
  Eigen::MatrixXd mu(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    d[i] = u(i, i) * u(i, i);
    for (std::size_t j = 0; j < k; ++j) mu(i, j) = u(i, j) / u(i, i);
  }
  const double bound = static_cast<double>(r2) * (1 + 1e-9) + 1e-9;
  IntVector c(k, 0), z(n, 0);
  std::function<void(std::size_t, double)> rec = [&](std::size_t level, double remaining) {
    const std::size_t i = level;
    double center = 0;
    for (std::size_t j = i + 1; j < k; ++j) center -= mu(i, j) * static_cast<double>(c[j]);
    const double half = std::sqrt(std::max(0.0, remaining / d[i]));
    const auto lo = static_cast<std::int64_t>(std::ceil(center - half - 1e-9));
    const auto hi = static_cast<std::int64_t>(std::floor(center + half + 1e-9));
    for (std::int64_t x = lo; x <= hi; ++x) {
      c[i] = x;
      const double t = static_cast<double>(x) - center;
      const double rest = remaining - d[i] * t * t;
      if (rest < -1e-6 * bound) continue;
      if (i == 0) {
        std::int64_t n2 = 0;
        bool zero = true;
        for (std::size_t p = 0; p < n; ++p) {
          std::int64_t v = 0;
          for (std::size_t a = 0; a < k; ++a) v += c[a] * b[a][p];
          z[p] = v;
          n2 += v * v;
          zero = zero && v == 0;
        }
        if (!zero && n2 <= r2) f(z);
      } else {
        rec(i - 1, rest);
      }
    }
    c[i] = 0;
  };
  rec(k - 1, bound);
}

// Orthonormal basis (double) of a rational subspace.
Eigen::MatrixXd orthonormal(const RationalSubspace& s) {
  const std::size_t n = s.ambient();
  Eigen::MatrixXd m(n, s.dim());
  for (std::size_t a = 0; a < s.dim(); ++a)
    for (std::size_t t = 0; t < n; ++t) m(t, a) = s.basis()[a][t].convert_to<double>();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, s.dim());
}

}  // namespace

std::uint64_t ball_count(std::size_t dim, double radius) {
  BallCounter bc;
  bc.memo.resize(dim + 1);
  return static_cast<std::uint64_t>(bc.count(dim, squared_radius(radius)));
}

RationalSubspace rational_kernel(const FunctionalSet& fs, std::size_t index, std::int64_t search) {
  const std::size_t l = fs.generators.size();
  const auto& f = fs.functionals.at(index);
  if (f.zero) return RationalSubspace::whole(l);
  std::vector<RationalVector> found;
  if (l == 1) return RationalSubspace(l);
  IntVector d(l, -search);
  for (;;) {
    std::int64_t g = 0;
    for (auto x : d) g = std::gcd(g, x);
    bool canon = false;
    for (auto x : d)
      if (x != 0) {
        canon = x > 0;
        break;
      }
    if (g == 1 && canon) {
      auto v = f.evaluate(d);
      if (v.lo() <= 0.0 && v.hi() >= 0.0 && fs.sign(index, d) == 0) {
        RationalVector r;
        for (auto x : d) r.emplace_back(x);
        found.push_back(std::move(r));
      }
    }
    std::size_t i = l;
    while (i > 0 && d[i - 1] == search) d[--i] = -search;
    if (i == 0) break;
    ++d[i - 1];
  }
  return RationalSubspace::span(found, l);
}

DensityReport density_estimate(const FunctionalSet& fs, unsigned n, double radius, double eps,
                               const DensityOptions& options) {
  if (n < 2) throw InputError("density needs n >= 2");
  if (!(radius >= 1)) throw InputError("density radius must be at least 1");
  if (!(eps > 0)) throw InputError("eps must be positive");
  const std::size_t l = fs.generators.size();
  const std::size_t dim = n * l;
  DensityReport rep;
  rep.n = n;
  rep.radius = radius;
  rep.eps = eps;

  // L(M): unit spheres of S = {x : x_i - x_j in K_chi}
  std::vector<RationalSubspace> kernels;
  for (std::size_t c = 0; c < fs.functionals.size(); ++c) {
    if (fs.functionals[c].zero) continue;
    auto k = rational_kernel(fs, c);
    if (std::find(kernels.begin(), kernels.end(), k) == kernels.end()) kernels.push_back(std::move(k));
  }
  for (const auto& k : kernels)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        std::vector<RationalVector> span;
        for (std::size_t p = 0; p < n; ++p) {
          if (p == i) continue;
          for (std::size_t t = 0; t < l; ++t) {
            RationalVector e(dim, Rational(0));
            e[p * l + t] = 1;
            if (p == j) e[i * l + t] = 1;
            span.push_back(std::move(e));
          }
        }
        for (const auto& kv : k.basis()) {
          RationalVector e(dim, Rational(0));
          for (std::size_t t = 0; t < l; ++t) e[i * l + t] = kv[t];
          span.push_back(std::move(e));
        }
        auto s = RationalSubspace::span(span, dim);
        if (std::find(rep.excluded.begin(), rep.excluded.end(), s) == rep.excluded.end())
          rep.excluded.push_back(std::move(s));
      }

  // R_n: every nonzero lattice point off the excluded subspaces
  const std::int64_t r2 = squared_radius(radius);
  rep.total = ball_count(dim, radius);
  std::vector<std::vector<IntVector>> rows;
  for (const auto& s : rep.excluded) rows.push_back(constraints(s));
  std::uint64_t in_union = 0;
  for (std::size_t t = 0; t < rep.excluded.size(); ++t)
    enumerate_subspace(rep.excluded[t], r2, [&](const IntVector& z) {
      for (std::size_t u = 0; u < t; ++u)
        if (satisfies(rows[u], z)) return;
      ++in_union;
    });
  rep.r_count = rep.total - 1 - in_union;
  rep.r_fraction = static_cast<double>(rep.r_count) / static_cast<double>(rep.total);

  // delta(eps) from the spherical measure of the delta-neighbourhood of L(M)
  std::vector<Eigen::MatrixXd> onb;
  for (const auto& s : rep.excluded) onb.push_back(orthonormal(s));
  auto distance = [&](const Eigen::VectorXd& u) {
    double best = 2.0;
    for (const auto& q : onb) {
      const double p = (q.transpose() * u).norm();
      best = std::min(best, std::sqrt(std::max(0.0, 2.0 - 2.0 * std::min(1.0, p))));
    }
    return best;
  };
  if (eps >= 1.0 || onb.empty()) {
    rep.delta = 0.0;
    rep.excluded_measure = 0.0;
  } else {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    std::vector<double> dist(options.samples);
    Eigen::VectorXd u(dim);
    for (auto& x : dist) {
      for (std::size_t t = 0; t < dim; ++t) u(t) = normal(rng);
      u.normalize();
      x = distance(u);
    }
    // bisection for the largest delta whose neighbourhood has measure <= eps
    auto measure = [&](double delta) {
      std::uint64_t c = 0;
      for (auto x : dist) c += x < delta;
      return static_cast<double>(c) / static_cast<double>(dist.size());
    };
    double lo = 0.0, hi = 2.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (measure(mid) <= eps ? lo : hi) = mid;
    }
    rep.delta = lo;
    rep.excluded_measure = measure(lo);
  }

  // T_{n,delta}: direct scan of a ball that fits the point budget
  rep.t_radius = radius;
  while (rep.t_radius > 1 && ball_count(dim, rep.t_radius) > options.point_budget)
    rep.t_radius = std::floor(rep.t_radius * 0.9);
  rep.t_total = ball_count(dim, rep.t_radius);
  if (eps >= 1.0) {
    rep.t_count = rep.t_total;
  } else {
    const std::int64_t t2 = squared_radius(rep.t_radius);
    IntVector z(dim, 0);
    Eigen::VectorXd u(dim);
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t p, std::int64_t used) {
      if (p == dim) {
        if (used == 0) return;
        for (std::size_t t = 0; t < dim; ++t) u(t) = static_cast<double>(z[t]);
        u /= std::sqrt(static_cast<double>(used));
        if (distance(u) >= rep.delta) ++rep.t_count;
        return;
      }
      const std::int64_t lim = isqrt(t2 - used);
      for (std::int64_t x = -lim; x <= lim; ++x) {
        z[p] = x;
        rec(p + 1, used + x * x);
      }
      z[p] = 0;
    };
    rec(0, 0);
  }
  rep.t_fraction = static_cast<double>(rep.t_count) / static_cast<double>(rep.t_total);
  return rep;
}

}  // namespace nilmix::rates
