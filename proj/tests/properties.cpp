#include "generators.hpp"
#include "nilmix/catalog.hpp"
#include "nilmix/correlate.hpp"
#include "nilmix/dioph.hpp"
#include "nilmix/rates.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace nilmix;
using exactlin::Polynomial;
using exactlin::RationalMatrix;
using exactlin::RationalSubspace;
using fracsolve::Complex;
using fracsolve::DirectionBasis;
using fracsolve::ExactObservable;
using fracsolve::FourierObservable;

namespace {

constexpr int kCases = 200;
const double kGolden = (std::sqrt(5.0) - 1) / 2;
const RationalMatrix kCat = RationalMatrix::from_rows({{2, 1}, {1, 1}});
const std::vector<std::vector<std::int64_t>> kCatInt{{2, 1}, {1, 1}};

gen::Rng rng_for(std::uint64_t salt) { return gen::Rng(0x5EED0000ULL + salt); }

std::vector<std::int64_t> to_int(const RationalVector& v) {
  std::vector<std::int64_t> out;
  for (const auto& x : v) out.push_back(static_cast<std::int64_t>(numerator(x).convert_to<long long>()));
  return out;
}

/// f o A for an integer matrix A: the coefficient at k moves to A^T k.
FourierObservable compose(const FourierObservable& f, const std::vector<std::vector<std::int64_t>>& a) {
  FourierObservable out(f.dim());
  for (const auto& [k, c] : f.coeffs()) {
    IntVector t(k.size(), 0);
    for (std::size_t r = 0; r < k.size(); ++r)
      for (std::size_t s = 0; s < k.size(); ++s) t[r] += a[s][r] * k[s];
    out.add(t, c);
  }
  return out;
}

/// Monic integer polynomial with random coefficients in [-2, 2].
Polynomial random_monic(gen::Rng& rng, int degree) {
  RationalVector c(static_cast<std::size_t>(degree) + 1);
  for (int i = 0; i < degree; ++i) c[static_cast<std::size_t>(i)] = gen::integer(rng, -2, 2);
  c.back() = 1;
  return Polynomial(c);
}

std::vector<RationalMatrix> conjugate_all(const std::vector<RationalMatrix>& gens, const RationalMatrix& p) {
  std::vector<RationalMatrix> out;
  for (const auto& g : gens) out.push_back(gen::conjugate(g, p));
  return out;
}

/// Ergodic conjugate of the cubic companion by a random GL(3, Z) matrix.
RationalMatrix cubic_conjugate(gen::Rng& rng) {
  return gen::conjugate(catalog("cubic3").generators[0], gen::unimodular(rng, 3, 6));
}

std::vector<RealVector> real_directions(const std::vector<std::vector<double>>& v) {
  std::vector<RealVector> out;
  for (const auto& d : v) {
    RealVector r;
    for (double x : d) r.emplace_back(x);
    out.push_back(r);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- exactlin

TEST_CASE("exactlin: Cayley-Hamilton holds exactly") {
  auto rng = rng_for(1);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto n = static_cast<std::size_t>(gen::integer(rng, 1, 5));
    const auto m = gen::rational_matrix(rng, n);
    const auto p = exactlin::char_poly(m);
    CHECK(p == oracle::char_poly(m));
    CHECK(p.evaluate(m).is_zero());
  }
}

TEST_CASE("exactlin: unimodular matrices have unit determinant and zero exponent sum") {
  auto rng = rng_for(2);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto n = static_cast<std::size_t>(gen::integer(rng, 2, 4));
    const auto m = gen::unimodular(rng, n, 8);
    REQUIRE(m.is_unimodular_integer());
    const auto c0 = exactlin::char_poly(m).coeff(0);
    CHECK((c0 == 1 || c0 == -1));
    const auto l = exactlin::lyapunov_data(m);
    CHECK(std::abs(l.exponent_sum.value) <= l.exponent_sum.radius + 1e-300);
    double sum = 0;
    for (double e : oracle::exponents(m)) sum += e;
    CHECK(std::abs(sum) < 1e-9);
  }
}

TEST_CASE("exactlin: primary decomposition is an invariant direct sum") {
  auto rng = rng_for(3);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto n = static_cast<std::size_t>(gen::integer(rng, 1, 5));
    // alternate generic rational matrices and unimodular ones with repeated factors
    const auto m = i % 2 ? gen::rational_matrix(rng, n, 3, 2) : gen::unimodular(rng, n, 4);
    const auto pd = exactlin::primary_decomposition(m);
    std::vector<RationalVector> all;
    for (const auto& b : pd.blocks) {
      const auto span = RationalSubspace::span(b.basis, n);
      CHECK(span.dim() == b.basis.size());
      CHECK(static_cast<int>(b.basis.size()) == b.factor.degree() * static_cast<int>(b.multiplicity));
      for (const auto& v : b.basis) CHECK(span.contains(m.apply(v)));
      all.insert(all.end(), b.basis.begin(), b.basis.end());
    }
    REQUIRE(all.size() == n);
    CHECK(RationalMatrix::from_columns(all, n).rank() == n);
  }
}

TEST_CASE("exactlin: is_cyclotomic agrees with division of x^d - 1") {
  auto rng = rng_for(4);
  int cyclotomic_seen = 0;
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    Polynomial q;
    if (i % 3 == 0) {
      // a genuine cyclotomic polynomial of degree <= 8
      std::vector<unsigned> orders;
      for (unsigned d = 1; d <= 30; ++d)
        if (exactlin::euler_totient(d) <= 8) orders.push_back(d);
      q = exactlin::cyclotomic(orders[static_cast<std::size_t>(gen::integer(rng, 0, static_cast<long>(orders.size()) - 1))]);
    } else {
      q = random_monic(rng, static_cast<int>(gen::integer(rng, 1, 8)));
    }
    CAPTURE(q.to_string());
    if (!exactlin::is_irreducible(q)) {
      CHECK_THROWS_AS(exactlin::is_cyclotomic(q), InputError);
      continue;
    }
    const auto deg = static_cast<unsigned>(q.degree());
    const unsigned want = oracle::cyclotomic_order(q, 10 * deg * deg);
    const auto got = exactlin::is_cyclotomic(q);
    CHECK(got.value_or(0) == want);
    if (want) ++cyclotomic_seen;
  }
  CHECK(cyclotomic_seen >= kCases / 3);
}

TEST_CASE("exactlin: Lyapunov subspaces are invariant") {
  auto rng = rng_for(5);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto n = static_cast<std::size_t>(gen::integer(rng, 1, 4));
    const auto m = i % 2 ? gen::rational_matrix(rng, n, 4, 3) : gen::unimodular(rng, n, 6);
    if (m.determinant() == 0) continue;
    const auto l = exactlin::lyapunov_data(m);
    CHECK(l.max_residual <= 1e-9);
    std::size_t dims = 0;
    for (const auto& s : l.subspaces) {
      CHECK(exactlin::invariance_residual(m, s.basis) <= 1e-9);
      dims += s.dim;
    }
    CHECK(dims == n);
  }
}

// ---------------------------------------------------------------- nilalg

TEST_CASE("nilalg: ergodicity is stable under powers") {
  auto rng = rng_for(6);
  const auto names = catalog_names();
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto s = catalog(names[static_cast<std::size_t>(i) % names.size()]);
    auto m = s.generators[0];
    // abelian systems also take random lattice conjugates
    if (s.algebra.layer_count() == 1 && i % 2) m = gen::conjugate(m, gen::unimodular(rng, m.rows(), 5));
    const auto q = gen::integer(rng, 1, 6);
    CAPTURE(s.name);
    CAPTURE(q);
    CHECK(nilalg::classify(s.algebra, m).ergodic == nilalg::classify(s.algebra, m.power(q)).ergodic);
  }
  // random abelian automorphisms, ergodic or not
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto n = static_cast<std::size_t>(gen::integer(rng, 2, 4));
    const auto m = gen::unimodular(rng, n, 5);
    const auto a = nilalg::NilpotentAlgebra::abelian(n);
    const auto q = gen::integer(rng, 2, 6);
    CHECK(nilalg::classify(a, m).ergodic == nilalg::classify(a, m.power(q)).ergodic);
  }
}

TEST_CASE("nilalg: the two spectral parts split n into invariant summands") {
  auto rng = rng_for(7);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto n = static_cast<std::size_t>(gen::integer(rng, 1, 5));
    RationalMatrix m = gen::unimodular(rng, n, 5);
    if (i % 4 == 0 && n >= 2) {
      // force a root-of-unity block next to a hyperbolic one
      m = RationalMatrix::direct_sum(kCat, RationalMatrix::from_rows({{0, -1}, {1, 0}}));
      m = gen::conjugate(m, gen::unimodular(rng, 4, 5));
    }
    const auto dim = m.rows();
    const auto c = nilalg::classify(nilalg::NilpotentAlgebra::abelian(dim), m);
    CHECK(c.n_z1.dim() + c.n_z2.dim() == dim);
    CHECK(c.n_z1.sum(c.n_z2) == RationalSubspace::whole(dim));
    CHECK(c.n_z1.image(m) == c.n_z1);
    CHECK(c.n_z2.image(m) == c.n_z2);
  }
}

TEST_CASE("nilalg: abelianization is functorial") {
  auto rng = rng_for(8);
  const auto h = catalog("heisenberg-cat").algebra;
  auto heis = [&] {
    const auto g = gen::unimodular(rng, 2, 5);
    const auto det = g.determinant();
    RationalMatrix m(3, 3);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) m(r, c) = g(r, c);
    m(2, 0) = gen::integer(rng, -3, 3);
    m(2, 1) = gen::integer(rng, -3, 3);
    m(2, 2) = det;
    return m;
  };
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto a = heis(), b = heis();
    REQUIRE(nilalg::validate_automorphism(h, a).ok);
    CHECK(nilalg::abelianization_action(h, a * b) ==
          nilalg::abelianization_action(h, a) * nilalg::abelianization_action(h, b));
    const auto n = static_cast<std::size_t>(gen::integer(rng, 1, 4));
    const auto ab = nilalg::NilpotentAlgebra::abelian(n);
    const auto x = gen::unimodular(rng, n, 4), y = gen::unimodular(rng, n, 4);
    CHECK(nilalg::abelianization_action(ab, x * y) ==
          nilalg::abelianization_action(ab, x) * nilalg::abelianization_action(ab, y));
  }
}

TEST_CASE("nilalg: regular elements separate all Lyapunov functionals") {
  auto rng = rng_for(9);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto s = catalog(i % 2 ? "cubic-rank2" : "product-t2xt2");
    // recombine the generators by a random GL(2, Z) matrix, then conjugate
    const auto u = gen::unimodular(rng, 2, 3);
    std::vector<RationalMatrix> gens;
    for (std::size_t r = 0; r < 2; ++r)
      gens.push_back(nilalg::action_matrix(s.generators, to_int(u.row(r))));
    gens = conjugate_all(gens, gen::unimodular(rng, gens[0].rows(), 4));
    const auto reg = nilalg::find_regular_element(s.algebra, gens);
    CAPTURE(reg.z[0]);
    CAPTURE(reg.z[1]);
    CHECK(reg.min_functional > 0);
    CHECK(reg.min_separation > 0);
    const auto fs = nilalg::lyapunov_functionals(gens);
    std::vector<CertifiedReal> values;
    for (const auto& f : fs.functionals) {
      const auto v = f.evaluate(reg.z);
      if (!f.zero) CHECK((v.certified_positive() || v.certified_negative()));
      values.push_back(v);
    }
    for (std::size_t a = 0; a < values.size(); ++a)
      for (std::size_t b = a + 1; b < values.size(); ++b)
        CHECK((values[a].hi() < values[b].lo() || values[b].hi() < values[a].lo()));
    // independent check: exponents of the action matrix are nonzero and simple
    auto e = oracle::exponents(nilalg::action_matrix(gens, reg.z));
    std::sort(e.begin(), e.end());
    for (double x : e) CHECK(std::abs(x) > 1e-9);
    std::size_t distinct = 1;
    for (std::size_t k = 1; k < e.size(); ++k)
      if (e[k] - e[k - 1] > 1e-9) ++distinct;
    CHECK(distinct == fs.functionals.size());
  }
}

// ---------------------------------------------------------------- dioph

TEST_CASE("dioph: the constant does not increase with the radius") {
  auto rng = rng_for(10);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto d = static_cast<std::size_t>(gen::integer(rng, 2, 3));
    std::vector<double> v(d);
    for (auto& x : v) x = gen::real(rng, -1, 1);
    const auto basis = real_directions({v});
    const double r1 = gen::real(rng, 2, d == 2 ? 60 : 15);
    const double r2 = r1 * gen::real(rng, 1, 3);
    const auto a = dioph::diophantine_certificate(basis, d, r1);
    const auto b = dioph::diophantine_certificate(basis, d, r2);
    CHECK(b.c_emp <= a.c_emp);
  }
}

TEST_CASE("dioph: the constant scales linearly with the directions") {
  auto rng = rng_for(11);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto d = static_cast<std::size_t>(gen::integer(rng, 2, 3));
    const double radius = d == 2 ? 40 : 12;
    if (i % 2) {
      // dyadic factor on real directions: exact in binary arithmetic
      std::vector<double> v(d);
      for (auto& x : v) x = gen::real(rng, -1, 1);
      const double t = std::ldexp(1.0, static_cast<int>(gen::integer(rng, -6, 6)));
      std::vector<double> tv(d);
      for (std::size_t k = 0; k < d; ++k) tv[k] = t * v[k];
      const auto a = dioph::diophantine_certificate(real_directions({v}), d, radius);
      const auto b = dioph::diophantine_certificate(real_directions({tv}), d, radius);
      CHECK(b.c_emp == t * a.c_emp);
      CHECK(b.argmin == a.argmin);
    } else {
      RationalVector v(d);
      for (auto& x : v) x = gen::rational(rng, 40, 37);
      if (std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; })) v[0] = 1;
      const Rational t(gen::integer(rng, 1, 50), gen::integer(rng, 1, 50));
      RationalVector tv;
      for (const auto& x : v) tv.push_back(t * x);
      const auto a = dioph::diophantine_certificate(std::vector<RationalVector>{v}, d, radius);
      const auto b = dioph::diophantine_certificate(std::vector<RationalVector>{tv}, d, radius);
      CHECK(a.exact);
      CHECK(b.argmin == a.argmin);
      const double want = t.convert_to<double>() * a.c_emp;
      CHECK(std::abs(b.c_emp - want) <= 1e-15 * std::abs(want));
    }
  }
}

TEST_CASE("dioph: exact resonances fail with a zero constant") {
  auto rng = rng_for(12);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto d = static_cast<std::size_t>(gen::integer(rng, 2, 3));
    const auto t = static_cast<std::size_t>(gen::integer(rng, 1, static_cast<long>(d) - 1));
    std::vector<RationalVector> v;
    for (std::size_t k = 0; k < t; ++k) {
      const auto z = gen::nonzero_vector(rng, d, 3);
      v.emplace_back(z.begin(), z.end());
    }
    // integer entries up to 3 give an orthogonal vector of norm below 40
    const auto c = dioph::diophantine_certificate(v, d, 40);
    CHECK_FALSE(c.pass);
    CHECK(c.c_emp == 0.0);
    for (const auto& vi : v) CHECK(exactlin::dot(vi, RationalVector(c.argmin.begin(), c.argmin.end())) == 0);
  }
}

TEST_CASE("dioph: the subspace sweep passes on random ergodic GL(3, Z) members") {
  auto rng = rng_for(13);
  // the stated sweep at R = 1000
  for (int i = 0; i < 10; ++i) {
    CAPTURE(i);
    const auto r = dioph::verify_lemma9(cubic_conjugate(rng), 1000);
    CHECK(r.all_pass);
    for (const auto& c : r.certificates) CHECK(c.c_emp > 0);
  }
  // a wider sweep at R = 100
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto r = dioph::verify_lemma9(cubic_conjugate(rng), 100);
    CHECK(r.all_pass);
    for (const auto& c : r.certificates) CHECK(c.c_emp > 0);
  }
}

// ---------------------------------------------------------------- rates

TEST_CASE("rates: the Holder rate is monotone and capped") {
  auto rng = rng_for(14);
  std::vector<rates::RateReport> reports;
  for (const char* name : {"catmap", "cubic3", "heisenberg-cat"}) {
    const auto s = catalog(name);
    reports.push_back(rates::rho_chi(s.algebra, s.generators[0]));
  }
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto& rep = reports[static_cast<std::size_t>(i) % reports.size()];
    const double s0 = rep.s0;
    const double a = gen::real(rng, 0, 3 * s0), b = gen::real(rng, 0, 3 * s0);
    const auto ga = rates::holder_rate(rep, std::min(a, b)), gb = rates::holder_rate(rep, std::max(a, b));
    CHECK(ga.gamma <= gb.gamma);
    CHECK(gb.gamma <= gb.rho0 / 2);
    const double big = 2 * s0 + gen::real(rng, 0, 10);
    CHECK(rates::holder_rate(rep, big).gamma == gb.rho0 / 2);
    CHECK(rates::holder_rate(rep, 2 * s0).gamma == gb.rho0 / 2);
  }
}

TEST_CASE("rates: envelope rates are positive in the admissible range") {
  auto rng = rng_for(15);
  std::vector<rates::RateReport> reports;
  for (const char* name : {"catmap", "cubic3", "heisenberg-cat"}) {
    const auto s = catalog(name);
    reports.push_back(rates::rho_chi(s.algebra, s.generators[0]));
  }
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto& rep = reports[static_cast<std::size_t>(i) % reports.size()];
    const double cap = std::min(rep.chi.value, rep.rho.value / 2);
    const double eps = gen::real(rng, 1e-6, 0.999) * cap;
    const double r = gen::real(rng, 1e-3, 5);
    const auto e = rates::order2_envelope(rep, r, eps);
    CHECK(e.rate1 > 0);
    CHECK(e.rate2 > 0);
  }
}

TEST_CASE("rates: theta is invariant under integer scaling") {
  auto rng = rng_for(16);
  const auto names = catalog_names();
  std::vector<nilalg::FunctionalSet> sets;
  for (const auto& name : names) sets.push_back(nilalg::lyapunov_functionals(catalog(name).generators));
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto& fs = sets[static_cast<std::size_t>(i) % sets.size()];
    const auto l = fs.generators.size();
    const auto n = static_cast<std::size_t>(gen::integer(rng, 2, 3));
    rates::TimeTuple tuple;
    while (tuple.times.size() < n) {
      auto z = gen::int_vector(rng, l, 6);
      if (std::find(tuple.times.begin(), tuple.times.end(), z) == tuple.times.end()) tuple.times.push_back(z);
    }
    const auto t = gen::integer(rng, 2, 9);
    rates::TimeTuple scaled = tuple;
    for (auto& z : scaled.times)
      for (auto& x : z) x *= t;
    const auto a = rates::theta(fs, tuple), b = rates::theta(fs, scaled);
    CHECK(a.theta.value == b.theta.value);
    CHECK(a.theta.radius == b.theta.radius);
    CHECK(a.regular == b.regular);
  }
}

TEST_CASE("rates: positive theta means no difference lies on a hyperplane") {
  auto rng = rng_for(17);
  std::vector<nilalg::FunctionalSet> sets;
  for (const char* name : {"catmap", "product-t2xt2", "cubic-rank2"})
    sets.push_back(nilalg::lyapunov_functionals(catalog(name).generators));
  int positive = 0, zero = 0;
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto& fs = sets[static_cast<std::size_t>(i) % sets.size()];
    const auto l = fs.generators.size();
    rates::TimeTuple tuple;
    while (tuple.times.size() < 3) {
      // small entries hit the rational hyperplanes of the product action often
      auto z = gen::int_vector(rng, l, 2);
      if (std::find(tuple.times.begin(), tuple.times.end(), z) == tuple.times.end()) tuple.times.push_back(z);
    }
    const auto r = rates::theta(fs, tuple);
    bool flags = true;
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b) {
        IntVector diff(l);
        for (std::size_t k = 0; k < l; ++k) diff[k] = tuple.times[a][k] - tuple.times[b][k];
        for (std::size_t f = 0; f < fs.functionals.size(); ++f)
          if (!fs.functionals[f].zero && fs.sign(f, diff) == 0) flags = false;
      }
    CHECK(r.regular == flags);
    if (r.theta.certified_positive()) {
      ++positive;
      CHECK(flags);
      for (const auto& p : r.pairs) CHECK(p.regular);
    } else {
      ++zero;
    }
  }
  CHECK(positive > 0);
  CHECK(zero > 0);
}

TEST_CASE("rates: the rank-one density beats 1 - 5/R against the exact count") {
  auto rng = rng_for(18);
  const auto fs = nilalg::lyapunov_functionals(catalog("catmap").generators);
  rates::DensityOptions o;
  o.samples = 2000;
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const double r = gen::real(rng, 5, 250);
    CAPTURE(r);
    const auto d = rates::density_estimate(fs, 2, r, 0.05, o);
    const auto lim = static_cast<std::int64_t>(std::floor(r / std::sqrt(2.0) + 1e-9));
    std::uint64_t diagonal = 0;
    for (std::int64_t a = -lim; a <= lim; ++a)
      if (static_cast<double>(2 * a * a) <= r * r) ++diagonal;
    const auto total = oracle::ball_count(2, r);
    CHECK(d.total == total);
    CHECK(d.r_count == total - diagonal);
    CHECK(d.r_fraction > 1 - 5 / r);
  }
}

TEST_CASE("rates: the density of good tuples does not decrease with the radius") {
  auto rng = rng_for(19);
  std::vector<nilalg::FunctionalSet> sets;
  for (const char* name : {"catmap", "product-t2xt2", "cubic-rank2"})
    sets.push_back(nilalg::lyapunov_functionals(catalog(name).generators));
  rates::DensityOptions o;
  o.samples = 2000;
  o.point_budget = 200000;
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto& fs = sets[static_cast<std::size_t>(i) % sets.size()];
    // radii chosen so the points of the doubled ball fit the budget
    const double r = gen::real(rng, 3, fs.generators.size() == 1 ? 100 : 9);
    CAPTURE(r);
    const auto a = rates::density_estimate(fs, 2, r, 0.05, o);
    const auto b = rates::density_estimate(fs, 2, 2 * r, 0.05, o);
    CHECK(a.r_fraction <= b.r_fraction);
  }
}

// ---------------------------------------------------------------- fracsolve

TEST_CASE("fracsolve: the small divisor split partitions f") {
  auto rng = rng_for(20);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto d = static_cast<std::size_t>(gen::integer(rng, 1, 3));
    const auto t = static_cast<std::size_t>(gen::integer(rng, 1, 3));
    std::vector<std::vector<double>> dirs(t, std::vector<double>(d));
    for (auto& v : dirs)
      for (auto& x : v) x = gen::real(rng, -0.3, 0.3);
    const DirectionBasis v(dirs);
    const auto f = gen::observable(rng, d, 8, 30, false);
    const auto s = fracsolve::split_small_divisor(f, v);
    CHECK(s.large.size() + s.small.size() + s.zero.size() == f.size());
    for (const auto& [z, c] : f.coeffs()) {
      const int hits = (s.large.at(z) != Complex(0)) + (s.small.at(z) != Complex(0)) + (s.zero.at(z) != Complex(0));
      CHECK(hits == 1);
      CHECK(s.large.at(z) + s.small.at(z) + s.zero.at(z) == c);
      if (std::all_of(z.begin(), z.end(), [](auto x) { return x == 0; })) continue;
      double sum = 0;
      for (std::size_t j = 0; j < t; ++j) sum += std::abs(v.dot(j, z));
      CHECK(std::abs(v.dot(s.selector.at(z), z)) >= sum / static_cast<double>(t));
    }
  }
}

TEST_CASE("fracsolve: the solver is linear") {
  auto rng = rng_for(21);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto d = static_cast<std::size_t>(gen::integer(rng, 2, 3));
    std::vector<double> dir(d);
    dir[0] = 1;
    for (std::size_t k = 1; k < d; ++k) dir[k] = gen::real(rng, -1, 1);
    const DirectionBasis v({dir});
    const double r = gen::real(rng, 0.1, 2.5);
    const auto f = gen::observable(rng, d, 6, 20), g = gen::observable(rng, d, 6, 20);
    const Complex a(gen::real(rng, -2, 2), gen::real(rng, -2, 2)), b(gen::real(rng, -2, 2), gen::real(rng, -2, 2));
    const auto sf = fracsolve::solve_fractional(f, v, r);
    const auto sg = fracsolve::solve_fractional(g, v, r);
    const auto sh = fracsolve::solve_fractional(f * a + g * b, v, r);
    const auto want = sf.phi[0] * a + sg.phi[0] * b;
    double scale = 0;
    for (const auto& [z, c] : want.coeffs()) scale = std::max(scale, std::abs(c));
    for (const auto& [z, c] : want.coeffs()) CHECK(std::abs(sh.phi[0].at(z) - c) <= 1e-12 * scale);
    for (const auto& [z, c] : sh.phi[0].coeffs()) CHECK(std::abs(want.at(z) - c) <= 1e-12 * scale);
  }
}

TEST_CASE("fracsolve: solutions reconstruct f") {
  auto rng = rng_for(22);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto d = static_cast<std::size_t>(gen::integer(rng, 1, 3));
    const auto t = static_cast<std::size_t>(gen::integer(rng, 1, 2));
    std::vector<std::vector<double>> dirs(t, std::vector<double>(d));
    for (auto& v : dirs)
      for (auto& x : v) x = gen::real(rng, -1, 1);
    const double r = std::vector<double>{0.25, 0.5, 1, 2}[static_cast<std::size_t>(i % 4)];
    const auto f = gen::observable(rng, d, 10, 25);
    const auto s = fracsolve::solve_fractional(f, DirectionBasis(dirs), r);
    CHECK(s.residual <= 1e-12 * f.max_abs());
    const auto back = fracsolve::apply_operator(s);
    for (const auto& [z, c] : f.coeffs()) CHECK(std::abs(back.at(z) - c) <= 1e-12 * f.max_abs());
  }
}

TEST_CASE("fracsolve: modulus and signed solutions have equal magnitudes") {
  auto rng = rng_for(23);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto d = static_cast<std::size_t>(gen::integer(rng, 1, 3));
    std::vector<double> dir(d);
    for (auto& x : dir) x = gen::real(rng, -1, 1);
    const DirectionBasis v({dir});
    const double r = static_cast<double>(gen::integer(rng, 1, 4));
    const auto f = gen::observable(rng, d, 8, 25);
    const auto a = fracsolve::solve_fractional(f, v, r, fracsolve::Mode::modulus);
    const auto b = fracsolve::solve_fractional(f, v, r, fracsolve::Mode::signed_power);
    REQUIRE(a.phi[0].size() == b.phi[0].size());
    for (const auto& [z, c] : a.phi[0].coeffs()) CHECK(std::abs(b.phi[0].at(z)) == std::abs(c));
    CHECK(a.norms == b.norms);
  }
}

TEST_CASE("fracsolve: small-divisor parts obey the Diophantine Sobolev bound") {
  auto rng = rng_for(24);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto d = static_cast<std::size_t>(gen::integer(rng, 2, 3));
    const auto t = static_cast<std::size_t>(gen::integer(rng, 1, d - 1));
    std::vector<std::vector<double>> dirs(t, std::vector<double>(d));
    for (auto& v : dirs)
      for (auto& x : v) x = gen::real(rng, -1, 1);
    const double r = std::vector<double>{0.25, 0.5, 1, 2}[static_cast<std::size_t>(i % 4)];
    const auto f = gen::observable(rng, d, d == 2 ? 20 : 8, 40);
    // the certificate sees the directions exactly as the solver does
    const auto cert = dioph::diophantine_certificate(real_directions(dirs), d, f.support_radius());
    REQUIRE(cert.c_emp > 0);
    const auto s = fracsolve::solve_fractional(f, DirectionBasis(dirs), r);
    const double bound = fracsolve::small_divisor_bound(f, cert.c_emp, t, r);
    for (std::size_t k = 0; k < t; ++k) CHECK(s.small_norms[k] <= bound * (1 + 1e-12));
  }
}

TEST_CASE("fracsolve: the Schrodinger integral grows as h decreases") {
  auto rng = rng_for(25);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const double c0 = gen::real(rng, -1, 1), c1 = gen::real(rng, -1, 1), c2 = gen::real(rng, -1, 1);
    const auto p = fracsolve::Profile::function([=](double x) { return c0 + c1 * x + c2 * x * x; }, "quadratic");
    const double r = gen::real(rng, 0.05, 0.95);
    const double h1 = std::pow(10.0, -gen::real(rng, 1, 6));
    const double h2 = h1 * gen::real(rng, 0.01, 1);
    const auto a = fracsolve::schrodinger_threshold(p, r, h1), b = fracsolve::schrodinger_threshold(p, r, h2);
    CHECK(b.value >= a.value);
  }
}

// ---------------------------------------------------------------- correlate

TEST_CASE("correlate: correlations are invariant under a common time shift") {
  auto rng = rng_for(26);
  const auto product = catalog("product-t2xt2").generators;
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const bool rank2 = i % 2;
    const auto& gens = rank2 ? product : std::vector<RationalMatrix>{kCat};
    const std::size_t dim = rank2 ? 4 : 2, l = gens.size();
    const auto n = static_cast<std::size_t>(gen::integer(rng, 2, 3));
    std::vector<ExactObservable> f;
    for (std::size_t k = 0; k < n; ++k) f.push_back(gen::exact_observable(rng, dim, 3, 5));
    std::vector<IntVector> times, shifted;
    const auto w = gen::int_vector(rng, l, 4);
    for (std::size_t k = 0; k < n; ++k) {
      times.push_back(gen::int_vector(rng, l, 2));
      shifted.push_back(times.back());
      for (std::size_t j = 0; j < l; ++j) shifted.back()[j] += w[j];
    }
    CHECK(correlate::correlation_n(f, gens, times) == correlate::correlation_n(f, gens, shifted));
  }
}

TEST_CASE("correlate: Plancherel at time zero") {
  auto rng = rng_for(27);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto f = gen::exact_observable(rng, 2, 5, 12, false), g = gen::exact_observable(rng, 2, 5, 12, false);
    fracsolve::GaussianRational want;
    for (const auto& [k, c] : f.coeffs()) want = want + c * g.at(k).conj();
    CHECK(correlate::correlation2(f, g, kCat, 0) == want);
    const auto fd = f.to_double(), gd = g.to_double();
    CHECK(std::abs(correlate::correlation2(fd, gd, kCat, 0) - fd.inner(gd)) <= 1e-12 * (1 + std::abs(fd.inner(gd))));
  }
}

TEST_CASE("correlate: n-point correlations reduce to two blocks") {
  auto rng = rng_for(28);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const auto n = static_cast<std::size_t>(gen::integer(rng, 3, 4));
    std::vector<FourierObservable> f;
    for (std::size_t k = 0; k < n; ++k) f.push_back(gen::observable(rng, 2, 2, 4));
    std::vector<IntVector> times;
    for (std::size_t k = 0; k < n; ++k) times.push_back({gen::integer(rng, 0, 3)});
    // merge the first n - 1 factors f_k o M^{z_k} by Fourier products
    FourierObservable merged = compose(f[0], oracle::int_power(kCatInt, static_cast<int>(times[0][0])));
    for (std::size_t k = 1; k + 1 < n; ++k)
      merged = merged.product(compose(f[k], oracle::int_power(kCatInt, static_cast<int>(times[k][0]))));
    // int F(x) f_n(M^z x) dx = <f_n o M^z, conj F>
    const auto two = correlate::correlation2(f.back(), merged.conjugate(), kCat, times.back()[0]);
    const auto many = correlate::correlation_n(f, {kCat}, times);
    CHECK(std::abs(two - many) <= 1e-12 * (1 + std::abs(many)));
  }
}

TEST_CASE("correlate: correlations vanish beyond the resonance horizon") {
  auto rng = rng_for(29);
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    // random hyperbolic elements of GL(2, Z)
    RationalMatrix m;
    do m = gen::unimodular(rng, 2, 4);
    while (abs(m.trace()) <= 2);
    const auto f = gen::observable(rng, 2, 6, 10), g = gen::observable(rng, 2, 6, 10);
    const auto horizon = correlate::resonance_horizon(f, g, m);
    CAPTURE(horizon);
    REQUIRE(horizon >= 0);
    for (std::int64_t k = horizon + 1; k <= horizon + 6; ++k) CHECK(correlate::correlation2(f, g, m, k) == Complex(0.0));
  }
}

TEST_CASE("correlate: the mixing envelope holds with rate twice chi") {
  auto rng = rng_for(30);
  const double chi = oracle::golden_log();
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const bool triple = i % 2;
    const double a = gen::real(rng, 0.3, 0.7);
    const auto f = gen::decaying(rng, a, 8), g = gen::decaying(rng, a, 8);
    correlate::CorrelationSeries s;
    for (std::int64_t m = 1; m <= 8; ++m) {
      if (triple) {
        const std::vector<IntVector> times{{0}, {m}, {2 * m}};
        s.entries.push_back(correlate::make_entry(times, correlate::correlation_n({f, g, f}, {kCat}, times)));
      } else {
        s.entries.push_back(correlate::make_entry({{0}, {m}}, correlate::correlation2(f, g, kCat, m)));
      }
    }
    const auto fit = correlate::decay_fit(s, 2 * chi);
    CHECK(fit.envelope_ok);
  }
}

TEST_CASE("correlate: order-three max-gap envelope on unbalanced triples") {
  auto rng = rng_for(31);
  const double chi = oracle::golden_log();
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    const double a = gen::real(rng, 0.3, 0.7);
    const auto f = gen::decaying(rng, a, 6), g = gen::decaying(rng, a, 6), h = gen::decaying(rng, a, 6);
    const auto near = gen::integer(rng, 1, 2);
    correlate::CorrelationSeries s;
    for (std::int64_t m = near + 1; m <= near + 10; ++m) {
      const std::vector<IntVector> times{{0}, {near}, {m}};
      s.entries.push_back(correlate::make_entry(times, correlate::correlation_n({f, g, h}, {kCat}, times)));
    }
    const auto fit = correlate::decay_fit(s, chi / 2, correlate::GapKind::max_gap);
    CHECK(fit.envelope_ok);
  }
}
