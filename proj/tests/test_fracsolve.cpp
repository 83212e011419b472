#include "nilmix/fracsolve.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace nilmix;
using namespace nilmix::fracsolve;

namespace {

constexpr double kPi = std::numbers::pi;
const double kGolden = (std::sqrt(5.0) - 1) / 2;

FourierObservable mode(const IntVector& z, Complex c, std::size_t dim = 2) {
  FourierObservable f(dim);
  f.set(z, c);
  return f;
}

}  // namespace

TEST_CASE("FourierObservable basics") {
  FourierObservable f(2);
  f.set({1, 0}, 2.0);
  f.add({1, 0}, -2.0);
  CHECK(f.empty());
  f.set({0, 0}, 1.0);
  CHECK_FALSE(f.mean_zero());
  f.set({3, 4}, {0, 1});
  CHECK(f.support_radius() == 5.0);
  CHECK_THROWS_AS(f.set({1}, 1.0), InputError);
  // cos^2 = 1/2 + cos(4 pi x)/2
  const auto c = cos_mode({1, 0});
  const auto c2 = c.product(c);
  CHECK(c2.at({0, 0}) == Complex(0.5));
  CHECK(c2.at({2, 0}) == Complex(0.25));
  CHECK(c.conjugate().at({1, 0}) == c.at({1, 0}));
  CHECK(c.inner(c) == Complex(0.5));
  const auto s = sin_mode({0, 1});
  CHECK(s.inner(s).real() == doctest::Approx(0.5));
  CHECK(exact_cos_mode({1, 0}).to_double().at({-1, 0}) == Complex(0.5));
  CHECK(ExactObservable::from_double(c).at({1, 0}) == GaussianRational(Rational(1, 2)));
}

TEST_CASE("project_torus_factor") {
  const std::vector<RationalVector> axis2{{0, 1}};
  FourierObservable f(2);
  f.set({2, 0}, 3.0);
  f.set({0, 3}, 4.0);
  auto [o, p] = project_torus_factor(f, axis2);
  CHECK(o.size() == 1);
  CHECK(o.at({2, 0}) == Complex(3.0));
  CHECK(p.size() == 1);
  CHECK(p.at({0, 3}) == Complex(4.0));

  auto [o0, p0] = project_torus_factor(FourierObservable(2), axis2);
  CHECK(o0.empty());
  CHECK(p0.empty());

  auto [o1, p1] = project_torus_factor(mode({1, 1}, 1.0), axis2);
  CHECK(o1.empty());
  CHECK(p1.size() == 1);
}

TEST_CASE("split_small_divisor") {
  const DirectionBasis v({{1.0, kGolden}});
  FourierObservable f(2);
  f.set({0, 1}, 1.0);
  f.set({2, 1}, 2.0);
  f.set({0, 0}, 3.0);
  const auto s = split_small_divisor(f, v);
  CHECK(s.small.at({0, 1}) == Complex(1.0));
  CHECK(s.large.at({2, 1}) == Complex(2.0));
  CHECK(s.zero.at({0, 0}) == Complex(3.0));
  CHECK(s.selector.at({0, 1}) == 0);
  CHECK(s.selector.count({0, 0}) == 0);

  // ties go to the smaller index
  const DirectionBasis two({{1.0, 0.0}, {0.0, 1.0}});
  const auto t = split_small_divisor(mode({1, 1}, 1.0), two);
  CHECK(t.selector.at({1, 1}) == 0);
  CHECK(split_small_divisor(mode({1, 2}, 1.0), two).selector.at({1, 2}) == 1);
}

TEST_CASE("solve_fractional") {
  SUBCASE("golden small divisor") {
    const DirectionBasis v({{1.0, kGolden}});
    const auto s = solve_fractional(mode({0, 1}, 1.0), v, 0.5);
    const double want = 1.0 / std::sqrt(2 * kPi * kGolden);
    CHECK(s.phi.at(0).at({0, 1}).real() == doctest::Approx(want).epsilon(1e-14));
    CHECK(std::abs(s.phi[0].at({0, 1}).real() - 0.507462) < 1e-6);
    CHECK(s.residual <= 1e-12);
    CHECK(s.phi_small[0].size() == 1);
  }
  SUBCASE("exact resonance is an obstruction") {
    const auto v = DirectionBasis::rational({{1, 1}});
    try {
      solve_fractional(mode({1, -1}, 1.0), v, 0.5);
      FAIL("expected an obstruction");
    } catch (const ObstructionError& e) {
      CHECK(e.frequency() == IntVector{1, -1});
    }
  }
  SUBCASE("float resonance is reported as such") {
    const DirectionBasis v({{1.0, 1.0}});
    CHECK_THROWS_AS(solve_fractional(mode({1, -1}, 1.0), v, 0.5), ObstructionError);
  }
  SUBCASE("signed mode with r = 1 inverts the directional derivative") {
    const DirectionBasis v({{1.0, kGolden}});
    FourierObservable f(2);
    f.set({1, 2}, {0.5, -1.0});
    f.set({-1, -2}, {0.5, 1.0});
    f.set({3, -1}, 2.0);
    const auto s = solve_fractional(f, v, 1.0, Mode::signed_power);
    CHECK(s.residual <= 1e-12 * f.max_abs());
    for (const auto& [z, c] : f.coeffs()) {
      const Complex d(0, 2 * kPi * (static_cast<double>(z[0]) + kGolden * static_cast<double>(z[1])));
      CHECK(std::abs(d * s.phi[0].at(z) - c) <= 1e-14 * std::abs(c));
    }
    CHECK_THROWS_AS(solve_fractional(f, v, 0.5, Mode::signed_power), InputError);
  }
  SUBCASE("nonzero mean is dropped with a warning") {
    FourierObservable f = mode({1, 0}, 1.0);
    f.set({0, 0}, 2.0);
    const auto s = solve_fractional(f, DirectionBasis({{1.0, kGolden}}), 0.5);
    CHECK(s.dropped_mean == Complex(2.0));
    CHECK_FALSE(s.warnings.empty());
  }
  SUBCASE("two directions use the selector") {
    const DirectionBasis v({{1.0, 0.0}, {0.0, 1.0}});
    FourierObservable f(2);
    f.set({3, 1}, 1.0);
    f.set({1, 3}, 1.0);
    const auto s = solve_fractional(f, v, 2.0);
    CHECK(s.phi[0].size() == 1);
    CHECK(s.phi[1].size() == 1);
    CHECK(s.phi[0].at({3, 1}).real() == doctest::Approx(1 / std::pow(2 * kPi * 3, 2)));
    CHECK(apply_operator(s).at({1, 3}).real() == doctest::Approx(1.0));
  }
}

TEST_CASE("sobolev norms") {
  CHECK(sobolev_norm(mode({3, 4}, 1.0), 1) == doctest::Approx(std::sqrt(1 + 4 * kPi * kPi * 25)).epsilon(1e-14));
  CHECK(std::abs(sobolev_norm(mode({3, 4}, 1.0), 1) - 31.4318) < 1e-4);
  FourierObservable f(2);
  f.set({1, 0}, 3.0);
  f.set({0, 7}, {0, 4.0});
  CHECK(sobolev_norm(f, 0) == doctest::Approx(5.0));
  const DirectionBasis v({{1.0, 0.0}});
  for (double s : {0.0, 0.5, 3.0}) CHECK(partial_sobolev_norm(mode({0, 5}, 1.0), s, v) == doctest::Approx(1.0));
  // order r d = 2 on T^2
  CHECK(small_divisor_bound(mode({0, 1}, 1.0), 0.5, 1, 1.0) == doctest::Approx(1 / (0.5 * 2 * kPi) * (1 + 4 * kPi * kPi)));
}

TEST_CASE("schrodinger_threshold") {
  const auto one = Profile::function([](double) { return 1.0; }, "one");
  SUBCASE("r = 1/4 converges to 4") {
    for (double h : {1e-2, 1e-4, 1e-6}) {
      const auto t = schrodinger_threshold(one, 0.25, h);
      CHECK(t.value == doctest::Approx(4 * (1 - std::sqrt(h))).epsilon(1e-5));
      CHECK(t.convergent);
    }
  }
  SUBCASE("r = 1/2 grows like 2 log(1/h)") {
    for (double h : {1e-2, 1e-4, 1e-6}) {
      const auto t = schrodinger_threshold(one, 0.5, h);
      CHECK(t.value == doctest::Approx(2 * std::log(1 / h)).epsilon(1e-5));
      CHECK_FALSE(t.convergent);
    }
  }
  SUBCASE("r = 3/4 diverges like a power") {
    const auto t = schrodinger_threshold(one, 0.75, 1e-4);
    CHECK(t.value == doctest::Approx(4 * (std::pow(1e-4, -0.5) - 1)).epsilon(1e-5));
    CHECK_FALSE(t.convergent);
  }
  SUBCASE("a vanishing profile restores integrability") {
    const auto sq = Profile::function([](double x) { return x * x; }, "x2");
    const auto t = schrodinger_threshold(sq, 0.75, 1e-6);
    CHECK(t.convergent);
    CHECK(t.tail_exponent == doctest::Approx(2.5).epsilon(1e-6));
    // int 2 x^(4 - 1.5) dx over [h, 1]
    CHECK(t.value == doctest::Approx(2 / 3.5 * (1 - std::pow(1e-6, 3.5))).epsilon(1e-5));
  }
  SUBCASE("sampled profile") {
    const auto p = Profile::samples({{-1, 1}, {0, 1}, {1, 1}}, "flat");
    CHECK(schrodinger_threshold(p, 0.25, 1e-2).value == doctest::Approx(3.6).epsilon(1e-5));
    CHECK_THROWS_AS(Profile::samples({{-0.5, 1}, {1, 1}}, "short"), InputError);
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(schrodinger_threshold(one, 0.25, 0.0), InputError);
    CHECK_THROWS_AS(schrodinger_threshold(one, 0.25, 1.0), InputError);
    CHECK_THROWS_AS(schrodinger_threshold(one, 0.0, 0.1), InputError);
  }
}
