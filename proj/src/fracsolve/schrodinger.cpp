#include "nilmix/fracsolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nilmix::fracsolve {

namespace {

constexpr int kCells = 256;

// Composite midpoint rule on the dyadic shells 2^-(k+1) <= |x| <= 2^-k, both
// signs, from `top` down to h. The cell containing h contributes (b - h) g(midpoint), so
// the value is nondecreasing as h decreases.
double integral(const Profile& p, double r, double h, int cells, double top = 1.0) {
  auto g = [&](double x) {
    const double a = p.xi(x), b = p.xi(-x);
    return (a * a + b * b) * std::pow(x, -2 * r);
  };
  CompensatedSum sum;
  while (top > h) {
    const double lo = top / 2;
    const double w = (top - lo) / cells;
    for (int c = cells - 1; c >= 0; --c) {
      const double a = lo + c * w, b = a + w;
      if (b <= h) break;
      const double len = a >= h ? w : b - h;
      sum.add(len * g(a + w / 2));
    }
    top = lo;
  }
  return sum.value();
}

}  // namespace

Profile Profile::function(std::function<double(double)> f, std::string name) { return {std::move(f), std::move(name)}; }

Profile Profile::samples(std::vector<std::pair<double, double>> points, std::string name) {
  if (points.size() < 2) throw InputError("profile needs at least two samples");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i].first > points[i - 1].first)) throw InputError("profile abscissae must increase strictly");
  if (points.front().first > -1.0 || points.back().first < 1.0)
    throw InputError("profile samples must cover [-1, 1]");
  auto f = [pts = std::move(points)](double x) {
    auto it = std::lower_bound(pts.begin(), pts.end(), x, [](const auto& p, double v) { return p.first < v; });
    if (it == pts.begin()) return it->second;
    if (it == pts.end()) return pts.back().second;
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
  };
  return {f, std::move(name)};
}

ThresholdResult schrodinger_threshold(const Profile& p, double r, double h) {
  if (!(h > 0 && h < 1)) throw InputError("h must lie in (0, 1)");
  if (!(r > 0)) throw InputError("order r must be positive");
  ThresholdResult out;
  out.r = r;
  out.h = h;
  out.value = integral(p, r, h, kCells);
  out.error_estimate = std::abs(out.value - integral(p, r, h, kCells / 2));

  // growth of the integral over the decades [1e-8, 1e-6] and [1e-10, 1e-8]
  const double outer = integral(p, r, 1e-8, kCells, 1e-6);
  const double inner = integral(p, r, 1e-10, kCells, 1e-8);
  std::ostringstream v;
  if (!(outer > 0) || !(inner > 0)) {
    out.tail_exponent = INFINITY;
    out.convergent = true;
    v << "convergent: the profile vanishes near the origin";
  } else {
    out.tail_exponent = -1.0 - std::log(inner / outer) / std::log(100.0);
    out.convergent = out.tail_exponent > -1.0 + 1e-6;
    v.precision(6);
    if (out.convergent)
      v << "convergent: integrand ~ |x|^" << out.tail_exponent << " is integrable at 0";
    else if (std::abs(out.tail_exponent + 1.0) < 1e-3)
      v << "divergent: I(h) grows like log(1/h)";
    else
      v << "divergent: I(h) grows like h^" << 1.0 + out.tail_exponent;
  }
  out.verdict = v.str();
  return out;
}

}  // namespace nilmix::fracsolve
