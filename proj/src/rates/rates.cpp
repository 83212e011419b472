#include "nilmix/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nilmix::rates {

namespace {

CertifiedReal scaled(const CertifiedReal& x, double f) {
  CertifiedReal out;
  out.value = x.value * f;
  out.radius = x.radius * std::abs(f);
  out.exact = x.exact;
  return out;
}

CertifiedReal abs_of(const CertifiedReal& x) {
  CertifiedReal out = x;
  out.value = std::abs(x.value);
  return out;
}

const CertifiedReal& min_of(const CertifiedReal& a, const CertifiedReal& b) { return b.value < a.value ? b : a; }

double euclid(const IntVector& a, const IntVector& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = static_cast<double>(a[k] - b[k]);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

RateReport rho_chi(const NilpotentAlgebra& a, const RationalMatrix& m, unsigned bits) {
  auto cls = nilalg::classify(a, m, bits);
  if (!cls.ergodic) throw PreconditionError("rates need an ergodic automorphism");
  RateReport out;
  auto abel = exactlin::lyapunov_data(cls.abelianization, bits);
  bool first = true;
  for (const auto& idx : abel.by_primary()) {
    const auto& lo = abel.subspaces[idx.front()].exponent;
    const auto& hi = abel.subspaces[idx.back()].exponent;
    out.rho_min.push_back(lo);
    out.rho_max.push_back(hi);
    CertifiedReal block = hi.value >= std::abs(lo.value) ? hi : abs_of(lo);
    out.rho = first ? block : min_of(out.rho, block);
    first = false;
  }
  bool have_chi = false;
  for (const auto& b : cls.lyapunov.blocks) {
    for (std::size_t k = 0; k < b.multiplicity; ++k) out.exponents.push_back(b.exponent.value);
    if (b.exponent.certified_zero()) continue;
    if (b.exponent.lo() <= 0.0 && b.exponent.hi() >= 0.0)
      throw PrecisionError("Lyapunov exponent not separated from zero", cls.lyapunov.precision_bits);
    CertifiedReal v = abs_of(b.exponent);
    out.chi = have_chi ? min_of(out.chi, v) : v;
    have_chi = true;
  }
  if (!have_chi) throw PreconditionError("all Lyapunov exponents vanish");
  out.delta = cls.rational_type ? 1u : 0u;
  out.s0 = static_cast<unsigned>(a.dim()) + 1;
  out.rho0 = min_of(scaled(out.chi, 0.5), scaled(out.rho, 0.25));
  auto series = nilalg::central_series(a);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) out.layer_dims.push_back(series[i].dim() - series[i + 1].dim());
  return out;
}

SobolevOrders sobolev_orders(const RateReport& report, double r) {
  if (!(r > 0)) throw InputError("order r must be positive");
  SobolevOrders out;
  for (auto d : report.layer_dims) {
    out.s_i.push_back(r * static_cast<double>(d));
    out.s = std::max(out.s, out.s_i.back());
  }
  return out;
}

double Envelope::operator()(double m, double c1, double c2) const {
  const double am = std::abs(m);
  return c1 * std::exp(-rate1 * am) + (delta ? c2 * std::exp(-rate2 * am) : 0.0);
}

Envelope order2_envelope(const RateReport& report, double r, double eps) {
  if (!(r > 0)) throw InputError("order r must be positive");
  const double cap = std::min(report.chi.value, report.rho.value / 2);
  if (!(eps > 0) || !(eps < cap))
    throw InputError("eps must lie in (0, min{chi, rho/2}) = (0, " + std::to_string(cap) + ")");
  Envelope e;
  e.r = r;
  e.eps = eps;
  e.delta = report.delta;
  e.rate1 = (report.chi.value - eps) * r;
  e.rate2 = report.rho.value / 2 - eps;
  return e;
}

HolderRate holder_rate(const RateReport& report, double s) {
  if (!(s > 0)) throw InputError("Holder exponent s must be positive");
  HolderRate h;
  h.s0 = report.s0;
  h.rho0 = report.rho0.value;
  h.gamma = std::min(s * h.rho0 / (4.0 * h.s0), h.rho0 / 2);
  if (s >= 1) h.warning = "s >= 1 lies outside the range 0 < s < 1 where the Holder bound applies";
  return h;
}

double TimeTuple::gap() const {
  if (times.size() < 2) throw InputError("time tuple needs at least two times");
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < times.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) g = std::min(g, euclid(times[i], times[j]));
  return g;
}

double TimeTuple::max_gap() const {
  double g = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) g = std::max(g, euclid(times[i], times[j]));
  return g;
}

IntVector TimeTuple::flat() const {
  IntVector out;
  for (const auto& t : times) out.insert(out.end(), t.begin(), t.end());
  return out;
}

ThetaReport theta(const FunctionalSet& fs, const TimeTuple& tuple) {
  const std::size_t l = fs.generators.size();
  if (tuple.size() < 2) throw InputError("time tuple needs at least two times");
  for (const auto& t : tuple.times)
    if (t.size() != l) throw InputError("time vector length differs from the action rank");
  ThetaReport out;
  out.theta.value = std::numeric_limits<double>::infinity();
  bool any_nonzero = false;
  for (const auto& f : fs.functionals) any_nonzero = any_nonzero || !f.zero;
  for (std::size_t i = 0; i < tuple.size(); ++i)
    for (std::size_t j = i + 1; j < tuple.size(); ++j) {
      IntVector d(l);
      std::int64_t g = 0;
      for (std::size_t k = 0; k < l; ++k) {
        d[k] = tuple.times[i][k] - tuple.times[j][k];
        g = std::gcd(g, d[k]);
      }
      if (g == 0) throw DegenerateError("time tuple has coincident times " + std::to_string(i) + " and " +
                                        std::to_string(j));
      // reducing by the gcd makes the value exactly invariant under scaling
      for (auto& x : d) x /= g;
      double norm = 0;
      for (auto x : d) norm += static_cast<double>(x) * static_cast<double>(x);
      norm = std::sqrt(norm);
      PairTheta p{i, j, std::numeric_limits<double>::infinity(), true};
      double radius = 0.0;
      for (std::size_t c = 0; c < fs.functionals.size(); ++c) {
        if (fs.functionals[c].zero) continue;
        auto v = fs.functionals[c].evaluate(d);
        double val = std::abs(v.value) / norm;
        double rad = v.radius / norm;
        if (v.lo() <= 0.0 && v.hi() >= 0.0 && fs.sign(c, d) == 0) {
          val = 0.0;
          rad = 0.0;
          p.regular = false;
        }
        if (val < p.value) {
          p.value = val;
          radius = rad;
        }
      }
      if (!any_nonzero) p.value = 0.0;
      out.regular = out.regular && p.regular;
      if (p.value < out.theta.value) {
        out.theta.value = p.value;
        out.theta.radius = radius;
      }
      out.pairs.push_back(p);
    }
  if (!any_nonzero) out.theta.value = 0.0;
  out.theta.exact = out.theta.value == 0.0 && out.theta.radius == 0.0;
  return out;
}

}  // namespace nilmix::rates
