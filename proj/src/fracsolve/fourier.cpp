#include "nilmix/fracsolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nilmix::fracsolve {

namespace {

void check_dim(std::size_t dim, const IntVector& z) {
  if (z.size() != dim) throw InputError("frequency has length " + std::to_string(z.size()) + ", expected " +
                                        std::to_string(dim));
}

IntVector add_vec(const IntVector& a, const IntVector& b) {
  IntVector out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
  return out;
}

IntVector neg_vec(const IntVector& a) {
  IntVector out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = -a[k];
  return out;
}

double norm(const IntVector& z) {
  double s = 0;
  for (auto x : z) s += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(s);
}

}  // namespace

void FourierObservable::set(const IntVector& z, Complex c) {
  check_dim(dim_, z);
  if (c == Complex(0.0))
    coeffs_.erase(z);
  else
    coeffs_[z] = c;
}

void FourierObservable::add(const IntVector& z, Complex c) { set(z, at(z) + c); }

Complex FourierObservable::at(const IntVector& z) const {
  auto it = coeffs_.find(z);
  return it == coeffs_.end() ? Complex(0.0) : it->second;
}

bool FourierObservable::mean_zero() const { return at(IntVector(dim_, 0)) == Complex(0.0); }

double FourierObservable::support_radius() const {
  double r = 0;
  for (const auto& [z, c] : coeffs_) r = std::max(r, norm(z));
  return r;
}

double FourierObservable::max_abs() const {
  double m = 0;
  for (const auto& [z, c] : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

FourierObservable FourierObservable::operator+(const FourierObservable& other) const {
  if (other.dim_ != dim_) throw InputError("observable dimensions differ");
  FourierObservable out = *this;
  for (const auto& [z, c] : other.coeffs_) out.add(z, c);
  return out;
}

FourierObservable FourierObservable::operator*(Complex a) const {
  FourierObservable out(dim_);
  for (const auto& [z, c] : coeffs_) out.set(z, a * c);
  return out;
}

FourierObservable FourierObservable::product(const FourierObservable& other) const {
  if (other.dim_ != dim_) throw InputError("observable dimensions differ");
  std::map<IntVector, std::pair<CompensatedSum, CompensatedSum>> acc;
  for (const auto& [a, x] : coeffs_)
    for (const auto& [b, y] : other.coeffs_) {
      auto& s = acc[add_vec(a, b)];
      const Complex p = x * y;
      s.first.add(p.real());
      s.second.add(p.imag());
    }
  FourierObservable out(dim_);
  for (const auto& [z, s] : acc) out.set(z, {s.first.value(), s.second.value()});
  return out;
}

FourierObservable FourierObservable::conjugate() const {
  FourierObservable out(dim_);
  for (const auto& [z, c] : coeffs_) out.set(neg_vec(z), std::conj(c));
  return out;
}

Complex FourierObservable::inner(const FourierObservable& other) const {
  if (other.dim_ != dim_) throw InputError("observable dimensions differ");
  CompensatedSum re, im;
  for (const auto& [z, c] : coeffs_) {
    const Complex p = c * std::conj(other.at(z));
    re.add(p.real());
    im.add(p.imag());
  }
  return {re.value(), im.value()};
}

void ExactObservable::set(const IntVector& z, const GaussianRational& c) {
  check_dim(dim_, z);
  if (c.is_zero())
    coeffs_.erase(z);
  else
    coeffs_[z] = c;
}

GaussianRational ExactObservable::at(const IntVector& z) const {
  auto it = coeffs_.find(z);
  return it == coeffs_.end() ? GaussianRational() : it->second;
}

bool ExactObservable::mean_zero() const { return at(IntVector(dim_, 0)).is_zero(); }

ExactObservable ExactObservable::product(const ExactObservable& other) const {
  if (other.dim_ != dim_) throw InputError("observable dimensions differ");
  std::map<IntVector, GaussianRational> acc;
  for (const auto& [a, x] : coeffs_)
    for (const auto& [b, y] : other.coeffs_) {
      auto& s = acc[add_vec(a, b)];
      s = s + x * y;
    }
  ExactObservable out(dim_);
  for (const auto& [z, c] : acc) out.set(z, c);
  return out;
}

FourierObservable ExactObservable::to_double() const {
  FourierObservable out(dim_);
  for (const auto& [z, c] : coeffs_) out.set(z, c.to_complex());
  return out;
}

ExactObservable ExactObservable::from_double(const FourierObservable& f) {
  ExactObservable out(f.dim());
  for (const auto& [z, c] : f.coeffs()) out.set(z, {Rational(c.real()), Rational(c.imag())});
  return out;
}

FourierObservable cos_mode(const IntVector& k, double amplitude) {
  FourierObservable f(k.size());
  f.add(k, amplitude / 2);
  f.add(neg_vec(k), amplitude / 2);
  return f;
}

FourierObservable sin_mode(const IntVector& k, double amplitude) {
  FourierObservable f(k.size());
  f.add(k, Complex(0, -amplitude / 2));
  f.add(neg_vec(k), Complex(0, amplitude / 2));
  return f;
}

ExactObservable exact_cos_mode(const IntVector& k) {
  ExactObservable f(k.size());
  const Rational half(1, 2);
  f.set(k, f.at(k) + GaussianRational(half));
  const auto mk = neg_vec(k);
  f.set(mk, f.at(mk) + GaussianRational(half));
  return f;
}

ExactObservable exact_sin_mode(const IntVector& k) {
  ExactObservable f(k.size());
  const Rational half(1, 2);
  f.set(k, f.at(k) + GaussianRational(0, -half));
  const auto mk = neg_vec(k);
  f.set(mk, f.at(mk) + GaussianRational(0, half));
  return f;
}

std::pair<FourierObservable, FourierObservable> project_torus_factor(const FourierObservable& f,
                                                                      const std::vector<RationalVector>& directions) {
  for (const auto& t : directions)
    if (t.size() != f.dim()) throw InputError("direction length differs from the torus dimension");
  FourierObservable fo(f.dim()), fp(f.dim());
  for (const auto& [z, c] : f.coeffs()) {
    bool annihilated = true;
    for (const auto& t : directions) {
      Rational s = 0;
      for (std::size_t k = 0; k < z.size(); ++k) s += t[k] * z[k];
      annihilated = annihilated && s == 0;
    }
    (annihilated ? fo : fp).set(z, c);
  }
  return {fo, fp};
}

DirectionBasis DirectionBasis::rational(const std::vector<RationalVector>& dirs) {
  DirectionBasis b;
  b.exact = dirs;
  for (const auto& d : dirs) {
    std::vector<double> x;
    for (const auto& q : d) x.push_back(q.convert_to<double>());
    b.v.push_back(std::move(x));
  }
  return b;
}

double DirectionBasis::dot(std::size_t i, const IntVector& z) const {
  const auto& vi = v.at(i);
  if (vi.size() != z.size()) throw InputError("direction length differs from the frequency length");
  long double s = 0;
  for (std::size_t k = 0; k < z.size(); ++k) s += static_cast<long double>(z[k]) * vi[k];
  return static_cast<double>(s);
}

bool DirectionBasis::resonant(std::size_t i, const IntVector& z) const {
  if (!exact.empty()) {
    Rational s = 0;
    for (std::size_t k = 0; k < z.size(); ++k) s += exact[i][k] * z[k];
    return s == 0;
  }
  double nv = 0;
  for (auto x : v[i]) nv += x * x;
  return std::abs(dot(i, z)) < 1e-15 * norm(z) * std::sqrt(nv);
}

SmallDivisorSplit split_small_divisor(const FourierObservable& f, const DirectionBasis& v) {
  if (v.size() == 0) throw InputError("small-divisor split needs at least one direction");
  SmallDivisorSplit out{FourierObservable(f.dim()), FourierObservable(f.dim()), FourierObservable(f.dim()), {}};
  const IntVector origin(f.dim(), 0);
  for (const auto& [z, c] : f.coeffs()) {
    if (z == origin) {
      out.zero.set(z, c);
      continue;
    }
    double total = 0, best = -1;
    std::size_t sel = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double a = std::abs(v.dot(i, z));
      total += a;
      if (a > best) {
        best = a;
        sel = i;
      }
    }
    out.selector[z] = sel;
    (total >= 1.0 ? out.large : out.small).set(z, c);
  }
  return out;
}

double sobolev_norm(const FourierObservable& f, double s) {
  if (!(s >= 0)) throw InputError("Sobolev order must be nonnegative");
  const double c = 4 * std::numbers::pi * std::numbers::pi;
  CompensatedSum sum;
  for (const auto& [z, a] : f.coeffs()) {
    const double n = norm(z);
    sum.add(std::pow(1 + c * n * n, s) * std::norm(a));
  }
  return std::sqrt(sum.value());
}

double partial_sobolev_norm(const FourierObservable& f, double s, const DirectionBasis& v) {
  if (!(s >= 0)) throw InputError("Sobolev order must be nonnegative");
  const double c = 4 * std::numbers::pi * std::numbers::pi;
  CompensatedSum sum;
  for (const auto& [z, a] : f.coeffs()) {
    double w = 1;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double d = v.dot(i, z);
      w += c * d * d;
    }
    sum.add(std::pow(w, s) * std::norm(a));
  }
  return std::sqrt(sum.value());
}

double small_divisor_bound(const FourierObservable& f, double c, std::size_t t, double r) {
  if (!(c > 0)) throw InputError("Diophantine constant must be positive");
  return std::pow(c / static_cast<double>(t), -r) * std::pow(2 * std::numbers::pi, -r) *
         sobolev_norm(f, r * static_cast<double>(f.dim()));
}

}  // namespace nilmix::fracsolve
