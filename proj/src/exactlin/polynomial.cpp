#include "nilmix/exactlin.hpp"

#include <sstream>

namespace nilmix::exactlin {

Polynomial::Polynomial(RationalVector coeffs) : c_(std::move(coeffs)) { trim(); }

Polynomial Polynomial::from_ints(std::initializer_list<long> ascending) {
  RationalVector c;
  for (long v : ascending) c.emplace_back(v);
  return Polynomial(std::move(c));
}

Polynomial Polynomial::monomial(unsigned degree, const Rational& c) {
  RationalVector v(degree + 1, Rational(0));
  v[degree] = c;
  return Polynomial(std::move(v));
}

Polynomial Polynomial::constant(const Rational& c) { return Polynomial(RationalVector{c}); }

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

bool Polynomial::is_integral() const {
  for (const auto& x : c_)
    if (denominator(x) != 1) return false;
  return true;
}

Polynomial Polynomial::monic() const {
  if (is_zero()) return *this;
  Polynomial p = *this;
  Rational lc = leading();
  for (auto& x : p.c_) x /= lc;
  return p;
}

Polynomial Polynomial::primitive() const {
  if (is_zero()) return *this;
  RationalVector v = primitive_integer(c_);
  if (v.back() < 0)
    for (auto& x : v) x = -x;
  return Polynomial(std::move(v));
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return {};
  RationalVector d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::reflect() const {
  Polynomial p = *this;
  for (std::size_t i = 1; i < p.c_.size(); i += 2) p.c_[i] = -p.c_[i];
  return p;
}

Polynomial Polynomial::reciprocal() const {
  RationalVector v(c_.rbegin(), c_.rend());
  return Polynomial(std::move(v));
}

Rational Polynomial::evaluate(const Rational& x) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

RationalMatrix Polynomial::evaluate(const RationalMatrix& m) const {
  if (!m.is_square()) throw InputError("polynomial evaluated at non-square matrix");
  const std::size_t n = m.rows();
  RationalMatrix acc(n, n);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    acc = acc * m;
    for (std::size_t i = 0; i < n; ++i) acc(i, i) += *it;
  }
  return acc;
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& d) const {
  if (d.is_zero()) throw InputError("polynomial division by zero");
  if (degree() < d.degree()) return {Polynomial(), *this};
  RationalVector rem = c_;
  RationalVector quot(c_.size() - d.c_.size() + 1, Rational(0));
  const Rational& lc = d.leading();
  for (int k = static_cast<int>(quot.size()) - 1; k >= 0; --k) {
    Rational q = rem[k + d.c_.size() - 1] / lc;
    quot[k] = q;
    if (q == 0) continue;
    for (std::size_t j = 0; j < d.c_.size(); ++j) rem[k + j] -= q * d.c_[j];
  }
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

std::string Polynomial::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const Rational& c = c_[k];
    if (c == 0) continue;
    Rational a = abs(c);
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    if (a != 1 || k == 0) os << a;
    if (k >= 1) os << var;
    if (k >= 2) os << '^' << k;
    first = false;
  }
  return os.str();
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  RationalVector c(std::max(a.c_.size(), b.c_.size()), Rational(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  RationalVector c(std::max(a.c_.size(), b.c_.size()), Rational(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
  return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  RationalVector c(a.c_.size() + b.c_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  }
  return Polynomial(std::move(c));
}

Polynomial pow(const Polynomial& p, unsigned e) {
  Polynomial r = Polynomial::constant(1);
  Polynomial b = p;
  while (e) {
    if (e & 1u) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

Polynomial gcd(const Polynomial& a, const Polynomial& b) {
  Polynomial x = a, y = b;
  while (!y.is_zero()) {
    Polynomial r = x.divmod(y).second;
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

bool canonical_less(const Polynomial& a, const Polynomial& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  for (std::size_t i = 0; i < a.coeffs().size(); ++i)
    if (a.coeffs()[i] != b.coeffs()[i]) return a.coeffs()[i] < b.coeffs()[i];
  return false;
}

// Faddeev-LeVerrier recursion, exact over Q.
Polynomial char_poly(const RationalMatrix& m) {
  if (!m.is_square()) throw InputError("characteristic polynomial of non-square matrix");
  const std::size_t n = m.rows();
  RationalVector c(n + 1, Rational(0));
  c[n] = 1;
  RationalMatrix mk(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    RationalMatrix next = m * mk;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    mk = std::move(next);
    c[n - k] = -(m * mk).trace() / static_cast<long>(k);
  }
  return Polynomial(std::move(c));
}

std::vector<Polynomial> squarefree_decomposition(const Polynomial& p) {
  if (p.is_zero()) throw InputError("square-free decomposition of zero");
  std::vector<Polynomial> out;
  Polynomial f = p.monic();
  if (f.degree() == 0) return out;
  // Yun's algorithm.
  Polynomial df = f.derivative();
  Polynomial a = gcd(f, df);
  Polynomial b = f.divmod(a).first;
  Polynomial c = df.divmod(a).first;
  Polynomial d = c - b.derivative();
  while (b.degree() > 0) {
    Polynomial g = gcd(b, d);
    out.push_back(g);
    b = b.divmod(g).first;
    c = d.divmod(g).first;
    d = c - b.derivative();
  }
  return out;
}

unsigned euler_totient(unsigned n) {
  unsigned result = n;
  for (unsigned p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    result -= result / p;
  }
  if (n > 1) result -= result / n;
  return result;
}

Polynomial cyclotomic(unsigned d) {
  if (d == 0) throw InputError("cyclotomic order must be positive");
  // Phi_d = prod_{e | d} (x^e - 1)^{mu(d/e)}
  auto mobius = [](unsigned n) {
    int mu = 1;
    for (unsigned p = 2; p * p <= n; ++p) {
      if (n % p) continue;
      n /= p;
      if (n % p == 0) return 0;
      mu = -mu;
    }
    return n > 1 ? -mu : mu;
  };
  Polynomial num = Polynomial::constant(1);
  Polynomial den = Polynomial::constant(1);
  for (unsigned e = 1; e <= d; ++e) {
    if (d % e) continue;
    const int mu = mobius(d / e);
    Polynomial term = Polynomial::monomial(e) - Polynomial::constant(1);
    if (mu == 1) num = num * term;
    else if (mu == -1) den = den * term;
  }
  return num.divmod(den).first;
}

std::optional<unsigned> is_cyclotomic(const Polynomial& q) {
  if (q.degree() < 1 || !q.is_monic() || !q.is_integral())
    throw InputError("cyclotomic test needs a monic integer polynomial of positive degree");
  if (!is_irreducible(q)) throw InputError("cyclotomic test needs an irreducible polynomial: " + q.to_string());
  const unsigned deg = static_cast<unsigned>(q.degree());
  // phi(d) >= sqrt(d/2), so phi(d) = deg forces d <= 2 deg^2.
  const unsigned bound = 2 * deg * deg + 2;
  for (unsigned d = 1; d <= bound; ++d) {
    if (euler_totient(d) != deg) continue;
    if (cyclotomic(d) == q) return d;
  }
  return std::nullopt;
}

}  // namespace nilmix::exactlin
