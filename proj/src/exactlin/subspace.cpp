#include "nilmix/exactlin.hpp"

namespace nilmix::exactlin {

namespace {

std::size_t pivot_of(const RationalVector& row) {
  for (std::size_t j = 0; j < row.size(); ++j)
    if (row[j] != 0) return j;
  return row.size();
}

// Extended gcd on integers: s*a + t*b = g >= 0.
void ext_gcd(const Integer& a, const Integer& b, Integer& g, Integer& s, Integer& t) {
  Integer old_r = a, r = b, old_s = 1, s1 = 0, old_t = 0, t1 = 1;
  while (r != 0) {
    Integer q = old_r / r;
    Integer tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s1;
    old_s = s1;
    s1 = tmp;
    tmp = old_t - q * t1;
    old_t = t1;
    t1 = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  g = old_r;
  s = old_s;
  t = old_t;
}

}  // namespace

RationalSubspace RationalSubspace::span(const std::vector<RationalVector>& vectors, std::size_t ambient) {
  RationalSubspace s(ambient);
  if (vectors.empty()) return s;
  RationalMatrix m(vectors.size(), ambient);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != ambient) throw InputError("subspace vector has wrong length");
    for (std::size_t j = 0; j < ambient; ++j) m(i, j) = vectors[i][j];
  }
  auto piv = rref(m);
  for (std::size_t r = 0; r < piv.size(); ++r) s.basis_.push_back(m.row(r));
  return s;
}

RationalSubspace RationalSubspace::whole(std::size_t ambient) {
  std::vector<RationalVector> e;
  for (std::size_t i = 0; i < ambient; ++i) {
    RationalVector v(ambient, Rational(0));
    v[i] = 1;
    e.push_back(std::move(v));
  }
  return span(e, ambient);
}

std::vector<RationalVector> RationalSubspace::integer_basis() const {
  std::vector<RationalVector> out;
  for (const auto& b : basis_) out.push_back(primitive_integer(b));
  return out;
}

bool RationalSubspace::contains(const RationalVector& v) const {
  if (v.size() != ambient_) throw InputError("membership test with wrong length");
  RationalVector w = v;
  for (const auto& row : basis_) {
    std::size_t p = pivot_of(row);
    if (w[p] == 0) continue;
    Rational f = w[p];
    for (std::size_t j = p; j < ambient_; ++j) w[j] -= f * row[j];
  }
  for (const auto& x : w)
    if (x != 0) return false;
  return true;
}

bool RationalSubspace::contains(const RationalSubspace& other) const {
  for (const auto& b : other.basis_)
    if (!contains(b)) return false;
  return true;
}

RationalSubspace RationalSubspace::orthogonal_complement() const {
  if (basis_.empty()) return whole(ambient_);
  RationalMatrix m(basis_.size(), ambient_);
  for (std::size_t i = 0; i < basis_.size(); ++i)
    for (std::size_t j = 0; j < ambient_; ++j) m(i, j) = basis_[i][j];
  return span(m.kernel(), ambient_);
}

RationalSubspace RationalSubspace::intersect(const RationalSubspace& other) const {
  if (other.ambient_ != ambient_) throw InputError("intersection of subspaces in different spaces");
  return orthogonal_complement().sum(other.orthogonal_complement()).orthogonal_complement();
}

RationalSubspace RationalSubspace::sum(const RationalSubspace& other) const {
  if (other.ambient_ != ambient_) throw InputError("sum of subspaces in different spaces");
  std::vector<RationalVector> all = basis_;
  all.insert(all.end(), other.basis_.begin(), other.basis_.end());
  return span(all, ambient_);
}

RationalSubspace RationalSubspace::image(const RationalMatrix& m) const {
  std::vector<RationalVector> imgs;
  for (const auto& b : basis_) imgs.push_back(m.apply(b));
  return span(imgs, m.rows());
}

std::vector<RationalVector> RationalSubspace::lattice_basis() const {
  const std::size_t n = ambient_;
  // Integer constraint rows whose common kernel is this subspace.
  std::vector<RationalVector> cons = orthogonal_complement().integer_basis();
  std::vector<std::vector<Integer>> a(cons.size(), std::vector<Integer>(n));
  for (std::size_t i = 0; i < cons.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = numerator(cons[i][j]);
  std::vector<std::vector<Integer>> u(n, std::vector<Integer>(n, 0));
  for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;

  // Unimodular column operations bring the constraints to column echelon form;
  // the untouched trailing columns of U then span the integer kernel.
  std::size_t col = 0;
  for (std::size_t i = 0; i < a.size() && col < n; ++i) {
    for (std::size_t j = col + 1; j < n; ++j) {
      if (a[i][j] == 0) continue;
      Integer g, s, t;
      ext_gcd(a[i][col], a[i][j], g, s, t);
      Integer p = a[i][col] / g, q = a[i][j] / g;
      for (std::size_t r = 0; r < a.size(); ++r) {
        Integer x = a[r][col], y = a[r][j];
        a[r][col] = s * x + t * y;
        a[r][j] = -q * x + p * y;
      }
      for (std::size_t r = 0; r < n; ++r) {
        Integer x = u[r][col], y = u[r][j];
        u[r][col] = s * x + t * y;
        u[r][j] = -q * x + p * y;
      }
    }
    if (a[i][col] != 0) ++col;
  }
  std::vector<RationalVector> basis;
  for (std::size_t j = col; j < n; ++j) {
    RationalVector v(n);
    for (std::size_t r = 0; r < n; ++r) v[r] = Rational(u[r][j]);
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace nilmix::exactlin
