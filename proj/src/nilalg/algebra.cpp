#include "nilmix/nilalg.hpp"

#include <algorithm>

namespace nilmix::nilalg {

NilpotentAlgebra::NilpotentAlgebra(std::size_t dim, std::vector<std::size_t> layer_starts)
    : dim_(dim), layer_starts_(std::move(layer_starts)), c_(dim * dim, RationalVector(dim, Rational(0))) {
  if (dim == 0) throw InputError("algebra dimension must be positive");
  if (layer_starts_.empty() || layer_starts_.front() != 0)
    throw InputError("layer boundaries must start at index 0");
  for (std::size_t i = 1; i < layer_starts_.size(); ++i)
    if (layer_starts_[i] <= layer_starts_[i - 1] || layer_starts_[i] >= dim)
      throw InputError("layer boundaries must be strictly increasing and inside the basis");
}

NilpotentAlgebra NilpotentAlgebra::abelian(std::size_t dim) { return NilpotentAlgebra(dim, {0}); }

void NilpotentAlgebra::set_bracket(std::size_t i, std::size_t j, const RationalVector& value) {
  if (i >= dim_ || j >= dim_ || value.size() != dim_) throw InputError("bracket index or value out of range");
  if (i == j) {
    for (const auto& x : value)
      if (x != 0) throw InputError("[e_i, e_i] must vanish");
    return;
  }
  c_[i * dim_ + j] = value;
  RationalVector neg(dim_);
  for (std::size_t k = 0; k < dim_; ++k) neg[k] = -value[k];
  c_[j * dim_ + i] = neg;
}

void NilpotentAlgebra::set_constant(std::size_t i, std::size_t j, std::size_t k, const Rational& value) {
  if (i >= dim_ || j >= dim_ || k >= dim_) throw InputError("structure constant index out of range");
  c_[i * dim_ + j][k] = value;
}

std::size_t NilpotentAlgebra::layer_of(std::size_t i) const {
  auto it = std::upper_bound(layer_starts_.begin(), layer_starts_.end(), i);
  return static_cast<std::size_t>(it - layer_starts_.begin());
}

std::vector<std::size_t> NilpotentAlgebra::layer(std::size_t j) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dim_; ++i)
    if (layer_of(i) == j) out.push_back(i);
  return out;
}

RationalSubspace NilpotentAlgebra::layers_from(std::size_t j) const {
  std::vector<RationalVector> e;
  for (std::size_t i = 0; i < dim_; ++i)
    if (layer_of(i) >= j) {
      RationalVector v(dim_, Rational(0));
      v[i] = 1;
      e.push_back(std::move(v));
    }
  return RationalSubspace::span(e, dim_);
}

RationalVector NilpotentAlgebra::bracket(const RationalVector& x, const RationalVector& y) const {
  if (x.size() != dim_ || y.size() != dim_) throw InputError("bracket arguments have wrong length");
  RationalVector out(dim_, Rational(0));
  for (std::size_t i = 0; i < dim_; ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < dim_; ++j) {
      if (y[j] == 0) continue;
      Rational s = x[i] * y[j];
      const auto& c = c_[i * dim_ + j];
      for (std::size_t k = 0; k < dim_; ++k)
        if (c[k] != 0) out[k] += s * c[k];
    }
  }
  return out;
}

const Check* Diagnostics::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<RationalSubspace> central_series(const NilpotentAlgebra& a) {
  const std::size_t n = a.dim();
  std::vector<RationalSubspace> series{RationalSubspace::whole(n)};
  while (!series.back().is_zero()) {
    std::vector<RationalVector> gens;
    for (const auto& x : series.back().basis())
      for (std::size_t k = 0; k < n; ++k) {
        RationalVector e(n, Rational(0));
        e[k] = 1;
        gens.push_back(a.bracket(x, e));
      }
    auto next = RationalSubspace::span(gens, n);
    if (next == series.back()) break;  // not nilpotent; reported by validate_algebra
    series.push_back(std::move(next));
  }
  return series;
}

Diagnostics validate_algebra(const NilpotentAlgebra& a) {
  Diagnostics d;
  const std::size_t n = a.dim();
  auto unit = [n](std::size_t i) {
    RationalVector e(n, Rational(0));
    e[i] = 1;
    return e;
  };

  Check anti{"antisymmetry", true, {}, {}};
  for (std::size_t i = 0; i < n && anti.passed; ++i)
    for (std::size_t j = i; j < n && anti.passed; ++j) {
      const auto& x = a.bracket(i, j);
      const auto& y = a.bracket(j, i);
      for (std::size_t k = 0; k < n; ++k)
        if (x[k] != -y[k]) {
          anti.passed = false;
          anti.detail = "[e" + std::to_string(i) + ",e" + std::to_string(j) + "] != -[e" + std::to_string(j) +
                        ",e" + std::to_string(i) + "]";
          anti.witness = {i, j, k};
          break;
        }
    }
  d.checks.push_back(anti);

  Check jacobi{"jacobi", true, {}, {}};
  for (std::size_t i = 0; i < n && jacobi.passed; ++i)
    for (std::size_t j = i + 1; j < n && jacobi.passed; ++j)
      for (std::size_t k = j + 1; k < n && jacobi.passed; ++k) {
        auto ei = unit(i), ej = unit(j), ek = unit(k);
        auto t1 = a.bracket(ei, a.bracket(ej, ek));
        auto t2 = a.bracket(ej, a.bracket(ek, ei));
        auto t3 = a.bracket(ek, a.bracket(ei, ej));
        for (std::size_t c = 0; c < n; ++c)
          if (t1[c] + t2[c] + t3[c] != 0) {
            jacobi.passed = false;
            jacobi.detail = "Jacobi identity fails on (e" + std::to_string(i) + ",e" + std::to_string(j) + ",e" +
                            std::to_string(k) + ")";
            jacobi.witness = {i, j, k};
            break;
          }
      }
  d.checks.push_back(jacobi);

  Check malcev{"malcev-ordering", true, {}, {}};
  for (std::size_t i = 0; i < n && malcev.passed; ++i)
    for (std::size_t j = 0; j < n && malcev.passed; ++j) {
      const std::size_t depth = std::max(a.layer_of(i), a.layer_of(j));
      const auto& c = a.bracket(i, j);
      for (std::size_t k = 0; k < n; ++k)
        if (c[k] != 0 && a.layer_of(k) <= depth) {
          malcev.passed = false;
          malcev.detail = "[e" + std::to_string(i) + ",e" + std::to_string(j) + "] has a component on e" +
                          std::to_string(k) + " outside the deeper layers";
          malcev.witness = {i, j, k};
          break;
        }
    }
  d.checks.push_back(malcev);

  auto series = central_series(a);
  Check nil{"nilpotency", true, {}, {}};
  if (!series.back().is_zero()) {
    nil.passed = false;
    nil.detail = "descending central series stabilizes at dimension " + std::to_string(series.back().dim());
  }
  d.checks.push_back(nil);

  Check layers{"central-series-layers", true, {}, {}};
  if (nil.passed) {
    const std::size_t k = series.size() - 1;
    if (k != a.layer_count() && !(k == 0 && a.layer_count() == 1)) {
      layers.passed = false;
      layers.detail = "step " + std::to_string(k) + " but " + std::to_string(a.layer_count()) + " layers declared";
    } else {
      for (std::size_t j = 1; j <= a.layer_count() && j <= k; ++j)
        if (!(series[j - 1] == a.layers_from(j))) {
          layers.passed = false;
          layers.detail = "n_" + std::to_string(j) + " differs from the span of layers >= " + std::to_string(j);
          layers.witness = {j};
          break;
        }
    }
  } else {
    layers.passed = false;
    layers.detail = "not nilpotent";
  }
  d.checks.push_back(layers);

  d.step = nil.passed ? static_cast<unsigned>(series.size() - 1) : 0;
  for (const auto& c : d.checks) d.ok = d.ok && c.passed;
  return d;
}

}  // namespace nilmix::nilalg
