#include "nilmix/nilalg.hpp"

namespace nilmix::nilalg {

Diagnostics validate_automorphism(const NilpotentAlgebra& a, const RationalMatrix& m) {
  Diagnostics d;
  const std::size_t n = a.dim();
  Check dims{"dimensions", true, {}, {}};
  if (m.rows() != n || m.cols() != n) {
    dims.passed = false;
    dims.detail = "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", algebra has dim " +
                  std::to_string(n);
    d.checks.push_back(dims);
    d.ok = false;
    return d;
  }
  d.checks.push_back(dims);

  Check uni{"unimodular-integer", true, {}, {}};
  if (!m.is_integer()) {
    uni.passed = false;
    uni.detail = "matrix has non-integer entries";
  } else if (!m.is_unimodular_integer()) {
    uni.passed = false;
    uni.detail = "determinant is " + m.determinant().str() + ", expected +1 or -1";
  }
  d.checks.push_back(uni);

  Check hom{"bracket-preservation", true, {}, {}};
  for (std::size_t i = 0; i < n && hom.passed; ++i)
    for (std::size_t j = i + 1; j < n && hom.passed; ++j) {
      auto lhs = a.bracket(m.column(i), m.column(j));
      auto rhs = m.apply(a.bracket(i, j));
      if (lhs != rhs) {
        hom.passed = false;
        hom.detail = "[Me" + std::to_string(i) + ", Me" + std::to_string(j) + "] != M[e" + std::to_string(i) + ", e" +
                     std::to_string(j) + "]";
        hom.witness = {i, j};
      }
    }
  d.checks.push_back(hom);
  for (const auto& c : d.checks) d.ok = d.ok && c.passed;
  return d;
}

RationalMatrix abelianization_action(const NilpotentAlgebra& a, const RationalMatrix& m) {
  if (m.rows() != a.dim() || m.cols() != a.dim()) throw InputError("automorphism dimension mismatch");
  auto first = a.layer(1);
  return m.submatrix(first, first);
}

RationalSubspace root_of_unity_part(const RationalMatrix& m) {
  auto pd = exactlin::primary_decomposition(m);
  std::vector<RationalVector> basis;
  for (const auto& b : pd.blocks)
    if (b.cyclotomic_order) basis.insert(basis.end(), b.basis.begin(), b.basis.end());
  return RationalSubspace::span(basis, m.rows());
}

SpectralClassification classify(const NilpotentAlgebra& a, const RationalMatrix& m, unsigned bits) {
  if (!m.is_square() || m.rows() != a.dim()) throw InputError("automorphism dimension mismatch");
  auto diag = validate_automorphism(a, m);
  if (!diag.ok) {
    for (const auto& c : diag.checks)
      if (!c.passed) throw PreconditionError("not a lattice automorphism: " + c.detail);
  }
  SpectralClassification out;
  out.abelianization = abelianization_action(a, m);
  out.abelian_primary = exactlin::primary_decomposition(out.abelianization);
  out.ergodic = true;
  for (const auto& b : out.abelian_primary.blocks)
    if (b.cyclotomic_order) out.ergodic = false;

  auto pd = exactlin::primary_decomposition(m);
  std::vector<RationalVector> b1, b2;
  for (const auto& b : pd.blocks) {
    auto& dst = b.cyclotomic_order ? b2 : b1;
    dst.insert(dst.end(), b.basis.begin(), b.basis.end());
  }
  out.n_z1 = RationalSubspace::span(b1, m.rows());
  out.n_z2 = RationalSubspace::span(b2, m.rows());
  out.rational_type = !out.n_z2.is_zero();
  out.lyapunov = exactlin::lyapunov_data(m, bits);
  out.w_minus = out.lyapunov.w_minus();
  out.w_zero = out.lyapunov.w_zero();
  out.w_plus = out.lyapunov.w_plus();
  return out;
}

RationalMatrix action_matrix(const std::vector<RationalMatrix>& generators, const IntVector& z) {
  if (generators.empty()) throw InputError("action needs at least one generator");
  if (z.size() != generators.size()) throw InputError("time vector length differs from the number of generators");
  RationalMatrix out = RationalMatrix::identity(generators.front().rows());
  for (std::size_t k = 0; k < z.size(); ++k)
    if (z[k] != 0) out = out * generators[k].power(z[k]);
  return out;
}

void require_commuting(const std::vector<RationalMatrix>& generators) {
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (!generators[i].is_square() || generators[i].rows() != generators.front().rows())
      throw InputError("generators must be square matrices of equal size");
    for (std::size_t j = 0; j < i; ++j)
      if (!(generators[i] * generators[j] == generators[j] * generators[i]))
        throw PreconditionError("generators " + std::to_string(j) + " and " + std::to_string(i) + " do not commute");
  }
}

ActionClassification classify_action(const NilpotentAlgebra& a, const std::vector<RationalMatrix>& generators) {
  require_commuting(generators);
  ActionClassification out;
  out.n2 = RationalSubspace::whole(a.dim());
  for (const auto& g : generators) {
    auto c = classify(a, g);
    out.n2 = out.n2.intersect(c.n_z2);
    out.has_ergodic_generator = out.has_ergodic_generator || c.ergodic;
  }
  out.rational_type = !out.n2.is_zero();
  return out;
}

}  // namespace nilmix::nilalg
