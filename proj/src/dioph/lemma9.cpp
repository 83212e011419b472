#include "nilmix/dioph.hpp"

#include <cmath>

namespace nilmix::dioph {

namespace {

using exactlin::RationalMatrix;
using exactlin::RationalSubspace;

// Coordinates c of a real vector x in the column basis B (least squares through
// the normal equations, exact Gram matrix).
RealVector coordinates(const std::vector<RationalVector>& basis, const RealVector& x, double* residual) {
  const std::size_t k = basis.size();
  const std::size_t n = x.size();
  RationalMatrix gram(k, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) gram(a, b) = exactlin::dot(basis[a], basis[b]);
  auto ginv = gram.inverse().to_real();
  RealVector rhs(k, Real(0));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t i = 0; i < n; ++i) rhs[a] += Real(numerator(basis[a][i])) / Real(denominator(basis[a][i])) * x[i];
  RealVector c(k, Real(0));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) c[a] += ginv[a][b] * rhs[b];
  Real res = 0, nx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Real y = 0;
    for (std::size_t a = 0; a < k; ++a) y += c[a] * Real(numerator(basis[a][i])) / Real(denominator(basis[a][i]));
    res += (y - x[i]) * (y - x[i]);
    nx += x[i] * x[i];
  }
  *residual = nx == 0 ? 0.0 : Real(sqrt(res / nx)).convert_to<double>();
  return c;
}

}  // namespace

Lemma9Report verify_lemma9(const RationalMatrix& m, double radius, unsigned bits) {
  if (!m.is_square() || !m.is_unimodular_integer())
    throw PreconditionError("subspace sweep needs an integer unimodular matrix");
  auto pd = exactlin::primary_decomposition(m);
  for (const auto& b : pd.blocks)
    if (b.cyclotomic_order)
      throw PreconditionError("matrix is not ergodic: factor " + b.factor.to_string() + " is cyclotomic");
  auto data = exactlin::lyapunov_data(m, bits);
  const std::size_t n = m.rows();

  Lemma9Report report;
  auto add = [&](DiophantineCertificate c, std::string label) {
    c.label = std::move(label);
    report.all_pass = report.all_pass && c.pass;
    report.certificates.push_back(std::move(c));
  };
  add(diophantine_certificate(data.block_max(), n, radius), "L_blockmax");
  add(diophantine_certificate(data.block_min(), n, radius), "L_blockmin");
  add(diophantine_certificate(data.w_plus(), n, radius), "W_plus");
  add(diophantine_certificate(data.w_minus(), n, radius), "W_minus");

  // z . v for z = B c in F_i with c integer equals c . (B^T v)
  auto groups = data.by_primary();
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto lattice = RationalSubspace::span(data.primary.blocks[i].basis, n).lattice_basis();
    const std::size_t k = lattice.size();
    for (std::size_t j = 0; j < groups[i].size(); ++j) {
      const auto& sub = data.subspaces[groups[i][j]];
      std::vector<RealVector> pulled;
      PrecisionScope scope(bits);
      for (const auto& v : sub.basis) {
        RealVector u(k, Real(0));
        for (std::size_t a = 0; a < k; ++a)
          for (std::size_t t = 0; t < n; ++t)
            if (lattice[a][t] != 0) u[a] += Real(numerator(lattice[a][t])) * v[t];
        pulled.push_back(std::move(u));
      }
      add(diophantine_certificate(pulled, k, radius),
          "L_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + " in F_" + std::to_string(i + 1));
    }
  }
  return report;
}

DiophantineCertificate type_i_subspace(const nilalg::NilpotentAlgebra& a, std::size_t layer,
                                       const std::vector<RealVector>& v, const std::vector<RationalVector>& e,
                                       double radius) {
  const std::size_t n = a.dim();
  if (layer < 1 || layer > a.layer_count()) throw InputError("layer index out of range");
  if (v.empty() || e.empty()) throw InputError("type-i certificate needs nonempty V and E");
  auto in_layer = a.layer(layer);
  for (const auto& w : e) {
    if (w.size() != n) throw InputError("E basis vector has wrong length");
    for (std::size_t t = 0; t < n; ++t)
      if (w[t] != 0 && a.layer_of(t) != layer) throw PreconditionError("E is not inside the span of the layer");
  }
  auto lattice = RationalSubspace::span(e, n).lattice_basis();

  PrecisionScope scope(256);
  std::vector<RealVector> coords;
  for (const auto& x : v) {
    if (x.size() != n) throw InputError("V basis vector has wrong length");
    for (std::size_t t = 0; t < n; ++t)
      if (x[t] != 0 && a.layer_of(t) < layer) throw PreconditionError("V is not inside n_i");
    // p_i keeps the layer-i coordinates; the lift is the same vector inside span(E^i)
    RealVector lift(n, Real(0));
    for (auto t : in_layer) lift[t] = x[t];
    double residual = 0.0;
    auto c = coordinates(lattice, lift, &residual);
    if (residual > 1e-9) throw PreconditionError("p_i(V) is not contained in p_i(E)");
    coords.push_back(std::move(c));
  }
  auto cert = diophantine_certificate(coords, lattice.size(), radius);
  cert.label = "type " + std::to_string(layer);
  return cert;
}

}  // namespace nilmix::dioph
