#include "complex_ops.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>

namespace nilmix::exactlin {

using namespace detail;

namespace {

std::vector<std::complex<double>> initial_guesses(const Polynomial& p) {
  const int n = p.degree();
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  const double lc = p.leading().convert_to<double>();
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -p.coeff(i).convert_to<double>() / lc;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion.cast<std::complex<double>>());
  std::vector<std::complex<double>> z(n);
  for (int i = 0; i < n; ++i) z[i] = solver.eigenvalues()(i);
  // Aberth needs distinct starting points.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(z[i] - z[j]) < 1e-10 * (1.0 + std::abs(z[i])))
        z[i] += std::complex<double>(1e-6 * (i + 1), 1e-6 * (j + 2));
  return z;
}

}  // namespace

std::vector<IsolatedRoot> isolate_roots(const Polynomial& p, unsigned bits) {
  if (p.degree() < 1) throw InputError("root isolation needs positive degree");
  PrecisionScope scope(bits);
  const int n = p.degree();
  const Real unit = ldexp(Real(1), -static_cast<int>(bits));

  std::vector<ComplexReal> z(n);
  if (n == 1) {
    z[0] = {-to_real(p.coeff(0)) / to_real(p.coeff(1)), Real(0)};
  } else {
    auto start = initial_guesses(p);
    for (int i = 0; i < n; ++i) z[i] = {Real(start[i].real()), Real(start[i].imag())};
    const Real tol = ldexp(Real(1), -static_cast<int>(bits) + 8);
    for (int iter = 0; iter < 2000; ++iter) {
      Real worst = 0;
      for (int i = 0; i < n; ++i) {
        ComplexReal v, d;
        horner(p, z[i], v, d);
        if (v.re == 0 && v.im == 0) continue;
        ComplexReal w = cdiv(v, d);
        ComplexReal s{Real(0), Real(0)};
        for (int j = 0; j < n; ++j)
          if (j != i) s = cadd(s, cdiv(ComplexReal{Real(1), Real(0)}, csub(z[i], z[j])));
        ComplexReal den = csub(ComplexReal{Real(1), Real(0)}, cmul(w, s));
        ComplexReal step = cdiv(w, den);
        z[i] = csub(z[i], step);
        Real rel = cabs(step) / (1 + cabs(z[i]));
        if (rel > worst) worst = rel;
      }
      if (worst < tol) break;
    }
  }

  // Weierstrass inclusion: disks of radius n |p(z_i)| / |lc prod_{j!=i}(z_i - z_j)|
  // contain all roots, and each isolated disk holds exactly one.
  const Real lc = abs(to_real(p.leading()));
  std::vector<IsolatedRoot> roots(n);
  for (int i = 0; i < n; ++i) {
    ComplexReal v, d;
    horner(p, z[i], v, d);
    Real absz = cabs(z[i]);
    Real bound = 0;
    Real zk = 1;
    for (const auto& c : p.coeffs()) {
      bound += abs(to_real(c)) * zk;
      zk *= absz;
    }
    Real eval_err = 4 * (n + 2) * unit * bound;
    Real prod = lc;
    for (int j = 0; j < n; ++j)
      if (j != i) prod *= cabs(csub(z[i], z[j]));
    if (n == 1) {
      roots[i] = {z[i], (absz + 1) * unit * 4};
    } else {
      roots[i] = {z[i], n * (cabs(v) + eval_err) / prod};
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (cabs(csub(roots[i].value, roots[j].value)) <= roots[i].radius + roots[j].radius)
        throw PrecisionError("root inclusion disks overlap for " + p.to_string(), bits);
  return roots;
}

}  // namespace nilmix::exactlin
