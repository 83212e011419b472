#include "nilmix/correlate.hpp"

namespace nilmix::correlate {

CorrelationSeries counterexample_maxgap(const ExactObservable& f1, const ExactObservable& f2, unsigned n,
                                        const RationalMatrix& m, std::int64_t m_first, std::int64_t m_last) {
  if (n < 1) throw InputError("power n must be positive");
  if (f1.dim() != m.rows() || f2.dim() != m.rows()) throw InputError("observable and matrix dimensions differ");
  if (m_first > m_last) throw InputError("empty range of m");
  if (!f1.mean_zero()) throw PreconditionError("f1 must have mean zero");
  const IntVector origin(m.rows(), 0);
  ExactObservable f2n = f2;
  for (unsigned k = 1; k < n; ++k) f2n = f2n.product(f2);
  const GaussianRational c = f2n.at(origin);
  if (c.is_zero()) throw PreconditionError("construction invalid: int f2^n = 0");
  const ExactObservable f1sq = f1.product(f1);

  CorrelationSeries s;
  s.limit = (c * f1sq.at(origin)).to_complex();
  for (std::int64_t k = m_first; k <= m_last; ++k) {
    const auto v = correlation_n(std::vector<ExactObservable>{f1sq, f2n}, {m}, {{k}, {2 * k}});
    std::vector<IntVector> times{{k}, {k}};
    for (unsigned j = 0; j < n; ++j) times.push_back({2 * k});
    s.entries.push_back(make_entry(std::move(times), v.to_complex()));
  }
  return s;
}

CorrelationSeries no_uniform_bound_demo(const RationalMatrix& m, const FourierObservable& g, std::int64_t m_first,
                                        std::int64_t m_last) {
  const std::size_t d = m.rows();
  if (g.dim() != d) throw InputError("observable and matrix dimensions differ");
  if (m_first > m_last) throw InputError("empty range of m");
  if (g.empty()) throw DegenerateError("observable g is zero");
  if (!g.mean_zero()) throw PreconditionError("g must have mean zero");
  const auto id = RationalMatrix::identity(d);
  const std::vector<RationalMatrix> gens{RationalMatrix::direct_sum(m, id), RationalMatrix::direct_sum(id, m)};
  // f(x, y) = g(x) is invariant under F = alpha(0, 1)
  FourierObservable f(2 * d);
  for (const auto& [k, c] : g.coeffs()) {
    IntVector z = k;
    z.resize(2 * d, 0);
    f.set(z, c);
  }
  const auto fbar = f.conjugate();
  CorrelationSeries s;
  s.limit = g.inner(g);
  for (std::int64_t k = m_first; k <= m_last; ++k) {
    std::vector<IntVector> times{{k, 2 * k}, {k, k}};
    const auto v = correlation_n(std::vector<FourierObservable>{f, fbar}, gens, times);
    s.entries.push_back(make_entry(std::move(times), v));
  }
  return s;
}

}  // namespace nilmix::correlate
