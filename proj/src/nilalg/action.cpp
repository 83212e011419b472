#include "nilmix/nilalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <map>

namespace nilmix::nilalg {

namespace {

using CVector = Eigen::VectorXcd;

Eigen::MatrixXcd to_complex(const RationalMatrix& m) {
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).convert_to<double>();
  return out;
}

double log_rayleigh(const Eigen::MatrixXcd& m, const CVector& u) {
  std::complex<double> lambda = u.dot(m * u) / u.squaredNorm();
  return std::log(std::abs(lambda));
}

// Index of the block of `s` whose exponent matches x; throws when the match is ambiguous.
std::size_t snap(const LyapunovSplitting& s, double x, unsigned bits) {
  std::size_t best = 0;
  double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
  for (std::size_t b = 0; b < s.blocks.size(); ++b) {
    double d = std::abs(x - s.blocks[b].exponent.value);
    if (d < d1) {
      d2 = d1;
      d1 = d;
      best = b;
    } else if (d < d2) {
      d2 = d;
    }
  }
  const double scale = 1.0 + std::abs(x);
  if (d1 > 1e-6 * scale || d2 < 1e-4 * scale)
    throw PrecisionError("cannot match a joint eigenvector to a Lyapunov block", bits);
  return best;
}

CVector witness_vector(const LyapunovFunctional& f) {
  CVector u(f.witness.size());
  for (std::size_t i = 0; i < f.witness.size(); ++i) u(i) = f.witness[i];
  return u;
}

// Lyapunov data of dα(z) together with the block each functional's witness falls in.
std::vector<std::size_t> blocks_at(const FunctionalSet& fs, const IntVector& z, const std::vector<std::size_t>& which,
                                   LyapunovSplitting& data) {
  RationalMatrix m = action_matrix(fs.generators, z);
  data = exactlin::lyapunov_data(m, fs.precision_bits);
  Eigen::MatrixXcd mc = to_complex(m);
  std::vector<std::size_t> out;
  for (auto i : which) out.push_back(snap(data, log_rayleigh(mc, witness_vector(fs.functionals[i])), data.precision_bits));
  return out;
}

}  // namespace

CertifiedReal LyapunovFunctional::evaluate(const IntVector& z) const {
  if (z.size() != coeffs.size()) throw InputError("time vector length differs from the action rank");
  CertifiedReal out;
  out.exact = true;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (z[k] == 0) continue;
    const double zk = static_cast<double>(z[k]);
    out.value += zk * coeffs[k].value;
    out.radius += std::abs(zk) * coeffs[k].radius;
    out.exact = out.exact && coeffs[k].exact;
  }
  if (out.exact) {
    out.radius = 0.0;
  } else {
    out.radius += std::abs(out.value) * 1e-15 * static_cast<double>(z.size() + 1);
  }
  return out;
}

int FunctionalSet::sign(std::size_t index, const IntVector& z) const {
  const auto& f = functionals.at(index);
  if (f.zero) return 0;
  auto c = f.evaluate(z);
  if (c.exact) return c.value > 0 ? 1 : (c.value < 0 ? -1 : 0);
  if (c.certified_positive()) return 1;
  if (c.certified_negative()) return -1;
  LyapunovSplitting data;
  auto b = blocks_at(*this, z, {index}, data);
  const auto& e = data.blocks[b[0]].exponent;
  if (e.certified_zero()) return 0;
  if (e.certified_positive()) return 1;
  if (e.certified_negative()) return -1;
  throw PrecisionError("sign of a Lyapunov functional not certified", data.precision_bits);
}

bool FunctionalSet::differ(std::size_t a, std::size_t b, const IntVector& z) const {
  const auto& fa = functionals.at(a);
  const auto& fb = functionals.at(b);
  auto ca = fa.evaluate(z);
  auto cb = fb.evaluate(z);
  if (ca.exact && cb.exact) return ca.value != cb.value;
  if (ca.lo() > cb.hi() || cb.lo() > ca.hi()) return true;
  LyapunovSplitting data;
  auto blk = blocks_at(*this, z, {a, b}, data);
  return blk[0] != blk[1];
}

FunctionalSet lyapunov_functionals(const std::vector<RationalMatrix>& generators, unsigned bits) {
  require_commuting(generators);
  FunctionalSet fs;
  fs.generators = generators;
  fs.precision_bits = bits;
  const std::size_t n = generators.front().rows();
  const std::size_t l = generators.size();

  std::vector<LyapunovSplitting> data;
  std::vector<Eigen::MatrixXcd> mats;
  for (const auto& g : generators) {
    data.push_back(exactlin::lyapunov_data(g, bits));
    mats.push_back(to_complex(g));
  }
  // A generic combination of commuting matrices separates the joint eigenspaces.
  static const double weights[] = {1.0, 0.6180339887498949, 0.41421356237309503, 0.7320508075688772,
                                   0.2360679774997897, 0.3166247903554};
  Eigen::MatrixXcd combo = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t k = 0; k < l; ++k) {
    double w = k < std::size(weights) ? weights[k] : std::fmod(0.6180339887498949 * (k + 1), 1.0) + 0.1;
    combo += w * mats[k];
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(combo);
  if (solver.info() != Eigen::Success) throw PrecisionError("eigen decomposition of the combined action failed", bits);

  std::map<std::vector<std::size_t>, std::size_t> index;
  std::vector<std::vector<std::size_t>> counts(l);
  for (std::size_t k = 0; k < l; ++k) counts[k].assign(data[k].blocks.size(), 0);
  for (std::size_t j = 0; j < n; ++j) {
    CVector u = solver.eigenvectors().col(static_cast<Eigen::Index>(j));
    std::vector<std::size_t> tuple(l);
    for (std::size_t k = 0; k < l; ++k) {
      tuple[k] = snap(data[k], log_rayleigh(mats[k], u), data[k].precision_bits);
      ++counts[k][tuple[k]];
    }
    auto [it, inserted] = index.try_emplace(tuple, fs.functionals.size());
    if (inserted) {
      LyapunovFunctional f;
      f.block = tuple;
      f.zero = true;
      for (std::size_t k = 0; k < l; ++k) {
        f.coeffs.push_back(data[k].blocks[tuple[k]].exponent);
        f.zero = f.zero && f.coeffs.back().certified_zero();
      }
      for (Eigen::Index i = 0; i < u.size(); ++i) f.witness.push_back(u(i));
      fs.functionals.push_back(std::move(f));
    }
    ++fs.functionals[it->second].multiplicity;
  }
  for (std::size_t k = 0; k < l; ++k)
    for (std::size_t b = 0; b < counts[k].size(); ++b)
      if (counts[k][b] != data[k].blocks[b].multiplicity)
        throw PrecisionError("joint eigenvectors do not reproduce the Lyapunov multiplicities", bits);
  return fs;
}

bool is_regular(const FunctionalSet& fs, const IntVector& z) {
  bool nonzero = false;
  for (auto x : z) nonzero = nonzero || x != 0;
  if (!nonzero) return false;
  for (std::size_t i = 0; i < fs.functionals.size(); ++i)
    if (!fs.functionals[i].zero && fs.sign(i, z) == 0) return false;
  for (std::size_t i = 0; i < fs.functionals.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (!fs.differ(i, j, z)) return false;
  return true;
}

RegularElement find_regular_element(const NilpotentAlgebra& a, const std::vector<RationalMatrix>& generators,
                                    unsigned bits) {
  auto action = classify_action(a, generators);
  const std::size_t l = generators.size();
  const std::size_t d = a.dim();
  RegularElement out;
  out.n2 = action.n2;

  // Shrink the root-of-unity part one generator at a time, skipping the finitely
  // many multipliers that would create new root-of-unity eigenvalues.
  IntVector z(l, 0);
  z[0] = 1;
  RationalSubspace cur = root_of_unity_part(action_matrix(generators, z));
  out.chain.push_back(z);
  while (!(cur == action.n2)) {
    std::size_t k = 0;
    RationalSubspace target;
    for (; k < l; ++k) {
      target = cur.intersect(root_of_unity_part(generators[k]));
      if (target.dim() < cur.dim()) break;
    }
    if (k == l) throw Error("root-of-unity reduction found no shrinking generator");
    bool found = false;
    for (std::int64_t bound = 4 * static_cast<std::int64_t>(d * d) + 16; !found && bound <= 1 << 14; bound *= 2) {
      for (std::int64_t m = 1; m <= bound; ++m) {
        IntVector cand = z;
        cand[k] += m;
        if (root_of_unity_part(action_matrix(generators, cand)) == target) {
          z = cand;
          found = true;
          break;
        }
      }
    }
    if (!found) throw Error("no admissible multiplier found in the root-of-unity reduction");
    cur = target;
    out.chain.push_back(z);
  }

  auto fs = lyapunov_functionals(generators, bits);
  if (!is_regular(fs, z)) {
    // a regular direction w, then z(n) = n z0 + w for the first admissible n
    IntVector w;
    for (std::int64_t r = 1; w.empty() && r <= 64; ++r) {
      IntVector cand(l, -r);
      for (;;) {
        std::int64_t inf = 0;
        for (auto x : cand) inf = std::max<std::int64_t>(inf, std::abs(x));
        if (inf == r && is_regular(fs, cand)) {
          w = cand;
          break;
        }
        std::size_t i = l;
        while (i > 0 && cand[i - 1] == r) cand[--i] = -r;
        if (i == 0) break;
        ++cand[i - 1];
      }
    }
    if (w.empty()) throw Error("no regular direction found in the search box");
    IntVector z0 = z;
    bool found = false;
    for (std::int64_t n = 1; n <= 1024 && !found; ++n) {
      IntVector cand(l);
      for (std::size_t k = 0; k < l; ++k) cand[k] = n * z0[k] + w[k];
      if (is_regular(fs, cand) && root_of_unity_part(action_matrix(generators, cand)) == action.n2) {
        z = cand;
        found = true;
      }
    }
    if (!found) throw Error("no regular perturbation z0 * n + w found");
    out.chain.push_back(z);
  }
  out.z = z;
  out.n_z2 = root_of_unity_part(action_matrix(generators, z));

  out.min_functional = std::numeric_limits<double>::infinity();
  out.min_separation = std::numeric_limits<double>::infinity();
  std::vector<CertifiedReal> vals;
  for (const auto& f : fs.functionals) vals.push_back(f.evaluate(z));
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (fs.functionals[i].zero) continue;
    out.min_functional = std::min(out.min_functional, std::max(0.0, std::abs(vals[i].value) - vals[i].radius));
  }
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double gap = std::abs(vals[i].value - vals[j].value) - vals[i].radius - vals[j].radius;
      out.min_separation = std::min(out.min_separation, std::max(0.0, gap));
    }
  return out;
}

}  // namespace nilmix::nilalg
