// nilmix: command-line front end. Each command reads a JSON config, runs the
// computation and writes report.json plus CSV tables into the output directory.
//
// Exit status: 0 success, 1 computation error, 2 invalid invocation or config.

#include "nilmix/catalog.hpp"
#include "nilmix/correlate.hpp"
#include "nilmix/dioph.hpp"
#include "nilmix/fracsolve.hpp"
#include "nilmix/io.hpp"
#include "nilmix/nilalg.hpp"
#include "nilmix/rates.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>

namespace fs = std::filesystem;
using namespace nilmix;
using io::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 0x6E696C6D;

// Config accessor that records every resolved value, defaults included.
class Params {
public:
  Params(const json& config, json& resolved) : config_(config), resolved_(resolved) {}

  bool has(const char* key) const { return config_.contains(key); }
  const json& raw(const char* key) {
    if (!has(key)) throw InputError(std::string("missing field '") + key + "'");
    resolved_[key] = config_.at(key);
    return config_.at(key);
  }
  double number(const char* key, double fallback) {
    double v = fallback;
    if (has(key)) {
      if (!config_.at(key).is_number()) throw InputError(std::string("field '") + key + "' must be a number");
      v = config_.at(key).get<double>();
    }
    resolved_[key] = v;
    return v;
  }
  std::int64_t integer(const char* key, std::int64_t fallback) {
    std::int64_t v = fallback;
    if (has(key)) {
      if (!config_.at(key).is_number_integer()) throw InputError(std::string("field '") + key + "' must be an integer");
      v = config_.at(key).get<std::int64_t>();
    }
    resolved_[key] = v;
    return v;
  }
  std::string text(const char* key, const std::string& fallback) {
    std::string v = fallback;
    if (has(key)) {
      if (!config_.at(key).is_string()) throw InputError(std::string("field '") + key + "' must be a string");
      v = config_.at(key).get<std::string>();
    }
    resolved_[key] = v;
    return v;
  }
  std::vector<double> numbers(const char* key, std::vector<double> fallback) {
    std::vector<double> v = std::move(fallback);
    if (has(key)) {
      const auto& j = config_.at(key);
      v.clear();
      if (j.is_number())
        v.push_back(j.get<double>());
      else if (j.is_array())
        for (const auto& x : j) {
          if (!x.is_number()) throw InputError(std::string("field '") + key + "' must hold numbers");
          v.push_back(x.get<double>());
        }
      else
        throw InputError(std::string("field '") + key + "' must be a number or an array of numbers");
    }
    resolved_[key] = v;
    return v;
  }

private:
  const json& config_;
  json& resolved_;
};

struct Run {
  std::string command;
  json config;
  json resolved;
  unsigned precision = kDefaultPrecisionBits;
  std::uint64_t seed = kDefaultSeed;
  fs::path out;
  json result = json::object();
  json warnings = json::array();
  std::vector<std::pair<std::string, std::string>> tables;

  System system(Params& p) {
    auto s = io::system_from_json(p.raw("system"));
    auto d = nilalg::validate_algebra(s.algebra);
    if (!d.ok)
      for (const auto& c : d.checks)
        if (!c.passed) throw InputError("system algebra fails check '" + c.name + "': " + c.detail);
    return s;
  }
};

json certified(const CertifiedReal& x) { return {{"value", x.value}, {"radius", x.radius}, {"exact", x.exact}}; }

json subspace(const exactlin::RationalSubspace& s) {
  json basis = json::array();
  for (const auto& v : s.integer_basis()) basis.push_back(io::rational_vector_to_json(v));
  return {{"dim", s.dim()}, {"basis", basis}};
}

json real_vectors(const std::vector<RealVector>& vs) {
  json out = json::array();
  for (const auto& v : vs) {
    json row = json::array();
    for (const auto& x : v) row.push_back(x.convert_to<double>());
    out.push_back(row);
  }
  return out;
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    s += (first ? "" : ",") + c;
    first = false;
  }
  return s + "\n";
}

std::string num(double x) { return io::format_double(x); }

std::string int_list(const IntVector& z, const char* sep = " ") {
  std::string s;
  for (std::size_t k = 0; k < z.size(); ++k) s += (k ? sep : "") + std::to_string(z[k]);
  return s;
}

const exactlin::RationalMatrix& pick_generator(const System& s, Params& p) {
  const auto g = p.integer("generator", 0);
  if (g < 0 || static_cast<std::size_t>(g) >= s.generators.size()) throw InputError("generator index out of range");
  return s.generators[g];
}

void check_keys(const json& config, std::initializer_list<const char*> extra) {
  std::vector<const char*> allowed{"system", "precision", "seed", "out"};
  allowed.insert(allowed.end(), extra.begin(), extra.end());
  if (!config.is_object()) throw InputError("config must be a JSON object");
  for (const auto& [key, value] : config.items())
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end())
      throw InputError("unknown config field '" + key + "'");
}

void analyze(Run& run, Params& p) {
  check_keys(run.config, {});
  auto s = run.system(p);
  auto diag = nilalg::validate_algebra(s.algebra);
  json checks = json::array();
  for (const auto& c : diag.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  json series = json::array();
  for (const auto& sub : nilalg::central_series(s.algebra)) series.push_back(sub.dim());
  run.result["algebra"] = {{"dim", s.algebra.dim()}, {"step", diag.step}, {"checks", checks},
                           {"central_series_dims", series}};

  std::string csv = csv_row({"generator", "block", "exponent", "radius", "exact", "multiplicity"});
  json gens = json::array();
  for (std::size_t g = 0; g < s.generators.size(); ++g) {
    auto cl = nilalg::classify(s.algebra, s.generators[g], run.precision);
    json blocks = json::array();
    for (std::size_t b = 0; b < cl.lyapunov.blocks.size(); ++b) {
      const auto& blk = cl.lyapunov.blocks[b];
      blocks.push_back({{"exponent", certified(blk.exponent)}, {"multiplicity", blk.multiplicity}});
      csv += csv_row({std::to_string(g), std::to_string(b), num(blk.exponent.value), num(blk.exponent.radius),
                      blk.exponent.exact ? "1" : "0", std::to_string(blk.multiplicity)});
    }
    json primary = json::array();
    for (const auto& pb : cl.abelian_primary.blocks)
      primary.push_back({{"factor", pb.factor.to_string()},
                         {"multiplicity", pb.multiplicity},
                         {"cyclotomic_order", pb.cyclotomic_order ? json(*pb.cyclotomic_order) : json(nullptr)}});
    gens.push_back({{"matrix", io::matrix_to_json(s.generators[g])},
                    {"ergodic", cl.ergodic},
                    {"type", cl.rational_type ? "rational" : "irrational"},
                    {"n_z2", subspace(cl.n_z2)},
                    {"abelianization_primary", primary},
                    {"lyapunov_blocks", blocks},
                    {"w_plus", real_vectors(cl.w_plus)},
                    {"w_zero", real_vectors(cl.w_zero)},
                    {"w_minus", real_vectors(cl.w_minus)},
                    {"max_residual", cl.lyapunov.max_residual}});
  }
  run.result["generators"] = gens;
  run.tables.emplace_back("exponents.csv", csv);

  if (s.generators.size() > 1) {
    auto act = nilalg::classify_action(s.algebra, s.generators);
    auto fset = nilalg::lyapunov_functionals(s.generators, run.precision);
    json funcs = json::array();
    for (const auto& f : fset.functionals) {
      json coeffs = json::array();
      for (const auto& c : f.coeffs) coeffs.push_back(certified(c));
      funcs.push_back({{"coeffs", coeffs}, {"multiplicity", f.multiplicity}, {"zero", f.zero}});
    }
    json action = {{"type", act.rational_type ? "rational" : "irrational"},
                   {"n2", subspace(act.n2)},
                   {"has_ergodic_generator", act.has_ergodic_generator},
                   {"functionals", funcs}};
    if (act.has_ergodic_generator) {
      auto reg = nilalg::find_regular_element(s.algebra, s.generators, run.precision);
      action["regular_element"] = {{"z", reg.z},
                                   {"min_functional", reg.min_functional},
                                   {"min_separation", reg.min_separation}};
    }
    run.result["action"] = action;
  }
}

void rates_cmd(Run& run, Params& p) {
  check_keys(run.config, {"generator", "s", "r", "eps"});
  auto s = run.system(p);
  const auto& m = pick_generator(s, p);
  auto rep = rates::rho_chi(s.algebra, m, run.precision);
  const double sv = p.number("s", 0.5);
  const double r = p.number("r", 1.0);
  const double eps = p.number("eps", std::min(rep.chi.value, rep.rho.value / 2) / 2);
  auto hold = rates::holder_rate(rep, sv);
  if (!hold.warning.empty()) run.warnings.push_back(hold.warning);
  auto env = rates::order2_envelope(rep, r, eps);
  auto orders = rates::sobolev_orders(rep, r);
  run.result = {{"rho", certified(rep.rho)},
                {"chi", certified(rep.chi)},
                {"delta", rep.delta},
                {"s0", rep.s0},
                {"rho0", certified(rep.rho0)},
                {"gamma", hold.gamma},
                {"layer_dims", rep.layer_dims},
                {"exponents", rep.exponents},
                {"sobolev_orders", {{"s_i", orders.s_i}, {"s", orders.s}}},
                {"envelope", {{"rate1", env.rate1}, {"rate2", env.rate2}, {"delta", env.delta}}}};
  std::string csv = csv_row({"m", "bound"});
  for (int k = 0; k <= 20; ++k) csv += csv_row({std::to_string(k), num(env(k))});
  run.tables.emplace_back("envelope.csv", csv);
}

json certificate_json(const dioph::DiophantineCertificate& c) {
  return {{"label", c.label}, {"c_emp", c.c_emp},         {"argmin", c.argmin},
          {"pass", c.pass},   {"exact", c.exact},         {"radius", c.radius},
          {"ambient_dim", c.ambient_dim}, {"candidates", c.candidates}};
}

void certify(Run& run, Params& p) {
  check_keys(run.config, {"generator", "radius", "directions", "lemma9"});
  const double radius = p.number("radius", 1000);
  std::vector<dioph::DiophantineCertificate> certs;
  bool lemma9 = true;
  if (p.has("lemma9")) {
    const auto& j = p.raw("lemma9");
    if (!j.is_boolean()) throw InputError("field 'lemma9' must be a boolean");
    lemma9 = j.get<bool>();
  }
  if (lemma9) {
    auto s = run.system(p);
    const auto& m = pick_generator(s, p);
    // the sweep runs on the induced automorphism of the abelianization
    auto rep = dioph::verify_lemma9(nilalg::abelianization_action(s.algebra, m), radius, run.precision);
    run.result["lemma9_pass"] = rep.all_pass;
    certs = rep.certificates;
  }
  if (p.has("directions")) {
    const auto& j = p.raw("directions");
    if (!j.is_array() || j.empty()) throw InputError("field 'directions' must be a nonempty array of vectors");
    PrecisionScope scope(256);
    std::vector<RealVector> v;
    for (const auto& row : j) {
      RealVector x;
      for (const auto& e : row) {
        if (!e.is_number()) throw InputError("directions must hold numbers");
        x.emplace_back(e.get<double>());
      }
      v.push_back(std::move(x));
    }
    auto c = dioph::diophantine_certificate(v, v.front().size(), radius);
    c.label = "directions";
    certs.push_back(std::move(c));
  }
  if (certs.empty()) throw InputError("nothing to certify: set lemma9 or directions");
  json list = json::array();
  std::string csv = csv_row({"label", "c_emp", "argmin", "pass", "candidates"});
  for (const auto& c : certs) {
    list.push_back(certificate_json(c));
    csv += csv_row({"\"" + c.label + "\"", num(c.c_emp), int_list(c.argmin), c.pass ? "1" : "0",
                    std::to_string(c.candidates)});
  }
  run.result["certificates"] = list;
  run.tables.emplace_back("certificates.csv", csv);
}

void solve(Run& run, Params& p) {
  check_keys(run.config, {"observable", "directions", "r", "mode", "certificate_radius"});
  auto f = io::observable_from_json(p.raw("observable"));
  const auto& dj = p.raw("directions");
  if (!dj.is_array() || dj.empty()) throw InputError("field 'directions' must be a nonempty array of vectors");
  std::vector<std::vector<double>> dirs;
  for (const auto& row : dj) {
    std::vector<double> x;
    for (const auto& e : row) {
      if (!e.is_number()) throw InputError("directions must hold numbers");
      x.push_back(e.get<double>());
    }
    dirs.push_back(std::move(x));
  }
  fracsolve::DirectionBasis v(dirs);
  const double r = p.number("r", 0.5);
  const auto mode_name = p.text("mode", "modulus");
  if (mode_name != "modulus" && mode_name != "signed") throw InputError("mode must be 'modulus' or 'signed'");
  const auto mode = mode_name == "signed" ? fracsolve::Mode::signed_power : fracsolve::Mode::modulus;
  auto sol = fracsolve::solve_fractional(f, v, r, mode);
  for (const auto& w : sol.warnings) run.warnings.push_back(w);
  run.result = {{"residual", sol.residual},
                {"max_abs_f", f.max_abs()},
                {"norms", sol.norms},
                {"small_divisor_norms", sol.small_norms},
                {"dropped_mean", {sol.dropped_mean.real(), sol.dropped_mean.imag()}}};
  if (p.has("certificate_radius")) {
    const double radius = p.number("certificate_radius", 0);
    PrecisionScope scope(256);
    std::vector<RealVector> rv;
    for (const auto& d : dirs) {
      RealVector x;
      for (auto e : d) x.emplace_back(e);
      rv.push_back(std::move(x));
    }
    auto cert = dioph::diophantine_certificate(rv, f.dim(), radius);
    json bound = {{"certificate", certificate_json(cert)}};
    if (cert.pass) {
      const double b = fracsolve::small_divisor_bound(f, cert.c_emp, dirs.size(), r);
      bool ok = true;
      for (auto n : sol.small_norms) ok = ok && n <= b;
      bound["bound"] = b;
      bound["holds"] = ok;
      if (f.support_radius() > radius) run.warnings.push_back("observable support exceeds the certificate radius");
    }
    run.result["small_divisor_bound"] = bound;
  }
  auto split = fracsolve::split_small_divisor(f, v);
  std::string csv = "z,selector,part,f_re,f_im,phi_re,phi_im\n";
  for (const auto& [z, c] : f.coeffs()) {
    auto it = split.selector.find(z);
    const bool zero = it == split.selector.end();
    const std::size_t sel = zero ? 0 : it->second;
    const auto phi = zero ? fracsolve::Complex(0.0) : sol.phi[sel].at(z);
    const char* part = zero ? "zero" : (split.large.coeffs().count(z) ? "large" : "small");
    csv += csv_row({int_list(z), zero ? "" : std::to_string(sel + 1), part, num(c.real()), num(c.imag()),
                    num(phi.real()), num(phi.imag())});
  }
  run.tables.emplace_back("solution.csv", csv);
}

void threshold(Run& run, Params& p) {
  check_keys(run.config, {"profile", "r", "h"});
  fracsolve::Profile profile;
  std::string pname = "one";
  if (p.has("profile")) {
    const auto& j = p.raw("profile");
    if (j.is_string()) {
      pname = j.get<std::string>();
    } else {
      io::reject_unknown(j, {"csv", "samples"}, "profile");
      if (j.contains("csv")) {
        profile = io::profile_from_csv(io::read_file(j.at("csv").get<std::string>()), "csv");
      } else if (j.contains("samples")) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& x : j.at("samples")) {
          if (!x.is_array() || x.size() != 2 || !x[0].is_number() || !x[1].is_number())
            throw InputError("profile samples must be [x, xi] pairs");
          pts.emplace_back(x[0].get<double>(), x[1].get<double>());
        }
        profile = fracsolve::Profile::samples(std::move(pts), "samples");
      } else {
        throw InputError("profile object needs 'csv' or 'samples'");
      }
      pname.clear();
    }
  } else {
    run.resolved["profile"] = pname;
  }
  if (!pname.empty()) {
    if (pname == "one")
      profile = fracsolve::Profile::function([](double) { return 1.0; }, pname);
    else if (pname == "x2")
      profile = fracsolve::Profile::function([](double x) { return x * x; }, pname);
    else
      throw InputError("unknown profile '" + pname + "' (expected one, x2 or an object)");
  }
  const auto rs = p.numbers("r", {0.25, 0.5, 0.75});
  const auto hs = p.numbers("h", {1e-2, 1e-4, 1e-6});
  json rows = json::array();
  std::string csv = csv_row({"r", "h", "value", "error_estimate", "tail_exponent", "convergent"});
  for (double r : rs)
    for (double h : hs) {
      auto t = fracsolve::schrodinger_threshold(profile, r, h);
      rows.push_back({{"r", r},
                      {"h", h},
                      {"value", t.value},
                      {"error_estimate", t.error_estimate},
                      {"tail_exponent", std::isfinite(t.tail_exponent) ? json(t.tail_exponent) : json(nullptr)},
                      {"convergent", t.convergent},
                      {"verdict", t.verdict}});
      csv += csv_row({num(r), num(h), num(t.value), num(t.error_estimate), num(t.tail_exponent),
                      t.convergent ? "1" : "0"});
    }
  run.result["rows"] = rows;
  run.tables.emplace_back("threshold.csv", csv);
}

json series_json(const correlate::CorrelationSeries& s) {
  json entries = json::array();
  for (const auto& e : s.entries)
    entries.push_back({{"times", e.times},
                       {"re", e.value.real()},
                       {"im", e.value.imag()},
                       {"abs", std::abs(e.value)},
                       {"gap", e.gap},
                       {"max_gap", e.max_gap}});
  json out = {{"entries", entries}};
  if (s.limit) out["limit"] = {s.limit->real(), s.limit->imag()};
  if (s.fit)
    out["fit"] = {{"rate", s.fit->rate},
                  {"kind", s.fit->kind == correlate::GapKind::min_gap ? "min" : "max"},
                  {"c", s.fit->c},
                  {"envelope_ok", s.fit->envelope_ok},
                  {"slope", s.fit->slope},
                  {"intercept", s.fit->intercept},
                  {"r2", s.fit->r2},
                  {"used", s.fit->used}};
  return out;
}

void correlate_cmd(Run& run, Params& p) {
  check_keys(run.config, {"observables", "times", "series", "fit", "budget"});
  auto s = run.system(p);
  const auto& oj = p.raw("observables");
  if (!oj.is_array() || oj.size() < 2) throw InputError("field 'observables' must list at least two observables");
  std::vector<fracsolve::FourierObservable> obs;
  for (const auto& o : oj) obs.push_back(io::observable_from_json(o));
  const auto budget = p.integer("budget", static_cast<std::int64_t>(correlate::kDefaultBudget));
  if (budget <= 0) throw InputError("budget must be positive");
  const std::size_t l = s.generators.size();

  std::vector<std::vector<IntVector>> tuples;
  if (p.has("times")) {
    for (const auto& t : p.raw("times")) {
      std::vector<IntVector> tuple;
      for (const auto& z : t) tuple.push_back(io::int_vector_from_json(z));
      if (tuple.size() != obs.size()) throw InputError("each time tuple needs one time per observable");
      tuples.push_back(std::move(tuple));
    }
  } else if (p.has("series")) {
    // tuples (0, m d, 2 m d, ...) for m in [from, to]
    const auto& sj = p.raw("series");
    io::reject_unknown(sj, {"from", "to", "direction"}, "series");
    const auto from = sj.at("from").get<std::int64_t>(), to = sj.at("to").get<std::int64_t>();
    IntVector d(l, 0);
    d[0] = 1;
    if (sj.contains("direction")) d = io::int_vector_from_json(sj.at("direction"));
    if (d.size() != l) throw InputError("series direction length differs from the number of generators");
    for (std::int64_t m = from; m <= to; ++m) {
      std::vector<IntVector> tuple;
      for (std::size_t i = 0; i < obs.size(); ++i) {
        IntVector z(l);
        for (std::size_t k = 0; k < l; ++k) z[k] = static_cast<std::int64_t>(i) * m * d[k];
        tuple.push_back(z);
      }
      tuples.push_back(std::move(tuple));
    }
  } else {
    throw InputError("correlate needs 'times' or 'series'");
  }
  correlate::CorrelationSeries series;
  for (auto& t : tuples) {
    const auto v = correlate::correlation_n(obs, s.generators, t, static_cast<std::uint64_t>(budget));
    series.entries.push_back(correlate::make_entry(std::move(t), v));
  }
  if (p.has("fit")) {
    const auto& fj = p.raw("fit");
    io::reject_unknown(fj, {"rate", "kind"}, "fit");
    const double rate = fj.at("rate").get<double>();
    const auto kind = fj.value("kind", std::string("min"));
    if (kind != "min" && kind != "max") throw InputError("fit.kind must be 'min' or 'max'");
    series.fit = correlate::decay_fit(series, rate,
                                      kind == "min" ? correlate::GapKind::min_gap : correlate::GapKind::max_gap);
  }
  run.result = series_json(series);
  run.tables.emplace_back("series.csv", series.to_csv());
}

void density(Run& run, Params& p) {
  check_keys(run.config, {"n", "radius", "eps", "samples", "point_budget"});
  auto s = run.system(p);
  const auto n = p.integer("n", 2);
  if (n < 2) throw InputError("n must be at least 2");
  const auto radii = p.numbers("radius", {100});
  const double eps = p.number("eps", 0.05);
  rates::DensityOptions opt;
  opt.seed = run.seed;
  const auto samples = p.integer("samples", static_cast<std::int64_t>(opt.samples));
  const auto point_budget = p.integer("point_budget", static_cast<std::int64_t>(opt.point_budget));
  if (samples <= 0 || point_budget <= 0) throw InputError("samples and point_budget must be positive");
  opt.samples = static_cast<std::uint64_t>(samples);
  opt.point_budget = static_cast<std::uint64_t>(point_budget);
  auto fset = nilalg::lyapunov_functionals(s.generators, run.precision);
  json rows = json::array();
  std::string csv = csv_row({"radius", "total", "r_count", "r_fraction", "eps", "delta", "excluded_measure",
                             "t_radius", "t_total", "t_count", "t_fraction"});
  for (double radius : radii) {
    auto d = rates::density_estimate(fset, static_cast<unsigned>(n), radius, eps, opt);
    json excl = json::array();
    for (const auto& e : d.excluded) excl.push_back(e.dim());
    rows.push_back({{"radius", radius},
                    {"total", d.total},
                    {"r_count", d.r_count},
                    {"r_fraction", d.r_fraction},
                    {"eps", d.eps},
                    {"delta", d.delta},
                    {"excluded_measure", d.excluded_measure},
                    {"t_radius", d.t_radius},
                    {"t_total", d.t_total},
                    {"t_count", d.t_count},
                    {"t_fraction", d.t_fraction},
                    {"excluded_subspace_dims", excl}});
    csv += csv_row({num(radius), std::to_string(d.total), std::to_string(d.r_count), num(d.r_fraction), num(d.eps),
                    num(d.delta), num(d.excluded_measure), num(d.t_radius), std::to_string(d.t_total),
                    std::to_string(d.t_count), num(d.t_fraction)});
    if (d.t_radius < radius)
      run.warnings.push_back("T count uses radius " + num(d.t_radius) + " to fit the point budget");
  }
  run.result["rows"] = rows;
  run.tables.emplace_back("density.csv", csv);
}

void counterexample(Run& run, Params& p) {
  check_keys(run.config, {"kind", "generator", "f1", "f2", "n", "g", "m_from", "m_to"});
  auto s = run.system(p);
  const auto& m = pick_generator(s, p);
  const auto kind = p.text("kind", "maxgap");
  const std::size_t d = m.rows();
  IntVector e1(d, 0);
  e1[0] = 1;
  correlate::CorrelationSeries series;
  if (kind == "maxgap") {
    auto f1 = p.has("f1") ? io::observable_from_json(p.raw("f1")) : fracsolve::cos_mode(e1);
    auto f2 = p.has("f2") ? io::observable_from_json(p.raw("f2")) : fracsolve::cos_mode(e1);
    if (!p.has("f1")) run.resolved["f1"] = io::observable_to_json(f1);
    if (!p.has("f2")) run.resolved["f2"] = io::observable_to_json(f2);
    const auto n = p.integer("n", 2);
    if (n < 1) throw InputError("n must be positive");
    series = correlate::counterexample_maxgap(fracsolve::ExactObservable::from_double(f1),
                                              fracsolve::ExactObservable::from_double(f2), static_cast<unsigned>(n), m,
                                              p.integer("m_from", 0), p.integer("m_to", 30));
  } else if (kind == "no-uniform-bound") {
    fracsolve::FourierObservable g(d);
    if (p.has("g")) {
      g = io::observable_from_json(p.raw("g"));
    } else {
      g.set(e1, 1.0);
      run.resolved["g"] = io::observable_to_json(g);
    }
    series = correlate::no_uniform_bound_demo(m, g, p.integer("m_from", 1), p.integer("m_to", 40));
  } else {
    throw InputError("kind must be 'maxgap' or 'no-uniform-bound'");
  }
  run.result = series_json(series);
  run.tables.emplace_back("series.csv", series.to_csv());
}

int execute(Run& run) {
  Params p(run.config, run.resolved);
  if (run.config.is_object() && run.config.contains("system")) p.raw("system");
  if (run.command == "analyze")
    analyze(run, p);
  else if (run.command == "rates")
    rates_cmd(run, p);
  else if (run.command == "certify")
    certify(run, p);
  else if (run.command == "solve")
    solve(run, p);
  else if (run.command == "threshold")
    threshold(run, p);
  else if (run.command == "correlate")
    correlate_cmd(run, p);
  else if (run.command == "density")
    density(run, p);
  else if (run.command == "counterexample")
    counterexample(run, p);
  else
    throw InputError("unknown command '" + run.command + "'");

  json report;
  report["command"] = run.command;
  report["version"] = kLibraryVersion;
  report["precision_bits"] = run.precision;
  report["seed"] = run.seed;
  report["config"] = run.resolved;
  report["result"] = run.result;
  report["warnings"] = run.warnings;
  json tables = json::array();
  for (const auto& t : run.tables) tables.push_back(t.first);
  report["tables"] = tables;

  fs::create_directories(run.out);
  for (const auto& [name, content] : run.tables) io::write_atomic(run.out / name, content);
  io::write_atomic(run.out / "report.json", report.dump(2) + "\n");
  for (const auto& w : run.warnings) std::cerr << "warning: " << w.get<std::string>() << "\n";
  std::cout << (run.out / "report.json").string() << "\n";
  return 0;
}

void emit_error(const char* kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nilmix: rates, certificates and correlations for nilmanifold automorphisms"};
  std::string command, config_path, out_dir;
  unsigned precision = 0;
  std::uint64_t seed = 0;
  app.add_option("command", command,
                 "analyze | rates | certify | solve | threshold | correlate | density | counterexample")
      ->required();
  app.add_option("--config", config_path, "JSON experiment config")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory (default: config 'out' or '.')");
  auto* prec_opt = app.add_option("--precision", precision, "working precision in bits (default 128)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Run run;
  run.command = command;
  try {
    try {
      run.config = json::parse(io::read_file(config_path));
    } catch (const json::parse_error& e) {
      throw InputError(std::string("malformed JSON in ") + config_path + ": " + e.what());
    }
    if (!run.config.is_object()) throw InputError("config must be a JSON object");
    Params p(run.config, run.resolved);
    run.precision = static_cast<unsigned>(p.integer("precision", kDefaultPrecisionBits));
    if (*prec_opt) run.precision = precision;
    if (run.precision < 53 || run.precision > 4096) throw InputError("precision must lie in [53, 4096] bits");
    run.resolved["precision"] = run.precision;
    const auto cseed = p.integer("seed", static_cast<std::int64_t>(kDefaultSeed));
    run.seed = *seed_opt ? seed : static_cast<std::uint64_t>(cseed);
    run.resolved["seed"] = run.seed;
    run.out = *out_opt ? fs::path(out_dir) : fs::path(p.text("out", "."));
    run.resolved["out"] = run.out.string();
    return execute(run);
  } catch (const InputError& e) {
    emit_error("invalid-config", e.what());
    return 2;
  } catch (const json::exception& e) {
    emit_error("invalid-config", e.what());
    return 2;
  } catch (const PrecisionError& e) {
    emit_error("precision", e.what());
    return 1;
  } catch (const ObstructionError& e) {
    emit_error("obstruction", e.what());
    return 1;
  } catch (const BudgetError& e) {
    emit_error("budget", e.what());
    return 1;
  } catch (const DegenerateError& e) {
    emit_error("degenerate", e.what());
    return 1;
  } catch (const PreconditionError& e) {
    emit_error("precondition", e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error("error", e.what());
    return 1;
  }
}
