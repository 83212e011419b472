#include "nilmix/io.hpp"

#include <charconv>
#include <fstream>
#include <regex>
#include <sstream>

namespace nilmix::io {

namespace {

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing field '" + key + "'");
  return j.at(key);
}

std::int64_t to_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw InputError(where + ": expected an integer");
  return j.get<std::int64_t>();
}

double to_double(const json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  return j.get<double>();
}

}  // namespace

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw InputError(where + ": unknown field '" + key + "'");
  }
}

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) {
    static const std::regex form(R"(\s*([+-]?)([0-9]+)(?:/([0-9]+))?\s*)");
    const auto text = j.get<std::string>();
    std::smatch m;
    if (!std::regex_match(text, m, form)) throw InputError("malformed rational '" + text + "'");
    const Integer den(m[3].matched ? m[3].str() : std::string("1"));
    if (den == 0) throw InputError("zero denominator in '" + text + "'");
    const Integer num(m[2].str());
    return Rational(m[1].str() == "-" ? Integer(-num) : num, den);
  }
  throw InputError("rational entries must be integers or \"p/q\" strings");
}

json rational_to_json(const Rational& q) {
  if (denominator(q) == 1 && abs(numerator(q)) < Integer(1) << 62) return numerator(q).convert_to<std::int64_t>();
  return q.str();
}

exactlin::RationalMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) throw InputError("matrix must be a nonempty array of rows");
  const std::size_t rows = j.size(), cols = j.front().size();
  exactlin::RationalMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw InputError("matrix rows must have equal lengths");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rational_from_json(j[r][c]);
  }
  return m;
}

json matrix_to_json(const exactlin::RationalMatrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(rational_vector_to_json(m.row(r)));
  return out;
}

RationalVector rational_vector_from_json(const json& j) {
  if (!j.is_array()) throw InputError("expected an array of rationals");
  RationalVector v;
  for (const auto& x : j) v.push_back(rational_from_json(x));
  return v;
}

json rational_vector_to_json(const RationalVector& v) {
  json out = json::array();
  for (const auto& q : v) out.push_back(rational_to_json(q));
  return out;
}

IntVector int_vector_from_json(const json& j) {
  if (!j.is_array()) throw InputError("expected an array of integers");
  IntVector v;
  for (const auto& x : j) v.push_back(to_int(x, "integer vector"));
  return v;
}

System system_from_json(const json& j) {
  if (j.is_string()) return catalog(j.get<std::string>());
  reject_unknown(j, {"name", "dim", "layers", "brackets", "generators"}, "system");
  System s;
  s.name = j.contains("name") ? j.at("name").get<std::string>() : "inline";
  const auto dim = static_cast<std::size_t>(to_int(field(j, "dim", "system"), "system.dim"));
  std::vector<std::size_t> layers{0};
  if (j.contains("layers")) {
    layers.clear();
    for (const auto& x : j.at("layers")) layers.push_back(static_cast<std::size_t>(to_int(x, "system.layers")));
  }
  s.algebra = nilalg::NilpotentAlgebra(dim, layers);
  if (j.contains("brackets"))
    for (const auto& b : j.at("brackets")) {
      reject_unknown(b, {"i", "j", "value"}, "system.brackets");
      const auto i = to_int(field(b, "i", "bracket"), "bracket.i");
      const auto k = to_int(field(b, "j", "bracket"), "bracket.j");
      if (i < 0 || k < 0 || static_cast<std::size_t>(i) >= dim || static_cast<std::size_t>(k) >= dim)
        throw InputError("bracket index out of range");
      auto value = rational_vector_from_json(field(b, "value", "bracket"));
      if (value.size() != dim) throw InputError("bracket value has wrong length");
      s.algebra.set_bracket(i, k, value);
    }
  const auto& gens = field(j, "generators", "system");
  if (!gens.is_array() || gens.empty()) throw InputError("system.generators must be a nonempty array");
  for (const auto& g : gens) {
    auto m = matrix_from_json(g);
    if (m.rows() != dim || m.cols() != dim) throw InputError("generator size differs from system.dim");
    s.generators.push_back(std::move(m));
  }
  return s;
}

json system_to_json(const System& s) {
  json out;
  out["name"] = s.name;
  out["dim"] = s.algebra.dim();
  out["layers"] = s.algebra.layer_starts();
  json brackets = json::array();
  const std::size_t n = s.algebra.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k) {
      const auto& v = s.algebra.bracket(i, k);
      bool zero = true;
      for (const auto& q : v) zero = zero && q == 0;
      if (!zero) brackets.push_back({{"i", i}, {"j", k}, {"value", rational_vector_to_json(v)}});
    }
  out["brackets"] = brackets;
  json gens = json::array();
  for (const auto& g : s.generators) gens.push_back(matrix_to_json(g));
  out["generators"] = gens;
  return out;
}

fracsolve::FourierObservable observable_from_json(const json& j) {
  reject_unknown(j, {"dim", "coeffs"}, "observable");
  const auto dim = to_int(field(j, "dim", "observable"), "observable.dim");
  if (dim <= 0) throw InputError("observable.dim must be positive");
  fracsolve::FourierObservable f(static_cast<std::size_t>(dim));
  const auto& coeffs = field(j, "coeffs", "observable");
  if (!coeffs.is_array()) throw InputError("observable.coeffs must be an array");
  for (const auto& c : coeffs) {
    reject_unknown(c, {"z", "re", "im"}, "observable.coeffs");
    auto z = int_vector_from_json(field(c, "z", "coefficient"));
    if (z.size() != f.dim()) throw InputError("coefficient frequency has wrong length");
    const double re = c.contains("re") ? to_double(c.at("re"), "coefficient.re") : 0.0;
    const double im = c.contains("im") ? to_double(c.at("im"), "coefficient.im") : 0.0;
    f.add(z, {re, im});
  }
  return f;
}

json observable_to_json(const fracsolve::FourierObservable& f) {
  json coeffs = json::array();
  for (const auto& [z, c] : f.coeffs()) coeffs.push_back({{"z", z}, {"re", c.real()}, {"im", c.imag()}});
  return {{"dim", f.dim()}, {"coeffs", coeffs}};
}

fracsolve::Profile profile_from_csv(const std::string& text, std::string name) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<double, double>> pts;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError("profile line " + std::to_string(lineno) + ": expected x,xi");
    double x = 0, y = 0;
    const auto* b = line.data();
    auto r1 = std::from_chars(b, b + comma, x);
    auto r2 = std::from_chars(b + comma + 1, b + line.size(), y);
    if (r1.ec != std::errc() || r2.ec != std::errc()) {
      if (lineno == 1) continue;  // header
      throw InputError("profile line " + std::to_string(lineno) + ": malformed number");
    }
    pts.emplace_back(x, y);
  }
  return fracsolve::Profile::samples(std::move(pts), std::move(name));
}

std::string format_double(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace nilmix::io
