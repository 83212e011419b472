#include "nilmix/catalog.hpp"

namespace nilmix {

namespace {

using exactlin::RationalMatrix;
using nilalg::NilpotentAlgebra;

RationalMatrix cat() { return RationalMatrix::from_rows({{2, 1}, {1, 1}}); }

// companion matrix of x^3 - x^2 - 2x + 1
RationalMatrix cubic() { return RationalMatrix::from_rows({{0, 0, -1}, {1, 0, 2}, {0, 1, 1}}); }

}  // namespace

std::vector<std::string> catalog_names() {
  return {"catmap", "cubic3", "heisenberg-cat", "filiform4", "product-t2xt2", "cubic-rank2"};
}

System catalog(const std::string& name) {
  System s;
  s.name = name;
  if (name == "catmap") {
    s.description = "cat map [[2,1],[1,1]] on T^2";
    s.algebra = NilpotentAlgebra::abelian(2);
    s.generators = {cat()};
  } else if (name == "cubic3") {
    s.description = "companion matrix of x^3 - x^2 - 2x + 1 on T^3";
    s.algebra = NilpotentAlgebra::abelian(3);
    s.generators = {cubic()};
  } else if (name == "heisenberg-cat") {
    s.description = "Heisenberg algebra [X,Y] = Z with the cat map on span{X,Y} and Z fixed";
    s.algebra = NilpotentAlgebra(3, {0, 2});
    s.algebra.set_bracket(0, 1, {Rational(0), Rational(0), Rational(1)});
    s.generators = {RationalMatrix::from_rows({{2, 1, 0}, {1, 1, 0}, {0, 0, 1}})};
  } else if (name == "filiform4") {
    s.description = "filiform algebra [e1,e2] = e3, [e1,e3] = e4 with the unipotent e1 -> e1 + e2";
    s.algebra = NilpotentAlgebra(4, {0, 2, 3});
    s.algebra.set_bracket(0, 1, {Rational(0), Rational(0), Rational(1), Rational(0)});
    s.algebra.set_bracket(0, 2, {Rational(0), Rational(0), Rational(0), Rational(1)});
    s.generators = {RationalMatrix::from_rows({{1, 0, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}})};
  } else if (name == "product-t2xt2") {
    s.description = "Z^2 action on T^2 x T^2 by diag(cat, I) and diag(I, cat)";
    s.algebra = NilpotentAlgebra::abelian(4);
    const auto id = RationalMatrix::identity(2);
    s.generators = {RationalMatrix::direct_sum(cat(), id), RationalMatrix::direct_sum(id, cat())};
  } else if (name == "cubic-rank2") {
    s.description = "Z^2 action on T^3 by the units C and C - I of the cubic field of x^3 - x^2 - 2x + 1";
    s.algebra = NilpotentAlgebra::abelian(3);
    s.generators = {cubic(), cubic() - RationalMatrix::identity(3)};
  } else {
    throw InputError("unknown catalog system '" + name + "'");
  }
  return s;
}

}  // namespace nilmix
