#pragma once

// Built-in systems: a nilpotent algebra with commuting automorphisms.

#include "nilmix/nilalg.hpp"

#include <string>
#include <vector>

namespace nilmix {

struct System {
  std::string name;
  std::string description;
  nilalg::NilpotentAlgebra algebra;
  std::vector<exactlin::RationalMatrix> generators;
};

/// Names: catmap, cubic3, heisenberg-cat, filiform4, product-t2xt2, cubic-rank2.
/// Throws InputError for an unknown name.
System catalog(const std::string& name);
std::vector<std::string> catalog_names();

}  // namespace nilmix
