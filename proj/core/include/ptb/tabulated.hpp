#pragma once

#include <vector>

#include "ptb/model.hpp"

namespace ptb {

// A model given entirely by lookup tables. Used for hand-built and randomly generated
// instances and for the "tabulated" model document kind.
struct TabulatedModelSpec {
  SupportSpec support;
  ThetaGrid theta;
  PolicyGrid policies;
  std::vector<MomentSpec> moments;
  Objective objective;
  ErrorBoundConstants constants;
  std::optional<double> mu_star;

  std::vector<std::vector<Index>> gminus;  // see gminus_index
  std::vector<std::vector<Index>> gstar;   // see gstar_index
  std::vector<double> phi;                 // see phi_index
  std::vector<double> moment_values;       // see moment_index

  // Allocates all tables for the current support, grids and moment list.
  void allocate();

  std::size_t gminus_index(Index y, Index z, Index t) const {
    return (y * support.z.size() + z) * theta.size() + t;
  }
  std::size_t gstar_index(Index y, Index z, Index u, Index t, Index g) const {
    return (((y * support.z.size() + z) * support.u.size() + u) * theta.size() + t) * policies.size() + g;
  }
  std::size_t phi_index(Index a, Index y, Index z, Index u) const {
    return ((a * support.y.size() + y) * support.z.size() + z) * support.u.size() + u;
  }
  std::size_t moment_index(Index y, Index z, Index u, Index t, Index j) const {
    return (((y * support.z.size() + z) * support.u.size() + u) * theta.size() + t) * moments.size() + j;
  }
};

StructuralModel build_tabulated(TabulatedModelSpec spec);

// One-dimensional atom list with the given values under a single column name.
AtomList scalar_atoms(const std::string& column, const std::vector<double>& values);

}  // namespace ptb
