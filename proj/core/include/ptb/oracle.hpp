#pragma once

#include <cstddef>

#include "ptb/measure.hpp"
#include "ptb/model.hpp"

namespace ptb {

struct OracleOptions {
  // Largest LP (variables per theta) the oracle will build.
  std::size_t max_variables = 20000;
  // Largest number of deterministic selections enumerated per theta.
  double max_selections = 1e6;
};

struct OracleBounds {
  double lb = -kInf;
  double ub = kInf;
  bool feasible = false;
  Index theta_lb = static_cast<Index>(-1);
  Index theta_ub = static_cast<Index>(-1);
};

// Smallest and largest value of the integral of phi over joint laws of (U, Y*) given the
// cells, supported on the factual and counterfactual sets, with every moment expectation
// <= 0. One linear program per theta. (-inf, +inf, false) when no theta is feasible.
OracleBounds oracle_envelope(const StructuralModel& model, const WeightedMeasure& measure, Index gamma,
                             const OracleOptions& options = {});

// Same bounds restricted to point-mass conditionals: one (u, y*) per positive-weight cell.
OracleBounds oracle_degenerate(const StructuralModel& model, const WeightedMeasure& measure, Index gamma,
                               const OracleOptions& options = {});

}  // namespace ptb
