#pragma once

#include <cstddef>
#include <vector>

namespace ptb {

// minimise c'x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.
struct LinearProgram {
  std::size_t n = 0;
  std::vector<double> c;
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;

  void add_le(std::vector<double> row, double rhs) {
    a_ub.push_back(std::move(row));
    b_ub.push_back(rhs);
  }
  void add_eq(std::vector<double> row, double rhs) {
    a_eq.push_back(std::move(row));
    b_eq.push_back(rhs);
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

// Dense two-phase simplex. Dantzig pricing, switching to Bland's rule while stalled.
LpResult solve_simplex(const LinearProgram& lp, double tol = 1e-9);

// Number of candidate bases vertex enumeration would visit.
double vertex_enumeration_size(const LinearProgram& lp);

// Exhaustive search over basic solutions of the slack form. Assumes the feasible
// region is bounded; throws BudgetError when more than max_bases bases would be visited.
LpResult solve_by_vertex_enumeration(const LinearProgram& lp, double max_bases = 2e5, double tol = 1e-9);

// Vertex enumeration when it is cheap, simplex otherwise.
LpResult solve_lp(const LinearProgram& lp, double vertex_limit = 2e4);

}  // namespace ptb
