#include "ptb/oracle.hpp"

#include <algorithm>

#include "ptb/errors.hpp"
#include "ptb/lp.hpp"

namespace ptb {

namespace {

// Admissible (u, y*) pairs of one positive-weight cell under (theta, gamma).
struct CellChoices {
  Index cell = 0;
  double weight = 0.0;
  std::vector<Index> u;
  std::vector<Index> ystar;
  std::vector<double> phi;
  std::vector<std::vector<double>> moments;  // per distinct u, indexed like `u`
};

// Empty result when some positive-weight cell has no admissible pair.
std::vector<CellChoices> cell_choices(const StructuralModel& model, const WeightedMeasure& measure, Index theta,
                                      Index gamma, bool& ok) {
  const auto& s = model.support();
  const auto& prim = model.primitives();
  const std::size_t J = model.moment_count();
  std::vector<CellChoices> out;
  std::vector<Index> us, ys;
  std::vector<double> m(J);
  ok = true;
  for (Index y = 0; y < s.y.size(); ++y)
    for (Index z = 0; z < s.z.size(); ++z) {
      const double w = measure.at(y, z);
      if (w == 0.0) continue;
      CellChoices cc;
      cc.cell = s.cell(y, z);
      cc.weight = w;
      prim.factual_set(y, z, theta, us);
      for (Index u : us) {
        prim.counterfactual_set(y, z, u, theta, gamma, ys);
        if (ys.empty()) continue;
        prim.moments(y, z, u, theta, m);
        for (Index a : ys) {
          cc.u.push_back(u);
          cc.ystar.push_back(a);
          cc.phi.push_back(prim.objective(a, y, z, u));
          cc.moments.push_back(m);
        }
      }
      if (cc.u.empty()) {
        ok = false;
        return {};
      }
      out.push_back(std::move(cc));
    }
  return out;
}

void check_inputs(const StructuralModel& model, const WeightedMeasure& measure, Index gamma) {
  if (!measure.matches(model.support())) throw ContractError("measure does not match the model support");
  measure.validate();
  if (gamma >= model.policies().size()) throw ContractError("policy index out of range");
}

// Odometer step over per-cell choices; false once every combination was visited.
bool advance(std::vector<std::size_t>& pick, const std::vector<CellChoices>& cells) {
  for (std::size_t c = cells.size(); c-- > 0;) {
    if (++pick[c] < cells[c].u.size()) return true;
    pick[c] = 0;
  }
  return false;
}

void absorb(OracleBounds& out, Index t, double lo, double hi) {
  if (!out.feasible || lo < out.lb) {
    out.lb = lo;
    out.theta_lb = t;
  }
  if (!out.feasible || hi > out.ub) {
    out.ub = hi;
    out.theta_ub = t;
  }
  out.feasible = true;
}

}  // namespace

OracleBounds oracle_envelope(const StructuralModel& model, const WeightedMeasure& measure, Index gamma,
                             const OracleOptions& options) {
  check_inputs(model, measure, gamma);
  const std::size_t J = model.moment_count();
  OracleBounds out;
  for (Index t = 0; t < model.theta().size(); ++t) {
    bool ok = false;
    const auto cells = cell_choices(model, measure, t, gamma, ok);
    if (!ok) continue;
    std::size_t nvar = 0;
    for (const auto& cc : cells) nvar += cc.u.size();
    if (nvar > options.max_variables)
      throw BudgetError("oracle LP would need " + std::to_string(nvar) + " variables");

    LinearProgram lp;
    lp.n = nvar;
    lp.c.assign(nvar, 0.0);
    std::vector<std::vector<double>> mrows(J, std::vector<double>(nvar, 0.0));
    std::size_t v = 0;
    for (const auto& cc : cells) {
      std::vector<double> eq(nvar, 0.0);
      for (std::size_t i = 0; i < cc.u.size(); ++i, ++v) {
        eq[v] = 1.0;
        lp.c[v] = cc.phi[i];
        for (std::size_t j = 0; j < J; ++j) mrows[j][v] = cc.moments[i][j];
      }
      lp.add_eq(std::move(eq), cc.weight);
    }
    for (auto& r : mrows) lp.add_le(std::move(r), 0.0);

    const LpResult lo = solve_lp(lp);
    if (lo.status == LpStatus::infeasible) continue;
    for (double& c : lp.c) c = -c;
    const LpResult hi = solve_lp(lp);
    absorb(out, t, lo.objective, -hi.objective);
  }
  return out;
}

OracleBounds oracle_degenerate(const StructuralModel& model, const WeightedMeasure& measure, Index gamma,
                               const OracleOptions& options) {
  check_inputs(model, measure, gamma);
  const std::size_t J = model.moment_count();
  OracleBounds out;
  for (Index t = 0; t < model.theta().size(); ++t) {
    bool ok = false;
    const auto cells = cell_choices(model, measure, t, gamma, ok);
    if (!ok) continue;
    double count = 1.0;
    for (const auto& cc : cells) count *= static_cast<double>(cc.u.size());
    if (count > options.max_selections)
      throw BudgetError("oracle would enumerate " + format_real(count) + " selections");

    std::vector<std::size_t> pick(cells.size(), 0);
    double lo = kInf, hi = -kInf;
    while (true) {
      double obj = 0.0;
      std::vector<double> mom(J, 0.0);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto& cc = cells[c];
        obj += cc.weight * cc.phi[pick[c]];
        for (std::size_t j = 0; j < J; ++j) mom[j] += cc.weight * cc.moments[pick[c]][j];
      }
      // Same feasibility slack as the simplex tolerance.
      if (std::all_of(mom.begin(), mom.end(), [](double x) { return x <= 1e-9; })) {
        lo = std::min(lo, obj);
        hi = std::max(hi, obj);
      }
      if (!advance(pick, cells)) break;
    }
    if (lo <= hi) absorb(out, t, lo, hi);
  }
  return out;
}

}  // namespace ptb
