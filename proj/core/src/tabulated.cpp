#include "ptb/tabulated.hpp"

#include "ptb/errors.hpp"

namespace ptb {

namespace {

class TabulatedPrimitives final : public Primitives {
 public:
  explicit TabulatedPrimitives(TabulatedModelSpec spec) : s_(std::move(spec)) {}

  void factual_set(Index y, Index z, Index t, std::vector<Index>& out) const override {
    out = s_.gminus[s_.gminus_index(y, z, t)];
  }
  void counterfactual_set(Index y, Index z, Index u, Index t, Index g, std::vector<Index>& out) const override {
    out = s_.gstar[s_.gstar_index(y, z, u, t, g)];
  }
  double objective(Index a, Index y, Index z, Index u) const override { return s_.phi[s_.phi_index(a, y, z, u)]; }
  void moments(Index y, Index z, Index u, Index t, std::span<double> out) const override {
    const std::size_t J = s_.moments.size();
    if (J == 0) return;
    const double* p = &s_.moment_values[s_.moment_index(y, z, u, t, 0)];
    std::copy(p, p + J, out.begin());
  }

 private:
  TabulatedModelSpec s_;
};

}  // namespace

void TabulatedModelSpec::allocate() {
  const std::size_t ny = support.y.size(), nz = support.z.size(), nu = support.u.size();
  const std::size_t nt = theta.size(), ng = policies.size(), na = support.ystar.size();
  gminus.assign(ny * nz * nt, {});
  gstar.assign(ny * nz * nu * nt * ng, {});
  phi.assign(na * ny * nz * nu, 0.0);
  moment_values.assign(ny * nz * nu * nt * moments.size(), 0.0);
}

StructuralModel build_tabulated(TabulatedModelSpec spec) {
  const std::size_t ny = spec.support.y.size(), nz = spec.support.z.size(), nu = spec.support.u.size();
  const std::size_t nt = spec.theta.size(), ng = spec.policies.size(), na = spec.support.ystar.size();
  if (spec.gminus.size() != ny * nz * nt || spec.gstar.size() != ny * nz * nu * nt * ng ||
      spec.phi.size() != na * ny * nz * nu || spec.moment_values.size() != ny * nz * nu * nt * spec.moments.size())
    throw InvalidModelError("tabulated model tables do not match the declared grid sizes");
  for (const auto& set : spec.gminus)
    for (Index u : set)
      if (u >= nu) throw InvalidModelError("tabulated factual set refers to a missing latent point");
  for (const auto& set : spec.gstar)
    for (Index a : set)
      if (a >= na) throw InvalidModelError("tabulated counterfactual set refers to a missing outcome atom");

  ModelParts parts;
  parts.support = spec.support;
  parts.theta = spec.theta;
  parts.policies = spec.policies;
  parts.moments = spec.moments;
  parts.objective = spec.objective;
  parts.constants = spec.constants;
  parts.mu_star = spec.mu_star;
  parts.kind = "tabulated";
  parts.primitives = std::make_shared<TabulatedPrimitives>(std::move(spec));
  return StructuralModel(std::move(parts));
}

AtomList scalar_atoms(const std::string& column, const std::vector<double>& values) {
  AtomList a;
  a.columns = {column};
  for (double v : values) a.points.push_back({v});
  return a;
}

}  // namespace ptb
