#include "ptb/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "ptb/errors.hpp"

namespace ptb {

std::string format_real(double x) {
  if (x == 0.0) return "0";  // folds -0 into 0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string AtomList::describe(Index atom) const {
  std::string s = "(";
  for (Index c = 0; c < dim(); ++c) {
    if (c) s += ", ";
    s += columns[c] + "=" + label(atom, c);
  }
  return s + ")";
}

std::optional<Index> AtomList::find(const std::vector<std::string>& labels) const {
  if (labels.size() != dim()) return std::nullopt;
  for (Index a = 0; a < size(); ++a) {
    bool match = true;
    for (Index c = 0; c < dim() && match; ++c) match = label(a, c) == labels[c];
    if (match) return a;
  }
  return std::nullopt;
}

std::optional<Index> AtomList::find_point(const std::vector<double>& point) const {
  for (Index a = 0; a < size(); ++a)
    if (points[a] == point) return a;
  return std::nullopt;
}

double ThetaGrid::distance(Index a, Index b) const {
  const auto& p = candidates.at(a);
  const auto& q = candidates.at(b);
  double d = 0.0;
  for (Index i = 0; i < p.size(); ++i) d = std::max(d, std::abs(p[i] - q[i]));
  return d;
}

std::string ThetaGrid::describe(Index t) const {
  std::string s;
  const auto& p = candidates.at(t);
  for (Index i = 0; i < p.size(); ++i) {
    if (i) s += ";";
    s += format_real(p[i]);
  }
  return s;
}

std::optional<Index> PolicyGrid::find(const std::string& id) const {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) return std::nullopt;
  return static_cast<Index>(it - ids.begin());
}

double mu_star(const ErrorBoundConstants& k, const Objective& obj) {
  for (double v : {k.c1, k.c2, k.delta, obj.phi_lb, obj.phi_ub})
    if (!std::isfinite(v)) throw InvalidModelError("non-finite error-bound constant or objective bound");
  if (!(k.c1 > 0.0) || !(k.delta > 0.0) || k.c2 < 0.0)
    throw InvalidModelError("error-bound constants require C1 > 0, delta > 0, C2 >= 0");
  if (obj.phi_ub < obj.phi_lb) throw InvalidModelError("objective bounds are reversed");
  return std::max(k.c2 / k.c1, (obj.phi_ub - obj.phi_lb) / (k.c1 * k.delta));
}

StructuralModel::StructuralModel(ModelParts parts) : parts_(std::move(parts)) {
  if (!parts_.primitives) throw InvalidModelError("model has no primitive evaluators");
  mu_floor_ = ptb::mu_star(parts_.constants, parts_.objective);
  mu_star_ = parts_.mu_star.value_or(mu_floor_);
  if (!std::isfinite(mu_star_) || mu_star_ <= 0.0) throw InvalidModelError("mu_star must be positive and finite");
}

double StructuralModel::h_bar() const {
  double sum = 0.0;
  for (const auto& m : parts_.moments) sum += m.abs_bound;
  return std::max(std::abs(parts_.objective.phi_lb), std::abs(parts_.objective.phi_ub)) + mu_star_ * sum;
}

StructuralModel StructuralModel::with_mu_star(double mu) const {
  if (mu < mu_floor_)
    throw InvalidModelError("mu_star " + format_real(mu) + " is below the required floor " + format_real(mu_floor_));
  return with_mu_star_unchecked(mu);
}

StructuralModel StructuralModel::with_mu_star_unchecked(double mu) const {
  ModelParts p = parts_;
  p.mu_star = mu;
  return StructuralModel(std::move(p));
}

double h_integrand(const StructuralModel& model, Index y, Index z, Index theta, Index gamma,
                   std::span<const std::uint8_t> lambda, Side side) {
  const auto& s = model.support();
  const std::size_t J = model.moment_count();
  if (lambda.size() != J) throw ContractError("lambda length differs from the moment count");
  if (y >= s.y.size() || z >= s.z.size() || theta >= model.theta().size() || gamma >= model.policies().size())
    throw ContractError("h_integrand index out of range");
  for (auto l : lambda)
    if (l > 1) throw ContractError("lambda entries must be 0 or 1");

  const auto& prim = model.primitives();
  const double mu = model.mu_star();
  std::vector<Index> us, ys;
  std::vector<double> m(J);
  prim.factual_set(y, z, theta, us);

  const bool lower = side == Side::lower;
  double best = lower ? kInf : -kInf;
  for (Index u : us) {
    prim.counterfactual_set(y, z, u, theta, gamma, ys);
    double inner = lower ? kInf : -kInf;
    for (Index ystar : ys) {
      double phi = prim.objective(ystar, y, z, u);
      inner = lower ? std::min(inner, phi) : std::max(inner, phi);
    }
    if (!std::isfinite(inner)) continue;  // empty counterfactual set contributes +-inf
    prim.moments(y, z, u, theta, m);
    double pen = 0.0;
    for (Index j = 0; j < J; ++j)
      if (lambda[j]) pen += m[j];
    double v = lower ? inner + mu * pen : inner - mu * pen;
    best = lower ? std::min(best, v) : std::max(best, v);
  }
  return best;
}

namespace {

void check_atoms(const AtomList& a, const std::string& name, ValidationReport& r) {
  if (a.size() == 0) {
    r.violations.push_back(name + " atom list is empty");
    return;
  }
  std::set<std::vector<double>> seen;
  for (Index i = 0; i < a.size(); ++i) {
    if (a.points[i].size() != a.dim())
      r.violations.push_back(name + " atom " + std::to_string(i) + " has the wrong number of coordinates");
    if (!seen.insert(a.points[i]).second)
      r.violations.push_back(name + " atom " + std::to_string(i) + " duplicates an earlier atom");
  }
}

}  // namespace

ValidationReport validate_model(const StructuralModel& model, const ValidationOptions& opt) {
  ValidationReport r;
  const auto& s = model.support();
  check_atoms(s.y, "y", r);
  check_atoms(s.z, "z", r);
  check_atoms(s.ystar, "ystar", r);
  check_atoms(s.u, "u", r);
  if (model.theta().size() == 0) r.violations.push_back("theta grid is empty");
  if (model.policies().size() == 0) r.violations.push_back("policy grid is empty");
  {
    std::set<std::string> ids;
    for (const auto& id : model.policies().ids)
      if (!ids.insert(id).second) r.violations.push_back("duplicate policy id " + id);
  }
  for (Index j = 0; j < model.moment_count(); ++j)
    if (!(model.moments()[j].abs_bound > 0.0) || !std::isfinite(model.moments()[j].abs_bound))
      r.violations.push_back("moment " + model.moments()[j].name + " has a non-positive bound");
  const auto& k = model.constants();
  if (!(k.c1 > 0.0) || !(k.delta > 0.0) || !(k.c2 >= 0.0))
    r.violations.push_back("error-bound constants require C1 > 0, delta > 0, C2 >= 0");
  if (model.mu_star() < model.mu_floor() * (1.0 - opt.tolerance))
    r.violations.push_back("mu_star below required penalty floor: " + format_real(model.mu_star()) + " < " +
                           format_real(model.mu_floor()));
  if (!r.ok()) return r;

  const std::size_t ny = s.y.size(), nz = s.z.size(), nu = s.u.size(), nys = s.ystar.size();
  const std::size_t nt = model.theta().size(), ng = model.policies().size(), J = model.moment_count();
  const auto& prim = model.primitives();
  const auto& obj = model.objective();

  // Objective bounds on the full grid.
  if (nys * ny * nz * nu <= opt.scan_budget) {
    for (Index a = 0; a < nys; ++a)
      for (Index y = 0; y < ny; ++y)
        for (Index z = 0; z < nz; ++z)
          for (Index u = 0; u < nu; ++u) {
            double v = prim.objective(a, y, z, u);
            if (!(v >= obj.phi_lb - opt.tolerance && v <= obj.phi_ub + opt.tolerance))
              r.violations.push_back("objective " + format_real(v) + " outside declared bounds at ystar=" +
                                     s.ystar.describe(a) + " y=" + s.y.describe(y) + " z=" + s.z.describe(z) +
                                     " u=" + s.u.describe(u));
          }
  } else {
    r.notes.push_back("objective scan skipped (grid too large)");
  }

  // Moment bounds on the full grid; set-valued maps must stay inside their atom lists.
  if (ny * nz * nu * nt * std::max<std::size_t>(J, 1) <= opt.scan_budget) {
    std::vector<double> m(J);
    for (Index y = 0; y < ny; ++y)
      for (Index z = 0; z < nz; ++z)
        for (Index u = 0; u < nu; ++u)
          for (Index t = 0; t < nt; ++t) {
            prim.moments(y, z, u, t, m);
            for (Index j = 0; j < J; ++j)
              if (!(std::abs(m[j]) <= model.moments()[j].abs_bound + opt.tolerance))
                r.violations.push_back("moment " + model.moments()[j].name + " = " + format_real(m[j]) +
                                       " exceeds its bound at y=" + s.y.describe(y) + " z=" + s.z.describe(z) +
                                       " u=" + s.u.describe(u) + " theta=" + model.theta().describe(t));
          }
  } else {
    r.notes.push_back("moment scan skipped (grid too large)");
  }

  std::vector<Index> us, ys;
  std::size_t empty_factual = 0, empty_counterfactual = 0, scanned = 0;
  for (Index y = 0; y < ny; ++y)
    for (Index z = 0; z < nz; ++z)
      for (Index t = 0; t < nt; ++t) {
        prim.factual_set(y, z, t, us);
        if (us.empty()) ++empty_factual;
        for (Index u : us) {
          if (u >= nu) {
            r.violations.push_back("factual map returned a point outside the latent grid");
            return r;
          }
          for (Index g = 0; g < ng; ++g) {
            if (++scanned > opt.scan_budget) {
              r.notes.push_back("counterfactual scan truncated (grid too large)");
              goto done;
            }
            prim.counterfactual_set(y, z, u, t, g, ys);
            if (ys.empty()) ++empty_counterfactual;
            for (Index a : ys)
              if (a >= nys) {
                r.violations.push_back("counterfactual map returned a point outside the ystar atoms");
                return r;
              }
          }
        }
      }
done:
  if (empty_factual) r.notes.push_back(std::to_string(empty_factual) + " (y, z, theta) cells have an empty factual set");
  if (empty_counterfactual)
    r.notes.push_back(std::to_string(empty_counterfactual) +
                      " (y, z, u, theta, gamma) cells have an empty counterfactual set");
  return r;
}

}  // namespace ptb
