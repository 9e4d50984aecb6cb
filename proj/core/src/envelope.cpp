#include "ptb/envelope.hpp"

#include <algorithm>
#include <cmath>

#include "ptb/errors.hpp"
#include "ptb/lp.hpp"
#include "ptb/rng.hpp"

namespace ptb {

namespace {

// Latent-dependent penalties are split as pen(k) = lo[k & mask] + hi[k >> lo_bits] so a
// full table costs one addition per entry and pattern.
constexpr std::size_t kMaxLoBits = 10;

struct ThetaBlock {
  bool built = false;
  std::vector<Index> coupled;
  std::vector<Index> separable;
  std::vector<std::size_t> begin;  // entries of cell c are [begin[c], begin[c+1])
  std::vector<Index> entry_u;
  std::vector<double> entry_m;  // [e * coupled.size() + b]
  std::vector<double> sep;      // [c * separable.size() + s]
  std::size_t lo_bits = 0;
  std::vector<double> pen_lo;  // [lo * E + e]
  std::vector<double> pen_hi;  // [hi * E + e]
  bool exact = true;

  std::size_t entries() const { return entry_u.size(); }
  std::size_t patterns() const { return std::size_t{1} << coupled.size(); }
};

struct PolicyBlock {
  bool built = false;
  std::vector<double> a;  // lower-form constant per entry, +inf for an empty counterfactual set
  std::vector<std::uint8_t> cell_infinite;
  std::vector<double> h;  // cached table, empty when not cached
};

struct Active {
  std::vector<Index> cells;
  std::vector<double> w;
};

Active active_cells(const std::vector<double>& weights) {
  Active a;
  for (Index c = 0; c < weights.size(); ++c)
    if (weights[c] != 0.0) {
      a.cells.push_back(c);
      a.w.push_back(weights[c]);
    }
  return a;
}

}  // namespace

struct EnvelopeEngine::Impl {
  StructuralModel model;
  EnvelopeOptions opt;
  std::size_t C, nt, ng, J, nz;
  mutable std::vector<ThetaBlock> thetas;
  mutable std::vector<PolicyBlock> policy[2];
  mutable std::size_t cached_doubles = 0;
  mutable std::vector<double> scratch;
  bool all_exact = true;

  Impl(const StructuralModel& m, EnvelopeOptions o) : model(m), opt(o) {
    C = model.support().cell_count();
    nz = model.support().z.size();
    nt = model.theta().size();
    ng = model.policies().size();
    J = model.moment_count();
    if (nt == 0 || ng == 0) throw ContractError("model needs at least one theta and one policy");
    thetas.resize(nt);
    policy[0].resize(nt * ng);
    policy[1].resize(nt * ng);
    // Coupled counts decide exactness up front so budget errors surface early.
    double total = 0.0;
    for (Index t = 0; t < nt; ++t) {
      const ThetaBlock& tb = theta_block(t);
      total += std::ldexp(1.0, static_cast<int>(tb.coupled.size()));
      if (static_cast<int>(tb.coupled.size()) > opt.exact_cutoff) all_exact = false;
    }
    if (total > opt.enumeration_budget) all_exact = false;
    if (!all_exact)
      for (auto& tb : thetas) tb.exact = false;
    if (!all_exact && !opt.allow_heuristic && opt.domain == MultiplierDomain::binary)
      throw BudgetError("enumeration budget exceeded: multiplier patterns over all theta would be " +
                        format_real(total) + " (limit " + format_real(opt.enumeration_budget) + ")");
  }

  const ThetaBlock& theta_block(Index t) const {
    ThetaBlock& tb = thetas[t];
    if (tb.built) return tb;
    const auto& prim = model.primitives();
    const auto& s = model.support();
    std::vector<Index> us;
    std::vector<double> all_m;  // [e * J + j]
    std::vector<double> m(J);
    tb.begin.assign(C + 1, 0);
    for (Index y = 0; y < s.y.size(); ++y)
      for (Index z = 0; z < nz; ++z) {
        const Index c = s.cell(y, z);
        tb.begin[c] = tb.entry_u.size();
        prim.factual_set(y, z, t, us);
        for (Index u : us) {
          tb.entry_u.push_back(u);
          prim.moments(y, z, u, t, m);
          all_m.insert(all_m.end(), m.begin(), m.end());
        }
      }
    tb.begin[C] = tb.entry_u.size();
    // A moment is separable when it is constant in u within every cell.
    for (Index j = 0; j < J; ++j) {
      bool constant = true;
      for (Index c = 0; c < C && constant; ++c)
        for (std::size_t e = tb.begin[c] + 1; e < tb.begin[c + 1] && constant; ++e)
          constant = all_m[e * J + j] == all_m[tb.begin[c] * J + j];
      (constant ? tb.separable : tb.coupled).push_back(j);
    }
    const std::size_t E = tb.entries(), Jc = tb.coupled.size(), Js = tb.separable.size();
    tb.entry_m.resize(E * Jc);
    for (std::size_t e = 0; e < E; ++e)
      for (std::size_t b = 0; b < Jc; ++b) tb.entry_m[e * Jc + b] = all_m[e * J + tb.coupled[b]];
    tb.sep.assign(C * Js, 0.0);
    for (Index c = 0; c < C; ++c)
      if (tb.begin[c] < tb.begin[c + 1])
        for (std::size_t k = 0; k < Js; ++k) tb.sep[c * Js + k] = all_m[tb.begin[c] * J + tb.separable[k]];
    tb.exact = static_cast<int>(Jc) <= opt.exact_cutoff;
    if (tb.exact) {
      tb.lo_bits = std::min(Jc, kMaxLoBits);
      const std::size_t hi_bits = Jc - tb.lo_bits;
      auto fill = [&](std::vector<double>& pen, std::size_t bits, std::size_t offset) {
        const std::size_t P = std::size_t{1} << bits;
        pen.assign(P * E, 0.0);
        for (std::size_t k = 1; k < P; ++k) {
          const std::size_t low = static_cast<std::size_t>(__builtin_ctzll(k));
          const std::size_t prev = k & (k - 1);
          for (std::size_t e = 0; e < E; ++e)
            pen[k * E + e] = pen[prev * E + e] + tb.entry_m[e * Jc + offset + low];
        }
      };
      fill(tb.pen_lo, tb.lo_bits, 0);
      fill(tb.pen_hi, hi_bits, tb.lo_bits);
    }
    tb.built = true;
    return tb;
  }

  const PolicyBlock& policy_block(Side side, Index t, Index g) const {
    PolicyBlock& pb = policy[side == Side::lower ? 0 : 1][t * ng + g];
    if (pb.built) return pb;
    const ThetaBlock& tb = theta_block(t);
    const auto& prim = model.primitives();
    const auto& s = model.support();
    std::vector<Index> ys;
    pb.a.assign(tb.entries(), kInf);
    pb.cell_infinite.assign(C, 1);
    for (Index y = 0; y < s.y.size(); ++y)
      for (Index z = 0; z < nz; ++z) {
        const Index c = s.cell(y, z);
        for (std::size_t e = tb.begin[c]; e < tb.begin[c + 1]; ++e) {
          prim.counterfactual_set(y, z, tb.entry_u[e], t, g, ys);
          if (ys.empty()) continue;
          double v = side == Side::lower ? kInf : -kInf;
          for (Index a : ys) {
            const double phi = prim.objective(a, y, z, tb.entry_u[e]);
            v = side == Side::lower ? std::min(v, phi) : std::max(v, phi);
          }
          pb.a[e] = side == Side::lower ? v : -v;
          pb.cell_infinite[c] = 0;
        }
      }
    pb.built = true;
    return pb;
  }

  void compute_table(const ThetaBlock& tb, const PolicyBlock& pb, std::vector<double>& h) const {
    const std::size_t P = tb.patterns(), E = tb.entries();
    const std::size_t lo_mask = (std::size_t{1} << tb.lo_bits) - 1;
    const double mu = model.mu_star();
    h.assign(P * C, kInf);
    for (std::size_t k = 0; k < P; ++k) {
      const double* lo = &tb.pen_lo[(k & lo_mask) * E];
      const double* hi = &tb.pen_hi[(k >> tb.lo_bits) * E];
      double* row = &h[k * C];
      for (Index c = 0; c < C; ++c) {
        double best = kInf;
        for (std::size_t e = tb.begin[c]; e < tb.begin[c + 1]; ++e) {
          const double a = pb.a[e];
          if (a == kInf) continue;
          const double v = a + mu * (lo[e] + hi[e]);
          if (v < best) best = v;
        }
        row[c] = best;
      }
    }
  }

  const double* table_data(Side side, Index t, Index g) const {
    const ThetaBlock& tb = theta_block(t);
    if (!tb.exact) throw BudgetError("integrand table requested for a theta beyond the exact enumeration cutoff");
    PolicyBlock& pb = const_cast<PolicyBlock&>(policy_block(side, t, g));
    if (!pb.h.empty()) return pb.h.data();
    const std::size_t need = tb.patterns() * C;
    if (cached_doubles + need <= opt.table_budget) {
      compute_table(tb, pb, pb.h);
      cached_doubles += need;
      return pb.h.data();
    }
    compute_table(tb, pb, scratch);
    return scratch.data();
  }

  // max over lambda of the lower-form integral at theta; +inf if an active cell is infinite.
  struct ThetaValue {
    double value = kInf;
    std::vector<double> lambda;
    bool heuristic = false;
  };

  ThetaValue theta_value(Side side, Index t, Index g, const Active& act) const {
    ThetaValue out;
    const ThetaBlock& tb = theta_block(t);
    const PolicyBlock& pb = policy_block(side, t, g);
    for (Index c : act.cells)
      if (pb.cell_infinite[c]) return out;
    const double mu = model.mu_star();
    const std::size_t Jc = tb.coupled.size(), Js = tb.separable.size();
    out.lambda.assign(J, 0.0);

    if (opt.zero_multipliers_only) {
      double f = 0.0;
      for (std::size_t i = 0; i < act.cells.size(); ++i) {
        const Index c = act.cells[i];
        double best = kInf;
        for (std::size_t e = tb.begin[c]; e < tb.begin[c + 1]; ++e) best = std::min(best, pb.a[e]);
        f += act.w[i] * best;
      }
      out.value = f;
      return out;
    }

    double coupled_value = -kInf;
    if (opt.domain == MultiplierDomain::hull) {
      coupled_value = hull_value(tb, pb, act, out.lambda);
    } else if (tb.exact) {
      const double* h = table_data(side, t, g);
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < tb.patterns(); ++k) {
        const double* row = h + k * C;
        double f = 0.0;
        for (std::size_t i = 0; i < act.cells.size(); ++i) f += act.w[i] * row[act.cells[i]];
        if (f > coupled_value) {
          coupled_value = f;
          best_k = k;
        }
      }
      for (std::size_t b = 0; b < Jc; ++b) out.lambda[tb.coupled[b]] = static_cast<double>((best_k >> b) & 1U);
    } else {
      coupled_value = ascent_value(tb, pb, act, t, out.lambda);
      out.heuristic = true;
    }
    // Separable moments: lambda_j = 1 exactly when the integrated moment is positive.
    double sep_value = 0.0;
    for (std::size_t k = 0; k < Js; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < act.cells.size(); ++i) s += act.w[i] * tb.sep[act.cells[i] * Js + k];
      if (s > 0.0) {
        sep_value += mu * s;
        out.lambda[tb.separable[k]] = 1.0;
      }
    }
    out.value = coupled_value + sep_value;
    return out;
  }

  double ascent_value(const ThetaBlock& tb, const PolicyBlock& pb, const Active& act, Index t,
                      std::vector<double>& lambda) const {
    const std::size_t Jc = tb.coupled.size(), E = tb.entries();
    const double mu = model.mu_star();
    std::vector<double> pen(E);
    std::vector<std::uint8_t> bits(Jc), best_bits(Jc);
    auto evaluate = [&]() {
      double f = 0.0;
      for (std::size_t i = 0; i < act.cells.size(); ++i) {
        const Index c = act.cells[i];
        double m = kInf;
        for (std::size_t e = tb.begin[c]; e < tb.begin[c + 1]; ++e)
          if (pb.a[e] != kInf) m = std::min(m, pb.a[e] + mu * pen[e]);
        f += act.w[i] * m;
      }
      return f;
    };
    auto flip = [&](std::size_t b) {
      const double sgn = bits[b] ? -1.0 : 1.0;
      bits[b] ^= 1U;
      for (std::size_t e = 0; e < E; ++e) pen[e] += sgn * tb.entry_m[e * Jc + b];
    };
    const CounterRng rng(derive_seed(opt.seed, t));
    double best = -kInf;
    for (int r = 0; r < std::max(1, opt.restarts); ++r) {
      std::fill(pen.begin(), pen.end(), 0.0);
      std::fill(bits.begin(), bits.end(), 0);
      if (r > 0)
        for (std::size_t b = 0; b < Jc; ++b)
          if (rng.uniform(static_cast<std::uint64_t>(r), b) < 0.5) flip(b);
      double cur = evaluate();
      bool improved = true;
      while (improved) {
        improved = false;
        for (std::size_t b = 0; b < Jc; ++b) {
          flip(b);
          const double v = evaluate();
          if (v > cur + 1e-15) {
            cur = v;
            improved = true;
          } else {
            flip(b);
          }
        }
      }
      if (cur > best) {
        best = cur;
        best_bits = bits;
      }
    }
    for (std::size_t b = 0; b < Jc; ++b) lambda[tb.coupled[b]] = best_bits[b];
    return best;
  }

  double hull_value(const ThetaBlock& tb, const PolicyBlock& pb, const Active& act,
                    std::vector<double>& lambda) const {
    const std::size_t Jc = tb.coupled.size(), A = act.cells.size();
    const double mu = model.mu_star();
    double shift = 1.0;
    for (Index c : act.cells)
      for (std::size_t e = tb.begin[c]; e < tb.begin[c + 1]; ++e) {
        if (pb.a[e] == kInf) continue;
        double s = std::abs(pb.a[e]);
        for (std::size_t b = 0; b < Jc; ++b) s += mu * std::abs(tb.entry_m[e * Jc + b]);
        shift = std::max(shift, s + 1.0);
      }
    // Variables: lambda (Jc), shifted cell values s'_c = s_c + shift (A). Maximise sum w s.
    LinearProgram lp;
    lp.n = Jc + A;
    lp.c.assign(lp.n, 0.0);
    for (std::size_t i = 0; i < A; ++i) lp.c[Jc + i] = -act.w[i];
    for (std::size_t i = 0; i < A; ++i) {
      const Index c = act.cells[i];
      for (std::size_t e = tb.begin[c]; e < tb.begin[c + 1]; ++e) {
        if (pb.a[e] == kInf) continue;
        std::vector<double> row(lp.n, 0.0);
        row[Jc + i] = 1.0;
        for (std::size_t b = 0; b < Jc; ++b) row[b] = -mu * tb.entry_m[e * Jc + b];
        lp.add_le(std::move(row), pb.a[e] + shift);
      }
    }
    for (std::size_t b = 0; b < Jc; ++b) {
      std::vector<double> row(lp.n, 0.0);
      row[b] = 1.0;
      lp.add_le(std::move(row), 1.0);
    }
    const LpResult r = solve_simplex(lp);
    if (r.status != LpStatus::optimal) throw std::runtime_error("multiplier hull program did not solve");
    double total_w = 0.0;
    for (double w : act.w) total_w += w;
    for (std::size_t b = 0; b < Jc; ++b) lambda[tb.coupled[b]] = r.x[b];
    return -r.objective - shift * total_w;
  }

  EnvelopeValue envelope(Side side, const WeightedMeasure& measure, Index g) const {
    if (!measure.matches(model.support())) throw ContractError("measure does not match the model support");
    if (g >= ng) throw ContractError("policy index out of range");
    const Active act = active_cells(measure.weights);
    EnvelopeValue best;
    best.value = kInf;
    for (Index t = 0; t < nt; ++t) {
      ThetaValue tv = theta_value(side, t, g, act);
      best.heuristic = best.heuristic || tv.heuristic;
      if (tv.value < best.value) {
        best.value = tv.value;
        best.theta = t;
        best.lambda = std::move(tv.lambda);
      }
    }
    if (side == Side::upper) best.value = -best.value;
    return best;
  }
};

EnvelopeEngine::EnvelopeEngine(const StructuralModel& model, EnvelopeOptions options)
    : impl_(std::make_unique<Impl>(model, options)) {}
EnvelopeEngine::~EnvelopeEngine() = default;

const StructuralModel& EnvelopeEngine::model() const { return impl_->model; }
const EnvelopeOptions& EnvelopeEngine::options() const { return impl_->opt; }
bool EnvelopeEngine::exact() const { return impl_->all_exact; }
std::size_t EnvelopeEngine::coupled_count(Index theta) const { return impl_->theta_block(theta).coupled.size(); }

EnvelopeValue EnvelopeEngine::lower(const WeightedMeasure& measure, Index gamma) const {
  return impl_->envelope(Side::lower, measure, gamma);
}

EnvelopeValue EnvelopeEngine::upper(const WeightedMeasure& measure, Index gamma) const {
  return impl_->envelope(Side::upper, measure, gamma);
}

EnvelopeCurve EnvelopeEngine::curve(const WeightedMeasure& measure) const {
  EnvelopeCurve out;
  const auto& pol = impl_->model.policies();
  for (Index g = 0; g < pol.size(); ++g) {
    EnvelopeRecord r;
    r.gamma = g;
    r.gamma_id = pol.ids[g];
    try {
      EnvelopeValue lo = lower(measure, g);
      EnvelopeValue up = upper(measure, g);
      r.i_lb = lo.value;
      r.i_ub = up.value;
      r.theta_lb = lo.theta;
      r.theta_ub = up.theta;
      r.lambda_lb = std::move(lo.lambda);
      r.lambda_ub = std::move(up.lambda);
      r.heuristic = lo.heuristic || up.heuristic;
    } catch (const BudgetError& e) {
      throw BudgetError("policy " + pol.ids[g] + ": " + e.what());
    } catch (const ContractError& e) {
      throw ContractError("policy " + pol.ids[g] + ": " + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<double> EnvelopeEngine::lower_values(const WeightedMeasure& measure) const {
  std::vector<double> v(impl_->ng);
  for (Index g = 0; g < impl_->ng; ++g) v[g] = lower(measure, g).value;
  return v;
}

TableView EnvelopeEngine::table(Side side, Index theta, Index gamma) const {
  const Impl& im = *impl_;
  const ThetaBlock& tb = im.theta_block(theta);
  const PolicyBlock& pb = im.policy_block(side, theta, gamma);
  TableView v;
  v.h = im.table_data(side, theta, gamma);
  v.patterns = tb.patterns();
  v.cells = im.C;
  v.sep = tb.sep.data();
  v.n_sep = tb.separable.size();
  v.cell_infinite = pb.cell_infinite.data();
  v.coupled = &tb.coupled;
  v.separable = &tb.separable;
  return v;
}

EnvelopeValue lower_envelope(const StructuralModel& model, const WeightedMeasure& measure, Index gamma,
                             const EnvelopeOptions& options) {
  return EnvelopeEngine(model, options).lower(measure, gamma);
}

EnvelopeValue upper_envelope(const StructuralModel& model, const WeightedMeasure& measure, Index gamma,
                             const EnvelopeOptions& options) {
  return EnvelopeEngine(model, options).upper(measure, gamma);
}

EnvelopeCurve envelope_curve(const StructuralModel& model, const WeightedMeasure& measure,
                             const EnvelopeOptions& options) {
  return EnvelopeEngine(model, options).curve(measure);
}

double integrate_h(const StructuralModel& model, const WeightedMeasure& measure, Index theta, Index gamma,
                   std::span<const std::uint8_t> lambda, Side side) {
  const auto& s = model.support();
  if (!measure.matches(s)) throw ContractError("measure does not match the model support");
  double total = 0.0;
  for (Index y = 0; y < s.y.size(); ++y)
    for (Index z = 0; z < s.z.size(); ++z) {
      const double w = measure.at(y, z);
      if (w == 0.0) continue;
      total += w * h_integrand(model, y, z, theta, gamma, lambda, side);
    }
  return total;
}

}  // namespace ptb
