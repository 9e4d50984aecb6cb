#include <algorithm>
#include <cmath>
#include <set>

#include "ptb/errors.hpp"
#include "ptb/examples.hpp"
#include "ptb/rng.hpp"

namespace ptb {

namespace {

constexpr double kTol = 1e-12;

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

// Player k's view of an outcome vector: the bits of y_{-k} in player order.
std::size_t others_pattern(std::size_t y_bits, std::size_t K, std::size_t k) {
  std::size_t pat = 0;
  for (std::size_t i = 0; i < K; ++i) {
    if (i == k) continue;
    pat = (pat << 1) | ((y_bits >> (K - 1 - i)) & 1U);
  }
  return pat;
}

int bit_of(std::size_t y_bits, std::size_t K, std::size_t k) { return static_cast<int>((y_bits >> (K - 1 - k)) & 1U); }

// Stacked coefficient vectors theta_{k,b}, product over players and basis coefficients.
std::vector<std::vector<double>> coefficient_product(const SdcConfig& cfg) {
  const std::size_t K = static_cast<std::size_t>(cfg.players), B = cfg.basis.size();
  std::vector<std::vector<double>> out{{}};
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t b = 0; b < B; ++b) {
      std::vector<std::vector<double>> next;
      for (const auto& prefix : out)
        for (double v : cfg.coefficient_grid[b]) {
          auto row = prefix;
          row.push_back(v);
          next.push_back(std::move(row));
        }
      out = std::move(next);
    }
  return out;
}

// pi[k][slot] for one stacked coefficient vector.
std::vector<std::vector<double>> payoffs(const SdcConfig& cfg, const std::vector<double>& theta) {
  const std::size_t K = static_cast<std::size_t>(cfg.players), B = cfg.basis.size(), S = cfg.slots();
  std::vector<std::vector<double>> pi(K, std::vector<double>(S, 0.0));
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t b = 0; b < B; ++b) pi[k][s] += theta[k * B + b] * cfg.basis[b][s];
  return pi;
}

// Pure-strategy equilibria y with y_k = 1{pi_k(map(z_k, y_{-k})) >= u_k}; map = identity when empty.
std::vector<std::size_t> equilibria(const SdcConfig& cfg, const std::vector<std::vector<double>>& pi,
                                    const std::vector<std::size_t>& z_idx, const std::vector<double>& u,
                                    const std::vector<Index>* map) {
  const std::size_t K = static_cast<std::size_t>(cfg.players);
  const std::size_t shift = ipow(2, K - 1);
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < ipow(2, K); ++y) {
    bool fixed = true;
    for (std::size_t k = 0; k < K && fixed; ++k) {
      std::size_t slot = z_idx[k] * shift + others_pattern(y, K, k);
      if (map) slot = (*map)[slot];
      const int choice = pi[k][slot] >= u[k] - kTol ? 1 : 0;
      fixed = choice == bit_of(y, K, k);
    }
    if (fixed) out.push_back(y);
  }
  return out;
}

class SdcPrimitives final : public Primitives {
 public:
  SdcPrimitives(const SdcConfig& cfg, const std::vector<std::vector<double>>& thetas, std::vector<double> ugrid,
                std::vector<std::vector<Index>> maps)
      : cfg_(cfg), ugrid_(std::move(ugrid)), maps_(std::move(maps)) {
    K_ = static_cast<std::size_t>(cfg.players);
    nzs_ = cfg.z_atoms.size();
    S_ = cfg.slots();
    for (const auto& t : thetas) pi_.push_back(payoffs(cfg, t));
  }

  std::vector<std::size_t> z_tuple(Index z) const {
    std::vector<std::size_t> idx(K_);
    for (std::size_t k = K_; k-- > 0;) {
      idx[k] = z % nzs_;
      z /= nzs_;
    }
    return idx;
  }
  std::vector<double> u_tuple(Index u) const {
    std::vector<double> v(K_);
    for (std::size_t k = K_; k-- > 0;) {
      v[k] = ugrid_[u % ugrid_.size()];
      u /= ugrid_.size();
    }
    return v;
  }
  std::size_t slot(Index z, std::size_t y_bits, std::size_t k) const {
    return z_tuple(z)[k] * ipow(2, K_ - 1) + others_pattern(y_bits, K_, k);
  }

  void factual_set(Index y, Index z, Index t, std::vector<Index>& out) const override {
    out.clear();
    // Per player the admissible grid indices, then their product.
    std::vector<std::vector<Index>> per(K_);
    for (std::size_t k = 0; k < K_; ++k) {
      const double p = pi_[t][k][slot(z, y, k)];
      for (Index i = 0; i < ugrid_.size(); ++i) {
        const double u = ugrid_[i];
        const bool ok = bit_of(y, K_, k) ? u <= p + kTol : u >= p - kTol;
        if (ok) per[k].push_back(i);
      }
      if (per[k].empty()) return;
    }
    std::vector<Index> pos(K_, 0);
    while (true) {
      Index u = 0;
      for (std::size_t k = 0; k < K_; ++k) u = u * ugrid_.size() + per[k][pos[k]];
      out.push_back(u);
      std::size_t k = K_;
      while (k > 0) {
        --k;
        if (++pos[k] < per[k].size()) break;
        pos[k] = 0;
        if (k == 0) return;
      }
    }
  }

  void counterfactual_set(Index, Index z, Index u, Index t, Index gamma, std::vector<Index>& out) const override {
    const auto eq = equilibria(cfg_, pi_[t], z_tuple(z), u_tuple(u), &maps_[gamma]);
    out.assign(eq.begin(), eq.end());
  }

  double objective(Index ystar, Index, Index, Index) const override {
    return static_cast<double>(bit_of(ystar, K_, static_cast<std::size_t>(cfg_.target_player)));
  }

  // Order: for k, for conditioning slot s, for evaluation slot s2: cons1 then cons2.
  void moments(Index y, Index z, Index u, Index t, std::span<double> out) const override {
    const auto uv = u_tuple(u);
    std::size_t j = 0;
    for (std::size_t k = 0; k < K_; ++k) {
      const std::size_t own = slot(z, y, k);
      for (std::size_t s = 0; s < S_; ++s) {
        const double ind = s == own ? 1.0 : 0.0;
        for (std::size_t s2 = 0; s2 < S_; ++s2) {
          const double p = pi_[t][k][s2];
          const double below = uv[k] <= p + kTol ? 1.0 : 0.0;
          out[j++] = (below - std::max(cfg_.l0 * p, 0.0) - 0.5) * ind;
          out[j++] = (0.5 - below - std::max(-cfg_.l0 * p, 0.0)) * ind;
        }
      }
    }
  }

 private:
  SdcConfig cfg_;
  std::vector<double> ugrid_;
  std::vector<std::vector<Index>> maps_;
  std::vector<std::vector<std::vector<double>>> pi_;  // [theta][k][slot]
  std::size_t K_ = 1, nzs_ = 0, S_ = 0;
};

}  // namespace

std::size_t SdcConfig::slots() const { return z_atoms.size() * ipow(2, static_cast<std::size_t>(players) - 1); }

void SdcConfig::validate() const {
  if (players < 1) throw ContractError("sdc needs at least one player");
  if (players > 6) throw BudgetError("sdc builder supports at most 6 players");
  if (z_atoms.empty()) throw ContractError("sdc needs z atoms");
  if (std::set<double>(z_atoms.begin(), z_atoms.end()).size() != z_atoms.size())
    throw ContractError("sdc z atoms must be distinct");
  if (basis.empty()) throw ContractError("sdc needs at least one basis function");
  if (coefficient_grid.size() != basis.size()) throw ContractError("sdc needs one coefficient grid per basis function");
  for (const auto& b : basis)
    if (b.size() != slots()) throw ContractError("sdc basis rows need one value per (z, y_{-k}) slot");
  for (const auto& g : coefficient_grid)
    if (g.empty()) throw ContractError("sdc coefficient grids must be non-empty");
  if (!(l0 > 0.0)) throw ContractError("sdc needs L0 > 0");
  if (!(l_prime > 0.0) || !(l_prime <= l)) throw ContractError("sdc needs 0 < L' <= L");
  if (u_grid_points < 2) throw ContractError("sdc needs at least 2 latent grid points");
  if (target_player < 0 || target_player >= players) throw ContractError("sdc target player out of range");
  for (const auto& theta : coefficient_product(*this))
    for (const auto& row : payoffs(*this, theta))
      for (double p : row)
        if (p < -1.0 - kTol || p > 1.0 + kTol) throw ContractError("sdc payoff outside [-1, 1]: " + format_real(p));
}

StructuralModel build_sdc(const SdcConfig& cfg) {
  cfg.validate();
  if (!cfg.tau_hat) throw ContractError("sdc builder needs a plug-in tau (supply a sample or population weights)");
  const double tau = *cfg.tau_hat;
  if (!(tau > 0.0)) throw InvalidModelError("degenerate tau: every conditional choice probability equals 0.5");
  const std::size_t K = static_cast<std::size_t>(cfg.players), nzs = cfg.z_atoms.size(), S = cfg.slots();

  ModelParts parts;
  parts.kind = "sdc";
  auto& s = parts.support;
  for (std::size_t k = 0; k < K; ++k) {
    s.y.columns.push_back("y" + std::to_string(k + 1));
    s.z.columns.push_back("z" + std::to_string(k + 1));
    s.u.columns.push_back("u" + std::to_string(k + 1));
    s.ystar.columns.push_back("ystar" + std::to_string(k + 1));
  }
  for (std::size_t y = 0; y < ipow(2, K); ++y) {
    std::vector<double> p(K);
    for (std::size_t k = 0; k < K; ++k) p[k] = bit_of(y, K, k);
    s.y.points.push_back(p);
    s.ystar.points.push_back(p);
  }
  for (std::size_t z = 0; z < ipow(nzs, K); ++z) {
    std::vector<double> p(K);
    std::size_t rest = z;
    for (std::size_t k = K; k-- > 0;) {
      p[k] = cfg.z_atoms[rest % nzs];
      rest /= nzs;
    }
    s.z.points.push_back(p);
  }

  const auto thetas = coefficient_product(cfg);
  // Latent grid: uniform points on [-1, 1] plus every attainable payoff value, so that
  // interval endpoints of the factual map are grid points.
  std::set<double> ug;
  for (int i = 0; i < cfg.u_grid_points; ++i) ug.insert(-1.0 + 2.0 * i / (cfg.u_grid_points - 1));
  for (const auto& t : thetas)
    for (const auto& row : payoffs(cfg, t))
      for (double p : row) ug.insert(std::clamp(p, -1.0, 1.0));
  std::vector<double> ugrid;
  for (double v : ug)
    if (ugrid.empty() || v - ugrid.back() > kTol) ugrid.push_back(v);
  if (std::pow(static_cast<double>(ugrid.size()), static_cast<double>(K)) > 5e6)
    throw BudgetError("sdc latent grid too large");
  for (std::size_t u = 0; u < ipow(ugrid.size(), K); ++u) {
    std::vector<double> p(K);
    std::size_t rest = u;
    for (std::size_t k = K; k-- > 0;) {
      p[k] = ugrid[rest % ugrid.size()];
      rest /= ugrid.size();
    }
    s.u.points.push_back(p);
  }
  s.grid_resolution.assign(K, static_cast<int>(ugrid.size()));

  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t b = 0; b < cfg.basis.size(); ++b)
      parts.theta.columns.push_back("theta" + std::to_string(k + 1) + "_" + std::to_string(b + 1));
  parts.theta.candidates = thetas;

  parts.policies = all_self_maps(S);
  const double bound = 0.5 + cfg.l0;
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t a = 0; a < S; ++a)
      for (std::size_t b = 0; b < S; ++b) {
        const std::string tag = "[k=" + std::to_string(k + 1) + ",s=" + std::to_string(a) + ",s'=" + std::to_string(b) + "]";
        parts.moments.push_back({"cons1" + tag, bound});
        parts.moments.push_back({"cons2" + tag, bound});
      }
  parts.objective = {0.0, 1.0};
  parts.constants = {cfg.l0 * cfg.l_prime, cfg.l0 * cfg.l, tau / (cfg.l0 * cfg.l_prime)};
  parts.mu_star = cfg.mu_star;
  parts.primitives = std::make_shared<SdcPrimitives>(cfg, thetas, ugrid, parts.policies.maps);
  return StructuralModel(std::move(parts));
}

double sdc_tau_hat(const SdcConfig& cfg, const std::vector<double>& w) {
  const std::size_t K = static_cast<std::size_t>(cfg.players), nzs = cfg.z_atoms.size();
  const std::size_t ny = ipow(2, K), nz = ipow(nzs, K), shift = ipow(2, K - 1);
  if (w.size() != ny * nz) throw ContractError("tau plug-in weights do not match the sdc support");
  double tau = kInf;
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t slot = 0; slot < cfg.slots(); ++slot) {
      double mass = 0.0, ones = 0.0;
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t z = 0; z < nz; ++z) {
          const std::size_t zk = (z / ipow(nzs, K - 1 - k)) % nzs;
          if (zk * shift + others_pattern(y, K, k) != slot) continue;
          mass += w[y * nz + z];
          if (bit_of(y, K, k)) ones += w[y * nz + z];
        }
      if (mass <= 0.0) continue;
      const double gap = std::abs(0.5 - ones / mass);
      if (gap > 1e-12) tau = std::min(tau, gap);
    }
  if (!std::isfinite(tau)) throw InvalidModelError("degenerate tau: every conditional choice probability equals 0.5");
  return tau;
}

std::vector<std::string> coherency_failures(const StructuralModel& model, std::size_t limit) {
  std::vector<std::string> out;
  const auto& s = model.support();
  const auto& prim = model.primitives();
  std::vector<Index> us, ys;
  for (Index y = 0; y < s.y.size(); ++y)
    for (Index z = 0; z < s.z.size(); ++z)
      for (Index t = 0; t < model.theta().size(); ++t) {
        prim.factual_set(y, z, t, us);
        for (Index u : us)
          for (Index g = 0; g < model.policies().size(); ++g) {
            prim.counterfactual_set(y, z, u, t, g, ys);
            if (!ys.empty()) continue;
            out.push_back("y=" + s.y.describe(y) + " z=" + s.z.describe(z) + " u=" + s.u.describe(u) +
                          " theta=" + model.theta().describe(t) + " gamma=" + model.policies().ids[g]);
            if (out.size() >= limit) return out;
          }
      }
  return out;
}

// ---- truth ----

void SdcTruth::validate() const {
  config.validate();
  const std::size_t K = static_cast<std::size_t>(config.players);
  if (theta0.size() != K * config.basis.size()) throw ContractError("theta0 has the wrong length");
  if (u_points.empty() || u_points.size() != u_mass.size()) throw ContractError("latent law is malformed");
  if (z_mass.size() != ipow(config.z_atoms.size(), K)) throw ContractError("z_mass has the wrong length");
  for (const auto* p : {&u_mass, &z_mass}) {
    double s = 0.0;
    for (double v : *p) {
      if (!(v >= 0.0)) throw ContractError("negative probability in sdc truth");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) throw ContractError("sdc truth probabilities must sum to one");
  }
}

namespace {

class SdcTruthImpl final : public Truth {
 public:
  explicit SdcTruthImpl(SdcTruth t) : t_(std::move(t)), model_(build(t_)) {}

  const StructuralModel& model() const override { return model_; }
  std::string kind() const override { return "sdc"; }

  WeightedMeasure population() const override {
    return WeightedMeasure::from_weights(model_.support(), raw_population(t_));
  }

  Sample simulate(std::size_t n, std::uint64_t seed) const override {
    if (n == 0) throw ContractError("simulate needs n >= 1");
    const std::size_t K = static_cast<std::size_t>(t_.config.players), nzs = t_.config.z_atoms.size();
    const auto pi = payoffs(t_.config, t_.theta0);
    const CounterRng rng(seed);
    Sample out;
    for (std::size_t i = 0; i < n; ++i) {
      const Index z = pick(t_.z_mass, rng.uniform(i, 0));
      std::vector<std::size_t> zi(K);
      std::size_t rest = z;
      for (std::size_t k = K; k-- > 0;) {
        zi[k] = rest % nzs;
        rest /= nzs;
      }
      std::vector<double> u(K);
      for (std::size_t k = 0; k < K; ++k) u[k] = t_.u_points[pick(t_.u_mass, rng.uniform(i, 1 + k))];
      const auto eq = equilibria(t_.config, pi, zi, u, nullptr);
      if (eq.empty()) throw ContractError("incoherent truth: no equilibrium for simulated row " + std::to_string(i));
      const auto which = static_cast<std::size_t>(rng.uniform(i, 1 + K) * static_cast<double>(eq.size()));
      out.push(eq[std::min(which, eq.size() - 1)], z);
    }
    return out;
  }

 private:
  static Index pick(const std::vector<double>& p, double r) {
    double acc = 0.0;
    Index last = 0;
    for (Index i = 0; i < p.size(); ++i) {
      if (p[i] <= 0.0) continue;
      last = i;
      acc += p[i];
      if (r < acc) return i;
    }
    return last;
  }

  static std::vector<double> raw_population(const SdcTruth& t) {
    t.validate();
    const std::size_t K = static_cast<std::size_t>(t.config.players), nzs = t.config.z_atoms.size();
    const std::size_t ny = ipow(2, K), nz = ipow(nzs, K), nu = t.u_points.size();
    const auto pi = payoffs(t.config, t.theta0);
    std::vector<double> w(ny * nz, 0.0);
    for (std::size_t z = 0; z < nz; ++z) {
      std::vector<std::size_t> zi(K);
      std::size_t rest = z;
      for (std::size_t k = K; k-- > 0;) {
        zi[k] = rest % nzs;
        rest /= nzs;
      }
      for (std::size_t u = 0; u < ipow(nu, K); ++u) {
        std::vector<double> uv(K);
        double p = t.z_mass[z];
        std::size_t r2 = u;
        for (std::size_t k = K; k-- > 0;) {
          uv[k] = t.u_points[r2 % nu];
          p *= t.u_mass[r2 % nu];
          r2 /= nu;
        }
        if (p == 0.0) continue;
        const auto eq = equilibria(t.config, pi, zi, uv, nullptr);
        if (eq.empty()) throw ContractError("incoherent truth: a latent draw with positive mass has no equilibrium");
        for (std::size_t y : eq) w[y * nz + z] += p / static_cast<double>(eq.size());
      }
    }
    double sum = 0.0;
    for (double v : w) sum += v;
    for (double& v : w) v /= sum;
    return w;
  }

  static StructuralModel build(const SdcTruth& t) {
    SdcConfig cfg = t.config;
    if (!cfg.tau_hat) cfg.tau_hat = sdc_tau_hat(cfg, raw_population(t));
    return build_sdc(cfg);
  }

  SdcTruth t_;
  StructuralModel model_;
};

}  // namespace

std::unique_ptr<Truth> make_truth(const SdcTruth& truth) { return std::make_unique<SdcTruthImpl>(truth); }

}  // namespace ptb
