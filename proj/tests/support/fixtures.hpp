#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "ptb/examples.hpp"
#include "ptb/measure.hpp"
#include "ptb/tabulated.hpp"

namespace fixtures {

using ptb::Index;

inline std::vector<double> iota_values(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
  return v;
}

// Empty tables over scalar atoms 0..n-1; callers fill gminus, gstar, phi and moments.
inline ptb::TabulatedModelSpec blank_spec(std::size_t ny, std::size_t nz, std::size_t nu, std::size_t nt,
                                          std::size_t ng, std::size_t na, std::size_t J) {
  ptb::TabulatedModelSpec s;
  s.support.y = ptb::scalar_atoms("y", iota_values(ny));
  s.support.z = ptb::scalar_atoms("z", iota_values(nz));
  s.support.u = ptb::scalar_atoms("u", iota_values(nu));
  s.support.ystar = ptb::scalar_atoms("ystar", iota_values(na));
  s.support.grid_resolution = {static_cast<int>(nu)};
  s.theta.columns = {"theta"};
  for (std::size_t t = 0; t < nt; ++t) s.theta.candidates.push_back({static_cast<double>(t)});
  for (std::size_t g = 0; g < ng; ++g) s.policies.ids.push_back("p" + std::to_string(g));
  for (std::size_t j = 0; j < J; ++j) s.moments.push_back({"m" + std::to_string(j), 1.0});
  s.objective = {0.0, 1.0};
  s.constants = {1.0, 1.0, 1.0};
  s.allocate();
  return s;
}

struct RandomShape {
  std::size_t ny = 2, nz = 2, nu = 3, nt = 2, ng = 2, na = 2, J = 2;
};

// Random tabulated model. Factual and counterfactual sets are non-empty with
// probability 1 - p_empty; moments are uniform on [-1, 1], some made u-constant.
inline ptb::TabulatedModelSpec random_spec(std::mt19937_64& rng, const RandomShape& sh, double p_empty = 0.0) {
  auto s = blank_spec(sh.ny, sh.nz, sh.nu, sh.nt, sh.ng, sh.na, sh.J);
  std::uniform_real_distribution<double> unit(0.0, 1.0), sym(-1.0, 1.0);
  auto subset = [&](std::size_t n) {
    std::vector<Index> out;
    if (unit(rng) < p_empty) return out;
    for (Index i = 0; i < n; ++i)
      if (unit(rng) < 0.5) out.push_back(i);
    if (out.empty()) out.push_back(static_cast<Index>(rng() % n));
    return out;
  };
  for (auto& g : s.gminus) g = subset(sh.nu);
  for (auto& g : s.gstar) g = subset(sh.na);
  for (auto& p : s.phi) p = unit(rng);
  for (auto& m : s.moment_values) m = sym(rng);
  // Make some moments constant in u so the separable path is exercised.
  for (std::size_t j = 0; j < sh.J; ++j) {
    if (unit(rng) < 0.5) continue;
    for (Index y = 0; y < sh.ny; ++y)
      for (Index z = 0; z < sh.nz; ++z)
        for (Index t = 0; t < sh.nt; ++t) {
          const double v = s.moment_values[s.moment_index(y, z, 0, t, j)];
          for (Index u = 1; u < sh.nu; ++u) s.moment_values[s.moment_index(y, z, u, t, j)] = v;
        }
  }
  return s;
}

inline ptb::WeightedMeasure random_measure(std::mt19937_64& rng, const ptb::SupportSpec& s, double p_zero = 0.2) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> w(s.cell_count());
  double sum = 0.0;
  for (auto& v : w) sum += v = unit(rng) < p_zero ? 0.0 : unit(rng);
  if (sum == 0.0) {
    w[0] = 1.0;
    sum = 1.0;
  }
  for (auto& v : w) v /= sum;
  return ptb::WeightedMeasure::from_weights(s, std::move(w));
}

inline ptb::Sample random_sample(std::mt19937_64& rng, const ptb::SupportSpec& s, std::size_t n) {
  ptb::Sample out;
  for (std::size_t i = 0; i < n; ++i) out.push(rng() % s.y.size(), rng() % s.z.size());
  return out;
}

// Program-evaluation truth with a near-tie between the two best policies, so that the
// selected policy's regret shrinks gradually with n instead of vanishing at once.
inline ptb::ProgramEvalTruth near_tie_truth() {
  ptb::ProgramEvalTruth t;
  t.config.g_levels = {0.25, 0.5, 0.75};
  t.config.t_levels = {0.3, 0.7};
  t.pz = {0.7, 0.3};
  t.g0 = {0.25, 0.75};
  t.u_mass = {0.0, 0.25, 0.25, 0.25, 0.25};
  const std::size_t ny = 3;
  t.outcome_joint.assign(5 * ny * ny, 1.0 / 9.0);
  for (std::size_t u = 0; u < 5; ++u) {
    t.outcome_joint[u * 9 + 2 * 3 + 0] += 0.0775;  // (u0, u1) = (high, low)
    t.outcome_joint[u * 9 + 0 * 3 + 2] -= 0.0775;  // (u0, u1) = (low, high)
  }
  return t;
}

// Tiny program-evaluation truth: |Z0| = 2, |X| = 1, 3 outcome atoms, 5 latent points,
// two g levels and three t tables, so |Theta| = 12.
inline ptb::ProgramEvalTruth random_tiny_truth(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ptb::ProgramEvalTruth t;
  std::vector<double> g = {0.25, 0.5, 0.75};
  std::shuffle(g.begin(), g.end(), rng);
  t.config.g_levels = {std::min(g[0], g[1]), std::max(g[0], g[1])};
  const double p = std::vector<double>{0.2, 0.3, 0.4}[rng() % 3];
  t.config.t_levels = {p, 0.5, 1.0 - p};
  t.pz = rng() % 2 ? std::vector<double>{p, 1.0 - p} : std::vector<double>{0.5, 0.5};
  t.g0 = {t.config.g_levels[rng() % 2], t.config.g_levels[rng() % 2]};
  // The selection moments need P(U <= g) = g on the g levels.
  t.u_mass = {0.0, 0.25, 0.25, 0.25, 0.25};
  t.outcome_joint.resize(5 * 9);
  for (std::size_t u = 0; u < 5; ++u) {
    double s = 0.0;
    for (std::size_t k = 0; k < 9; ++k) s += t.outcome_joint[u * 9 + k] = unit(rng);
    for (std::size_t k = 0; k < 9; ++k) t.outcome_joint[u * 9 + k] /= s;
  }
  return t;
}

// Single-player discrete choice with one basis function and payoff pi(z) = theta * b(z).
inline ptb::SdcTruth single_player_truth() {
  ptb::SdcTruth t;
  t.config.players = 1;
  t.config.z_atoms = {0.0, 1.0};
  t.config.basis = {{0.5, -0.5}};
  t.config.coefficient_grid = {{0.5, 1.0}};
  t.config.l0 = 1.0;
  t.config.l_prime = 0.5;
  t.config.l = 1.0;
  t.config.u_grid_points = 5;
  t.theta0 = {1.0};
  t.u_points = {-1.0, -0.5, 0.0, 0.5, 1.0};
  t.u_mass = {0.2, 0.2, 0.2, 0.2, 0.2};
  t.z_mass = {0.5, 0.5};
  return t;
}

}  // namespace fixtures
