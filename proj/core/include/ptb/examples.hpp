#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ptb/measure.hpp"
#include "ptb/model.hpp"

namespace ptb {

// ---- program evaluation with a threshold selection equation ----

struct ProgramEvalConfig {
  std::vector<double> z0_atoms{0.0, 1.0};
  std::vector<double> x_atoms{0.0};
  double y_lb = 0.0;
  double y_ub = 1.0;
  int outcome_grid_points = 3;
  int u_grid_points = 5;
  int g_grid_points = 3;
  // Optional explicit levels for the propensity table g and the cell-probability table t.
  // Defaults are k / (g_grid_points - 1).
  std::vector<double> g_levels;
  std::vector<double> t_levels;
  std::optional<double> mu_star;

  void validate() const;
  std::vector<double> outcome_grid() const;
  std::vector<double> u_grid() const;
  std::vector<double> resolved_g_levels() const;
  std::vector<double> resolved_t_levels() const;
};

// Observed y atoms are (y, d); z atoms are (z0, x); latent atoms are (u0, u1, u);
// counterfactual atoms are (ystar, dstar). Theta stacks the g and t tables over z atoms.
StructuralModel build_program_evaluation(const ProgramEvalConfig& cfg);

// Policy ids for all maps of an n-point set into itself, in lexicographic order.
PolicyGrid all_self_maps(std::size_t n);

// ---- simultaneous discrete choice ----

struct SdcConfig {
  int players = 1;
  std::vector<double> z_atoms{0.0, 1.0};
  // pi_k(z, y_{-k}; theta_k) = sum_b theta_{k,b} basis[b][slot], slot = z_index * 2^(K-1) + pattern(y_{-k}).
  std::vector<std::vector<double>> basis;
  // Candidate values of each coefficient b (shared across players).
  std::vector<std::vector<double>> coefficient_grid;
  double l0 = 1.0;
  double l_prime = 1.0;
  double l = 1.0;
  int u_grid_points = 9;
  int target_player = 0;
  std::optional<double> tau_hat;  // plug-in; required by the builder
  std::optional<double> mu_star;

  void validate() const;
  std::size_t slots() const;
};

StructuralModel build_sdc(const SdcConfig& cfg);

// Smallest non-zero |0.5 - P(Y_k = 1 | Z_k = z, Y_{-k} = y_{-k})| under the measure.
// Throws InvalidModelError("degenerate tau") when every such distance is zero.
double sdc_tau_hat(const SdcConfig& cfg, const std::vector<double>& cell_weights);

// Cells (y, z, u, theta, gamma) whose counterfactual set is empty, up to `limit` entries.
std::vector<std::string> coherency_failures(const StructuralModel& model, std::size_t limit = 20);

// ---- data-generating processes with known truth ----

class Truth {
 public:
  virtual ~Truth() = default;
  virtual const StructuralModel& model() const = 0;
  virtual WeightedMeasure population() const = 0;
  // n i.i.d. draws; row i depends only on (seed, i).
  virtual Sample simulate(std::size_t n, std::uint64_t seed) const = 0;
  virtual std::string kind() const = 0;
};

struct ProgramEvalTruth {
  ProgramEvalConfig config;
  std::vector<double> pz;      // over z atoms
  std::vector<double> g0;      // true propensity per z atom
  std::vector<double> u_mass;  // over the u grid
  // (U0, U1) given U: [u][i0][i1] over outcome grid indices.
  std::vector<double> outcome_joint;

  void validate() const;
};

struct SdcTruth {
  SdcConfig config;
  std::vector<double> theta0;  // stacked theta_{k,b}
  std::vector<double> u_points;
  std::vector<double> u_mass;  // per-player latent law, players independent
  std::vector<double> z_mass;  // over z tuples
  // Equilibrium selection: uniform over the equilibrium set.

  void validate() const;
};

std::unique_ptr<Truth> make_truth(const ProgramEvalTruth& truth);
// The SDC truth builds its model with tau_hat computed from its own population measure
// unless config.tau_hat is set.
std::unique_ptr<Truth> make_truth(const SdcTruth& truth);

}  // namespace ptb
