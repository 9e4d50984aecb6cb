#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ptb/envelope.hpp"
#include "ptb/errors.hpp"
#include "ptb/measure.hpp"

namespace ptb {

struct DeltaSchedule {
  std::vector<double> deltas;  // strictly decreasing, positive
  double a = 2.0;

  double b() const { return 2.0 - 1.0 / a; }
  // delta_j = delta_0 q^j with delta_0 = 2 h_bar / (1 - 1/a) * inflate.
  static DeltaSchedule geometric(double h_bar, double a, double q = 0.9, std::size_t terms = 40,
                                 double inflate = 1.01);
  // Throws ContractError unless decreasing, positive and (1 - 1/a) delta_0 > 2 h_bar.
  void validate(double h_bar) const;
};

// T on (lo, hi]; intervals are ordered from the top (hi = delta_0) down to lo = 0.
struct StepInterval {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;
  double r_n = 0.0;
  std::size_t subset_size = 0;
  std::uint64_t dropped_rows = 0;
};

struct StepBound {
  std::vector<StepInterval> intervals;

  double delta0() const { return intervals.empty() ? 0.0 : intervals.front().hi; }
  // Left-continuous step function, zero above delta_0.
  double at(double delta) const;
};

struct LevelSetResult {
  double delta_star = 0.0;
  double delta = 0.0;
  double kappa = 0.0;
  double a = 2.0;
  std::uint64_t seed = 0;
  std::vector<Index> inner;  // empirical level set at delta / a
  std::vector<Index> outer;  // empirical level set at (2 - 1/a) delta
  std::vector<double> regrets;
  StepBound trace;
};

class DeltaBelowThreshold : public ContractError {
 public:
  DeltaBelowThreshold(double delta, double delta_star, double a);
  double delta_star;
};

std::vector<double> empirical_regret_curve(const EnvelopeEngine& engine, const Sample& sample);
std::vector<Index> level_set(const std::vector<double>& regrets, double delta);

// sqrt(5 ln(c2 j)) with c2 = (3 / (2 (1 - kappa)))^(2/5).
double t_sequence(std::size_t j, double kappa);

StepBound step_bound(const EnvelopeEngine& engine, const Sample& sample, const DeltaSchedule& schedule, double kappa,
                     std::uint64_t seed);
StepBound step_bound(const EnvelopeEngine& engine, const Sample& sample, const std::vector<double>& regrets,
                     const DeltaSchedule& schedule, double kappa, std::uint64_t seed);

double flat_transform(const StepBound& step, double sigma);
double sharp_transform(const StepBound& step, double eta);
double delta_star(const StepBound& step, double a, double margin);

inline constexpr double kDefaultMargin = 1e-6;

// With delta unset, delta = a * delta_star is used.
LevelSetResult level_set_sandwich(const EnvelopeEngine& engine, const Sample& sample, double kappa, double a,
                                  std::optional<double> delta, std::uint64_t seed,
                                  std::optional<DeltaSchedule> schedule = std::nullopt,
                                  double margin = kDefaultMargin);

}  // namespace ptb
