#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ptb/envelope.hpp"
#include "ptb/measure.hpp"

namespace ptb {

struct Certificate {
  std::string gamma_hat;
  Index gamma_index = 0;
  double c_n = 0.0;
  double r_n = 0.0;
  double h_bar = 0.0;
  std::size_t n = 0;
  double kappa = 0.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  bool valid = true;
  std::uint64_t dropped_rows = 0;
  double class_size = 0.0;

  // 4 r + sqrt(72 ln(2 / (2 - kappa)) h^2 / n) + 5 eps, for kappa in [0, 1).
  static double formula(double r_n, double h_bar, std::size_t n, double kappa, double epsilon);
  double recompute() const { return formula(r_n, h_bar, n, kappa, epsilon); }
};

// 1e-3 times the width of the objective range.
double default_epsilon(const StructuralModel& model);

// First index of the largest finite value. Throws ContractError("no admissible policy")
// when no value is finite.
Index argmax_first(const std::vector<double>& values);

// Exact maximiser of the empirical lower envelope; ties go to the first policy.
Index eme_select(const EnvelopeEngine& engine, const Sample& sample, double epsilon);
Index eme_select(const StructuralModel& model, const Sample& sample, double epsilon);

Certificate certificate_cn(const EnvelopeEngine& engine, const Sample& sample, double kappa, double epsilon,
                           std::uint64_t seed);
Certificate certificate_cn(const StructuralModel& model, const Sample& sample, double kappa, double epsilon,
                           std::uint64_t seed);

// Regret of every policy under the given (population) lower envelope values.
std::vector<double> regrets_from_values(const std::vector<double>& values);

double true_regret(const EnvelopeEngine& engine, const WeightedMeasure& population, Index gamma);
double true_regret(const StructuralModel& model, const WeightedMeasure& population, Index gamma);

}  // namespace ptb
