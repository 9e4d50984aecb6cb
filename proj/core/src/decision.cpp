#include "ptb/decision.hpp"

#include <algorithm>
#include <cmath>

#include "ptb/complexity.hpp"
#include "ptb/errors.hpp"

namespace ptb {

double Certificate::formula(double r_n, double h_bar, std::size_t n, double kappa, double epsilon) {
  if (n == 0) throw ContractError("certificate needs n >= 1");
  if (!(kappa >= 0.0 && kappa < 1.0)) throw ContractError("kappa must lie in (0, 1)");
  const double log_term = std::log(2.0 / (2.0 - kappa));
  return 4.0 * r_n + std::sqrt(72.0 * log_term * h_bar * h_bar / static_cast<double>(n)) + 5.0 * epsilon;
}

double default_epsilon(const StructuralModel& model) {
  const double width = model.objective().phi_ub - model.objective().phi_lb;
  return width > 0.0 ? 1e-3 * width : 1e-3;
}

Index argmax_first(const std::vector<double>& values) {
  Index best = kNoIndex;
  for (Index g = 0; g < values.size(); ++g) {
    if (!std::isfinite(values[g])) continue;
    if (best == kNoIndex || values[g] > values[best]) best = g;
  }
  if (best == kNoIndex) throw ContractError("no admissible policy: every lower envelope value is non-finite");
  return best;
}

Index eme_select(const EnvelopeEngine& engine, const Sample& sample, double epsilon) {
  if (!(epsilon > 0.0)) throw ContractError("epsilon must be positive");
  const auto measure = WeightedMeasure::empirical(engine.model().support(), sample);
  const auto values = engine.lower_values(measure);
  const Index pick = argmax_first(values);
  const double top = *std::max_element(values.begin(), values.end());
  if (!(values[pick] + epsilon >= top)) throw std::logic_error("eME inequality violated");
  return pick;
}

Index eme_select(const StructuralModel& model, const Sample& sample, double epsilon) {
  return eme_select(EnvelopeEngine(model), sample, epsilon);
}

Certificate certificate_cn(const EnvelopeEngine& engine, const Sample& sample, double kappa, double epsilon,
                           std::uint64_t seed) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw ContractError("kappa must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw ContractError("epsilon must be positive");
  const StructuralModel& model = engine.model();
  Certificate c;
  c.gamma_index = eme_select(engine, sample, epsilon);
  c.gamma_hat = model.policies().ids[c.gamma_index];
  std::vector<Index> all(model.policies().size());
  for (Index g = 0; g < all.size(); ++g) all[g] = g;
  const auto draw = RademacherDraw::generate(sample.n(), seed);
  const ClassComplexity cc = hlb_rademacher(engine, sample, all, false, draw);
  c.r_n = cc.r_n;
  c.h_bar = model.h_bar();
  c.n = sample.n();
  c.kappa = kappa;
  c.epsilon = epsilon;
  c.seed = seed;
  c.dropped_rows = cc.dropped_rows;
  c.class_size = cc.class_size;
  c.valid = cc.dropped_rows == 0;
  c.c_n = c.recompute();
  return c;
}

Certificate certificate_cn(const StructuralModel& model, const Sample& sample, double kappa, double epsilon,
                           std::uint64_t seed) {
  return certificate_cn(EnvelopeEngine(model), sample, kappa, epsilon, seed);
}

std::vector<double> regrets_from_values(const std::vector<double>& values) {
  const Index best = argmax_first(values);
  std::vector<double> r(values.size());
  for (Index g = 0; g < values.size(); ++g) r[g] = std::isfinite(values[g]) ? values[best] - values[g] : kInf;
  return r;
}

double true_regret(const EnvelopeEngine& engine, const WeightedMeasure& population, Index gamma) {
  population.validate();
  if (gamma >= engine.model().policies().size()) throw ContractError("policy index out of range");
  return regrets_from_values(engine.lower_values(population))[gamma];
}

double true_regret(const StructuralModel& model, const WeightedMeasure& population, Index gamma) {
  return true_regret(EnvelopeEngine(model), population, gamma);
}

}  // namespace ptb
