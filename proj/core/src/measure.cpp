#include "ptb/measure.hpp"

#include <cmath>

#include "ptb/errors.hpp"

namespace ptb {

std::vector<double> cell_counts(const SupportSpec& support, const Sample& sample) {
  if (sample.y.size() != sample.z.size()) throw ContractError("sample columns have different lengths");
  std::vector<double> c(support.cell_count(), 0.0);
  for (Index i = 0; i < sample.n(); ++i) {
    if (sample.y[i] >= support.y.size() || sample.z[i] >= support.z.size())
      throw ContractError("sample row " + std::to_string(i) + " lies outside the support");
    c[support.cell(sample.y[i], sample.z[i])] += 1.0;
  }
  return c;
}

WeightedMeasure WeightedMeasure::empirical(const SupportSpec& support, const Sample& sample) {
  if (sample.n() == 0) throw ContractError("empirical measure needs at least one observation");
  WeightedMeasure m;
  m.ny = support.y.size();
  m.nz = support.z.size();
  m.weights = cell_counts(support, sample);
  const double n = static_cast<double>(sample.n());
  for (double& w : m.weights) w /= n;
  return m;
}

WeightedMeasure WeightedMeasure::from_weights(const SupportSpec& support, std::vector<double> weights) {
  WeightedMeasure m;
  m.ny = support.y.size();
  m.nz = support.z.size();
  m.weights = std::move(weights);
  m.validate();
  return m;
}

void WeightedMeasure::validate() const {
  if (weights.size() != ny * nz) throw ContractError("measure has the wrong number of cells");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ContractError("measure weights must be finite and non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ContractError("measure weights sum to " + format_real(sum) + ", not 1");
}

WeightedMeasure WeightedMeasure::mixture(const WeightedMeasure& a, const WeightedMeasure& b, double alpha) {
  if (a.weights.size() != b.weights.size()) throw ContractError("mixture of measures on different supports");
  WeightedMeasure m = a;
  for (Index i = 0; i < m.weights.size(); ++i) m.weights[i] = alpha * a.weights[i] + (1.0 - alpha) * b.weights[i];
  return m;
}

}  // namespace ptb
