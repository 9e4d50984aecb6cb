#include "ptb/levelset.hpp"

#include <algorithm>
#include <cmath>

#include "ptb/complexity.hpp"
#include "ptb/decision.hpp"
#include "ptb/rng.hpp"

namespace ptb {

DeltaSchedule DeltaSchedule::geometric(double h_bar, double a, double q, std::size_t terms, double inflate) {
  if (!(a > 1.0)) throw ContractError("a must exceed 1");
  if (!(q > 0.0 && q < 1.0) || terms == 0) throw ContractError("geometric schedule needs 0 < q < 1 and terms >= 1");
  DeltaSchedule s;
  s.a = a;
  double d = 2.0 * h_bar / (1.0 - 1.0 / a) * inflate;
  for (std::size_t j = 0; j < terms; ++j, d *= q) s.deltas.push_back(d);
  return s;
}

void DeltaSchedule::validate(double h_bar) const {
  if (!(a > 1.0)) throw ContractError("a must exceed 1");
  if (deltas.empty()) throw ContractError("delta schedule is empty");
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    if (!(deltas[j] > 0.0)) throw ContractError("delta schedule entries must be positive");
    if (j && !(deltas[j] < deltas[j - 1])) throw ContractError("delta schedule must be strictly decreasing");
  }
  if (!((1.0 - 1.0 / a) * deltas.front() > 2.0 * h_bar))
    throw ContractError("delta schedule start too small: need (1 - 1/a) delta_0 > 2 h_bar = " + format_real(2.0 * h_bar));
}

double StepBound::at(double delta) const {
  for (const auto& iv : intervals)
    if (delta > iv.lo && delta <= iv.hi) return iv.value;
  return 0.0;
}

DeltaBelowThreshold::DeltaBelowThreshold(double delta, double ds, double a)
    : ContractError("delta below procedure threshold: delta = " + format_real(delta) + " < a * delta_star = " +
                    format_real(a * ds) + " (delta_star = " + format_real(ds) + ")"),
      delta_star(ds) {}

std::vector<double> empirical_regret_curve(const EnvelopeEngine& engine, const Sample& sample) {
  const auto measure = WeightedMeasure::empirical(engine.model().support(), sample);
  return regrets_from_values(engine.lower_values(measure));
}

std::vector<Index> level_set(const std::vector<double>& regrets, double delta) {
  if (!(delta >= 0.0)) throw ContractError("level set threshold must be non-negative");
  std::vector<Index> out;
  for (Index g = 0; g < regrets.size(); ++g)
    if (regrets[g] <= delta) out.push_back(g);
  return out;
}

double t_sequence(std::size_t j, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw ContractError("kappa must lie in (0, 1)");
  const double c2 = std::pow(3.0 / (2.0 * (1.0 - kappa)), 0.4);
  if (j == 0 || !(c2 * static_cast<double>(j) > 1.0)) {
    const auto jmin = static_cast<std::size_t>(std::floor(1.0 / c2)) + 1;
    throw ContractError("t_j undefined for j = " + std::to_string(j) + "; smallest admissible j is " +
                        std::to_string(std::max<std::size_t>(jmin, 1)));
  }
  return std::sqrt(5.0 * std::log(c2 * static_cast<double>(j)));
}

StepBound step_bound(const EnvelopeEngine& engine, const Sample& sample, const DeltaSchedule& schedule, double kappa,
                     std::uint64_t seed) {
  return step_bound(engine, sample, empirical_regret_curve(engine, sample), schedule, kappa, seed);
}

StepBound step_bound(const EnvelopeEngine& engine, const Sample& sample, const std::vector<double>& regrets,
                     const DeltaSchedule& schedule, double kappa, std::uint64_t seed) {
  const double h_bar = engine.model().h_bar();
  schedule.validate(h_bar);
  const double h_prime = 2.0 * h_bar;
  const double root_n = std::sqrt(static_cast<double>(sample.n()));
  std::vector<Index> all(engine.model().policies().size());
  for (Index g = 0; g < all.size(); ++g) all[g] = g;

  StepBound sb;
  const auto& d = schedule.deltas;
  for (std::size_t j = 0; j < d.size(); ++j) {
    StepInterval iv;
    iv.hi = d[j];
    iv.lo = j + 1 < d.size() ? d[j + 1] : 0.0;
    const std::vector<Index> subset = j == 0 ? all : level_set(regrets, schedule.b() * d[j]);
    if (subset.empty()) throw ContractError("empty policy subset in step bound interval " + std::to_string(j));
    const auto draw = RademacherDraw::generate(sample.n(), derive_seed(seed, j));
    const ClassComplexity cc = hlb_rademacher(engine, sample, subset, true, draw);
    if (static_cast<double>(cc.dropped_rows) >= cc.class_size)
      throw ContractError("difference class is empty in step bound interval " + std::to_string(j));
    iv.r_n = cc.r_n;
    iv.subset_size = subset.size();
    iv.dropped_rows = cc.dropped_rows;
    iv.value = 2.0 * cc.r_n + (j == 0 ? 0.0 : 3.0 * t_sequence(j, kappa) * h_prime / root_n);
    sb.intervals.push_back(iv);
  }
  return sb;
}

double flat_transform(const StepBound& step, double sigma) {
  if (!(sigma > 0.0)) throw ContractError("flat transform needs sigma > 0");
  double best = 0.0;
  for (const auto& iv : step.intervals)
    if (iv.hi >= sigma) best = std::max(best, iv.value / std::max(sigma, iv.lo));
  return best;
}

double sharp_transform(const StepBound& step, double eta) {
  if (!(eta > 0.0)) throw ContractError("sharp transform needs eta > 0");
  // Each interval admits sigma above a threshold; the infimum is the largest threshold.
  double sigma = 0.0;
  for (const auto& iv : step.intervals) {
    double need;
    // Same quotient as the flat transform, so sharp(flat(sigma)) <= sigma survives rounding.
    if (iv.value == 0.0 || (iv.lo > 0.0 && iv.value / iv.lo <= eta))
      need = 0.0;
    else if (iv.value / eta <= iv.hi)
      need = iv.value / eta;
    else
      need = iv.hi;
    sigma = std::max(sigma, need);
  }
  return sigma;
}

double delta_star(const StepBound& step, double a, double margin) {
  if (!(a > 1.0)) throw ContractError("a must exceed 1");
  if (!(margin > 0.0)) throw ContractError("margin must be positive");
  const double s = sharp_transform(step, 1.0 - 1.0 / a);
  if (!std::isfinite(s)) throw ContractError("sharp transform is unbounded: increase n or widen the schedule");
  return s + margin;
}

LevelSetResult level_set_sandwich(const EnvelopeEngine& engine, const Sample& sample, double kappa, double a,
                                  std::optional<double> delta, std::uint64_t seed,
                                  std::optional<DeltaSchedule> schedule, double margin) {
  if (!(a > 1.0)) throw ContractError("a must exceed 1");
  const DeltaSchedule sched = schedule ? *schedule : DeltaSchedule::geometric(engine.model().h_bar(), a);
  if (sched.a != a) throw ContractError("schedule a differs from the requested a");
  LevelSetResult r;
  r.kappa = kappa;
  r.a = a;
  r.seed = seed;
  r.regrets = empirical_regret_curve(engine, sample);
  r.trace = step_bound(engine, sample, r.regrets, sched, kappa, seed);
  r.delta_star = delta_star(r.trace, a, margin);
  r.delta = delta.value_or(a * r.delta_star);
  if (r.delta < a * r.delta_star) throw DeltaBelowThreshold(r.delta, r.delta_star, a);
  r.inner = level_set(r.regrets, r.delta / a);
  r.outer = level_set(r.regrets, sched.b() * r.delta);
  return r;
}

}  // namespace ptb
