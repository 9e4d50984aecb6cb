#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ptb/measure.hpp"
#include "ptb/model.hpp"

namespace ptb {

enum class MultiplierDomain {
  binary,  // lambda in {0,1}^J, the stated envelope problem
  hull,    // lambda in [0,1]^J, solved as a linear program per theta (diagnostic)
};

struct EnvelopeOptions {
  // Largest number of latent-dependent moments enumerated exactly per theta.
  int exact_cutoff = 20;
  // Upper limit on sum over theta of 2^(coupled moments) for exact enumeration.
  double enumeration_budget = 1e10;
  // When exact enumeration is refused: coordinate ascent if true, BudgetError otherwise.
  bool allow_heuristic = true;
  int restarts = 8;
  std::uint64_t seed = 0;
  MultiplierDomain domain = MultiplierDomain::binary;
  // Restrict the multiplier maximisation to lambda = 0.
  bool zero_multipliers_only = false;
  // Cached integrand tables are limited to this many doubles; beyond it they are rebuilt on demand.
  std::size_t table_budget = std::size_t{1} << 26;
};

inline constexpr Index kNoIndex = static_cast<Index>(-1);

struct EnvelopeValue {
  double value = 0.0;
  Index theta = kNoIndex;      // optimising theta, kNoIndex when every theta is non-finite
  std::vector<double> lambda;  // optimising multipliers at that theta, length J
  bool heuristic = false;
};

struct EnvelopeRecord {
  std::string gamma_id;
  Index gamma = 0;
  double i_lb = 0.0;
  double i_ub = 0.0;
  Index theta_lb = kNoIndex;
  Index theta_ub = kNoIndex;
  std::vector<double> lambda_lb;
  std::vector<double> lambda_ub;
  bool heuristic = false;
};

using EnvelopeCurve = std::vector<EnvelopeRecord>;

// Read-only view of the integrand table for one (side, theta, gamma).
// Both sides are stored in "lower form": the lower integrand is
//   h(c, k) + mu * sum over separable j of lambda_j * sep[c * n_sep + j]
// with h laid out as h[k * cells + c], k the bit pattern of the coupled multipliers.
// The upper integrand is the negation of the same expression built from -sup phi.
struct TableView {
  const double* h = nullptr;
  std::size_t patterns = 0;
  std::size_t cells = 0;
  const double* sep = nullptr;
  std::size_t n_sep = 0;
  const std::uint8_t* cell_infinite = nullptr;
  const std::vector<Index>* coupled = nullptr;
  const std::vector<Index>* separable = nullptr;
};

// Caches the per-theta and per-policy tables of one model so that many measures
// (population, empirical, signed) can be evaluated cheaply.
class EnvelopeEngine {
 public:
  explicit EnvelopeEngine(const StructuralModel& model, EnvelopeOptions options = {});
  ~EnvelopeEngine();
  EnvelopeEngine(const EnvelopeEngine&) = delete;
  EnvelopeEngine& operator=(const EnvelopeEngine&) = delete;

  const StructuralModel& model() const;
  const EnvelopeOptions& options() const;

  EnvelopeValue lower(const WeightedMeasure& measure, Index gamma) const;
  EnvelopeValue upper(const WeightedMeasure& measure, Index gamma) const;
  EnvelopeCurve curve(const WeightedMeasure& measure) const;
  std::vector<double> lower_values(const WeightedMeasure& measure) const;

  // True when every theta can be enumerated exactly under the options.
  bool exact() const;
  std::size_t coupled_count(Index theta) const;
  TableView table(Side side, Index theta, Index gamma) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

EnvelopeValue lower_envelope(const StructuralModel& model, const WeightedMeasure& measure, Index gamma,
                             const EnvelopeOptions& options = {});
EnvelopeValue upper_envelope(const StructuralModel& model, const WeightedMeasure& measure, Index gamma,
                             const EnvelopeOptions& options = {});
EnvelopeCurve envelope_curve(const StructuralModel& model, const WeightedMeasure& measure,
                             const EnvelopeOptions& options = {});

// Integral of h_integrand against the measure for one fixed (theta, gamma, lambda).
// Cells with zero weight are skipped, so infinite values there do not propagate.
double integrate_h(const StructuralModel& model, const WeightedMeasure& measure, Index theta, Index gamma,
                   std::span<const std::uint8_t> lambda, Side side);

}  // namespace ptb
