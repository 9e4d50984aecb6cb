#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ptb/envelope.hpp"
#include "ptb/measure.hpp"
#include "ptb/model.hpp"

namespace ptb {

struct RademacherDraw {
  std::vector<int> signs;
  std::uint64_t seed = 0;

  static RademacherDraw generate(std::size_t n, std::uint64_t seed);
};

// Identifies a class member: h(theta, gamma, lambda), or a difference of two members.
struct ClassRow {
  Index theta = 0;
  Index gamma = 0;
  std::uint64_t lambda = 0;  // bit j is lambda_j
  Index theta2 = kNoIndex;
  Index gamma2 = kNoIndex;
  std::uint64_t lambda2 = 0;
};

// Function values of a class restricted to the sample points, one row per member.
struct RestrictedClass {
  std::size_t n = 0;
  std::vector<double> values;  // row-major, rows x n
  std::vector<ClassRow> rows;
  double bound = 0.0;
  std::uint64_t dropped_rows = 0;

  std::size_t size() const { return rows.size(); }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * n, n}; }
  void add_row(const ClassRow& id, std::span<const double> v);
};

// sup over rows of |(1/n) sum_i signs_i * value_i|.
double rademacher_complexity(const RestrictedClass& cls, const RademacherDraw& draw);

// Explicit matrix of h_integrand(lower) values at the sample points for every
// (theta, gamma in subset, lambda), or every ordered pair of such members.
// Refuses with BudgetError when the matrix would exceed max_entries.
RestrictedClass restrict_hlb(const StructuralModel& model, const Sample& sample, const std::vector<Index>& policy_subset,
                             bool include_differences, double max_entries = 5e7);

enum class CoverNorm {
  psi,        // (sum_i (f_i - g_i)^2)^(1/2)
  empirical,  // (mean_i (f_i - g_i)^2)^(1/2)
};

// Size of a farthest-point greedy eps-cover. A greedy upper bound, not the covering number.
std::size_t empirical_covering_number(const RestrictedClass& cls, double eps, CoverNorm norm = CoverNorm::psi);

struct ClassComplexity {
  double r_n = 0.0;
  double class_size = 0.0;  // number of members, counting dropped ones
  std::uint64_t dropped_rows = 0;
  bool symmetrized = false;
};

// Same quantity as rademacher_complexity(restrict_hlb(...)) computed from the engine's
// integrand tables without materialising rows. The plain class uses
// max(max S, -min S); the difference class uses max S - min S, where S ranges over the
// signed sums of class members. With `symmetrized` the class is closed under negation,
// which leaves the absolute-value supremum unchanged; the flag is recorded for reporting.
ClassComplexity hlb_rademacher(const EnvelopeEngine& engine, const Sample& sample,
                               const std::vector<Index>& policy_subset, bool include_differences,
                               const RademacherDraw& draw, bool symmetrized = false);

}  // namespace ptb
