#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ptb/envelope.hpp"
#include "ptb/examples.hpp"

namespace ptb {

enum class ExperimentKind { certificate, sandwich, eme_containment, rate };

ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::certificate;
  std::vector<std::size_t> n_list{500};
  std::size_t reps = 200;
  double kappa = 0.9;
  double a = 2.0;
  std::optional<double> epsilon;  // default: default_epsilon(model)
  std::uint64_t seed = 0;
  unsigned threads = 0;           // 0: hardware concurrency
  EnvelopeOptions envelope;
};

struct ReplicationRecord {
  std::size_t n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::string gamma_hat;
  double regret = 0.0;       // population regret of the selected policy
  double c_n = 0.0;          // certificate mode
  bool certificate_valid = true;
  double delta_star = 0.0;   // sandwich modes
  double delta = 0.0;
  bool inner_ok = false;     // inner set inside the true level set
  bool outer_ok = false;     // true level set inside the outer set
  bool eme_in_level_set = false;
  bool epsilon_ok = true;    // epsilon <= delta_star
  bool covered = false;      // the event counted by this experiment kind
};

struct SizeSummary {
  std::size_t n = 0;
  std::size_t reps = 0;
  double mean_regret = 0.0;
  double coverage = 0.0;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::certificate;
  double kappa = 0.0;
  double a = 0.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::vector<ReplicationRecord> replications;  // ordered by (n, rep)
  std::vector<SizeSummary> summaries;
  double coverage = 0.0;  // over all replications
  // Rate mode: least-squares fit of log mean regret on log n. NaN when a mean is zero.
  double slope = 0.0;
  double intercept = 0.0;
};

// Replication r at sample size n uses seed derive_seed(derive_seed(seed, n), r); the
// sample is drawn with its stream 0 and the Rademacher signs with stream 1.
ExperimentReport run_coverage_experiment(const Truth& truth, const ExperimentConfig& config);

// Ordinary least squares of y on x; returns (slope, intercept).
std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y);

std::string experiment_json(const ExperimentReport& report);
std::string experiment_csv(const ExperimentReport& report);

}  // namespace ptb
