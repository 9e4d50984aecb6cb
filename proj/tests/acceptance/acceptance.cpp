// Acceptance suite: one PASS/FAIL line per criterion.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "ptb/complexity.hpp"
#include "ptb/decision.hpp"
#include "ptb/envelope.hpp"
#include "ptb/examples.hpp"
#include "ptb/experiment.hpp"
#include "ptb/levelset.hpp"
#include "ptb/oracle.hpp"
#include "ptb/tabulated.hpp"

using namespace ptb;

namespace {

// Tolerances and Monte Carlo settings.
constexpr double kOracleTol = 1e-6;
constexpr double kExactTol = 1e-12;
constexpr double kCoverageFloor = 0.90;
constexpr double kSlopeCeiling = -0.35;
constexpr int kOracleInstances = 20;
constexpr int kRandomModels = 100;
constexpr int kCertificateTuples = 10;
constexpr std::size_t kReps = 200;
constexpr std::size_t kRateReps = 100;
constexpr double kOracleSeconds = 60.0;
constexpr double kCertificateSeconds = 600.0;
constexpr double kRateSeconds = 1800.0;
// Diagnostic penalty used to show where the gap in criterion 1 comes from.
constexpr double kDiagnosticMu = 16.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome oracle_equivalence(std::uint64_t seed, unsigned) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(seed);
  double gap_lb = 0.0, gap_ub = 0.0, hull_gap = 0.0, hull_mu_gap = 0.0;
  int infeasible = 0;
  for (int k = 0; k < kOracleInstances; ++k) {
    const auto truth = make_truth(fixtures::random_tiny_truth(rng));
    const auto& m = truth->model();
    const auto pop = truth->population();
    EnvelopeOptions hull;
    hull.domain = MultiplierDomain::hull;
    const auto strong = m.with_mu_star(kDiagnosticMu);
    for (Index g = 0; g < m.policies().size(); ++g) {
      const auto o = oracle_envelope(m, pop, g);
      if (!o.feasible) {
        ++infeasible;
        continue;
      }
      gap_lb = std::max(gap_lb, std::abs(lower_envelope(m, pop, g).value - o.lb));
      gap_ub = std::max(gap_ub, std::abs(upper_envelope(m, pop, g).value - o.ub));
      hull_gap = std::max(hull_gap, std::abs(lower_envelope(m, pop, g, hull).value - o.lb));
      hull_mu_gap = std::max({hull_mu_gap, std::abs(lower_envelope(strong, pop, g, hull).value - o.lb),
                              std::abs(upper_envelope(strong, pop, g, hull).value - o.ub)});
    }
  }
  const double secs = seconds_since(t0);
  Outcome out;
  out.pass = infeasible == 0 && gap_lb <= kOracleTol && gap_ub <= kOracleTol && secs < kOracleSeconds;
  out.detail = "max|lb gap| " + fmt("%.3g", gap_lb) + ", max|ub gap| " + fmt("%.3g", gap_ub) +
               ", infeasible " + std::to_string(infeasible) + ", " + fmt("%.1fs", secs) +
               "; diagnostics (not counted): hull multipliers " + fmt("%.3g", hull_gap) + ", hull with mu=16 " +
               fmt("%.3g", hull_mu_gap);
  return out;
}

Outcome degenerate_exactness(std::uint64_t seed, unsigned) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < kRandomModels; ++k) {
    fixtures::RandomShape sh{2 + rng() % 3, 1 + rng() % 3, 2 + rng() % 3, 1, 1 + rng() % 3, 2, 0};
    auto s = fixtures::random_spec(rng, sh);
    for (auto& g : s.gminus) g.resize(1);
    for (auto& g : s.gstar) g.resize(1);
    const auto m = build_tabulated(s);
    const auto w = fixtures::random_measure(rng, m.support());
    for (Index g = 0; g < sh.ng; ++g) {
      double v = 0.0;
      for (Index y = 0; y < sh.ny; ++y)
        for (Index z = 0; z < sh.nz; ++z) {
          const Index u = s.gminus[s.gminus_index(y, z, 0)][0];
          const Index a = s.gstar[s.gstar_index(y, z, u, 0, g)][0];
          v += w.at(y, z) * s.phi[s.phi_index(a, y, z, u)];
        }
      worst = std::max({worst, std::abs(lower_envelope(m, w, g).value - v), std::abs(upper_envelope(m, w, g).value - v)});
    }
  }
  return {worst <= kExactTol, "max deviation from the integral of phi " + fmt("%.3g", worst)};
}

Outcome zero_multiplier_inclusion(std::uint64_t seed, unsigned) {
  std::mt19937_64 rng(seed);
  EnvelopeOptions zero;
  zero.zero_multipliers_only = true;
  int violations = 0, slack_cases = 0, slack_mismatch = 0;
  for (int k = 0; k < kRandomModels; ++k) {
    fixtures::RandomShape sh{2, 2, 3, 1 + rng() % 3, 2, 2, 1 + rng() % 3};
    const auto s = fixtures::random_spec(rng, sh);
    const auto m = build_tabulated(s);
    const auto w = fixtures::random_measure(rng, m.support());
    for (Index g = 0; g < sh.ng; ++g) {
      const auto full = lower_envelope(m, w, g);
      const auto restricted = lower_envelope(m, w, g, zero);
      if (full.value < restricted.value - kExactTol) ++violations;
      // First-argmin selection at the restricted optimum; if every moment is slack
      // there, adding multipliers cannot help the outer minimum.
      const Index t = restricted.theta;
      if (t == kNoIndex) continue;
      std::vector<double> e(sh.J, 0.0);
      for (Index y = 0; y < sh.ny; ++y)
        for (Index z = 0; z < sh.nz; ++z) {
          if (w.at(y, z) == 0.0) continue;
          double best = kInf;
          Index arg = 0;
          for (Index u : s.gminus[s.gminus_index(y, z, t)]) {
            double v = kInf;
            for (Index a : s.gstar[s.gstar_index(y, z, u, t, g)]) v = std::min(v, s.phi[s.phi_index(a, y, z, u)]);
            if (v < best) {
              best = v;
              arg = u;
            }
          }
          for (Index j = 0; j < sh.J; ++j) e[j] += w.at(y, z) * s.moment_values[s.moment_index(y, z, arg, t, j)];
        }
      if (std::all_of(e.begin(), e.end(), [](double v) { return v <= 0.0; })) {
        ++slack_cases;
        if (std::abs(full.value - restricted.value) > kExactTol) ++slack_mismatch;
      }
    }
  }
  return {violations == 0 && slack_mismatch == 0 && slack_cases > 0,
          std::to_string(violations) + " inclusion violations, " + std::to_string(slack_mismatch) +
              " mismatches over " + std::to_string(slack_cases) + " slack cases"};
}

Outcome certificate_formula(std::uint64_t seed, unsigned) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < kCertificateTuples; ++k) {
    const auto m = build_tabulated(fixtures::random_spec(rng, {2, 2, 3, 2, 3, 2, 2}));
    const auto s = fixtures::random_sample(rng, m.support(), 10 + rng() % 200);
    const double kappa = k == 0 ? 1e-300 : 0.01 + 0.98 * unit(rng);
    const double eps = 1e-4 + 0.1 * unit(rng);
    const std::uint64_t sign_seed = rng();
    const auto c = certificate_cn(m, s, kappa, eps, sign_seed);
    // Independent evaluation from the explicit class matrix.
    const double r = rademacher_complexity(restrict_hlb(m, s, {0, 1, 2}, false), RademacherDraw::generate(s.n(), sign_seed));
    double bounds = 0.0;
    for (const auto& mo : m.moments()) bounds += mo.abs_bound;
    const double h = std::max(std::abs(m.objective().phi_lb), std::abs(m.objective().phi_ub)) + m.mu_star() * bounds;
    const double n = static_cast<double>(s.n());
    const double hand = 4.0 * r + std::sqrt(72.0 * std::log(2.0 / (2.0 - kappa)) * h * h / n) + 5.0 * eps;
    worst = std::max(worst, std::abs(c.c_n - hand));
    if (k == 0) worst = std::max(worst, std::abs(c.c_n - (4.0 * r + 5.0 * eps)));
    worst = std::max(worst, std::abs(Certificate::formula(r, h, s.n(), 0.0, eps) - (4.0 * r + 5.0 * eps)));
  }
  return {worst <= kExactTol, "max deviation " + fmt("%.3g", worst)};
}

ExperimentConfig mc_config(ExperimentKind kind, std::vector<std::size_t> n, std::size_t reps, std::uint64_t seed,
                           unsigned threads) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.n_list = std::move(n);
  cfg.reps = reps;
  cfg.kappa = 0.9;
  cfg.a = 2.0;
  cfg.seed = seed;
  cfg.threads = threads;
  return cfg;
}

Outcome certificate_coverage(std::uint64_t seed, unsigned threads) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto truth = make_truth(fixtures::near_tie_truth());
  const auto r = run_coverage_experiment(*truth, mc_config(ExperimentKind::certificate, {500}, kReps, seed, threads));
  std::size_t invalid = 0;
  double mean_cn = 0.0;
  for (const auto& rec : r.replications) {
    invalid += rec.certificate_valid ? 0 : 1;
    mean_cn += rec.c_n / static_cast<double>(kReps);
  }
  const double secs = seconds_since(t0);
  return {r.coverage >= kCoverageFloor && secs < kCertificateSeconds,
          "coverage " + fmt("%.3f", r.coverage) + ", mean c_n " + fmt("%.3g", mean_cn) + ", invalid " +
              std::to_string(invalid) + ", " + fmt("%.1fs", secs)};
}

Outcome transforms(std::uint64_t seed, unsigned) {
  StepBound c;
  c.intervals.push_back({0.0, 1.0, 0.2});
  const bool closed = flat_transform(c, 0.5) == 0.4 && sharp_transform(c, 0.4) == 0.5;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0), arg(0.001, 6.0);
  int bad = 0;
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> cuts(1 + rng() % 8);
    for (auto& v : cuts) v = 0.01 + 5.0 * unit(rng);
    std::sort(cuts.rbegin(), cuts.rend());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    StepBound s;
    for (std::size_t j = 0; j < cuts.size(); ++j)
      s.intervals.push_back({j + 1 < cuts.size() ? cuts[j + 1] : 0.0, cuts[j], 2.0 * unit(rng)});
    double a = arg(rng), b = arg(rng);
    if (a > b) std::swap(a, b);
    if (flat_transform(s, a) < flat_transform(s, b) || sharp_transform(s, a) < sharp_transform(s, b)) ++bad;
  }
  return {closed && bad == 0, std::string("closed form ") + (closed ? "exact" : "wrong") + ", " +
                                  std::to_string(bad) + " monotonicity violations in 1000 step functions"};
}

// Criteria 7 and 8 share one set of runs.
struct SandwichRuns {
  bool done = false;
  ExperimentReport report;
  double secs = 0.0;
};

SandwichRuns& sandwich_runs(std::uint64_t seed, unsigned threads) {
  static SandwichRuns runs;
  if (!runs.done) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto truth = make_truth(fixtures::near_tie_truth());
    runs.report = run_coverage_experiment(*truth, mc_config(ExperimentKind::sandwich, {1000}, kReps, seed, threads));
    runs.secs = seconds_since(t0);
    runs.done = true;
  }
  return runs;
}

Outcome sandwich_coverage(std::uint64_t seed, unsigned threads) {
  const auto& r = sandwich_runs(seed, threads);
  double ds = 0.0;
  for (const auto& rec : r.report.replications) ds += rec.delta_star / static_cast<double>(kReps);
  return {r.report.coverage >= kCoverageFloor,
          "coverage " + fmt("%.3f", r.report.coverage) + ", mean delta* " + fmt("%.3g", ds) + ", " + fmt("%.1fs", r.secs)};
}

Outcome eme_containment(std::uint64_t seed, unsigned threads) {
  const auto& r = sandwich_runs(seed, threads);
  std::size_t eligible = 0, hits = 0;
  for (const auto& rec : r.report.replications) {
    if (!rec.epsilon_ok) continue;
    ++eligible;
    hits += rec.eme_in_level_set ? 1 : 0;
  }
  const double freq = eligible ? static_cast<double>(hits) / static_cast<double>(eligible) : 1.0;
  return {freq >= kCoverageFloor,
          "frequency " + fmt("%.3f", freq) + " over " + std::to_string(eligible) + " runs with epsilon <= delta*"};
}

Outcome rate(std::uint64_t seed, unsigned threads) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto truth = make_truth(fixtures::near_tie_truth());
  const auto r = run_coverage_experiment(
      *truth, mc_config(ExperimentKind::rate, {125, 250, 500, 1000, 2000, 4000, 8000}, kRateReps, seed, threads));
  const double secs = seconds_since(t0);
  std::string means;
  for (const auto& s : r.summaries) means += (means.empty() ? "" : " ") + fmt("%.4f", s.mean_regret);
  return {std::isfinite(r.slope) && r.slope <= kSlopeCeiling && secs < kRateSeconds,
          "slope " + fmt("%.3f", r.slope) + ", mean regrets [" + means + "], " + fmt("%.1fs", secs)};
}

Outcome sdc_sanity(std::uint64_t seed, unsigned) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.2, 3.0), tau(0.01, 0.5);
  std::vector<std::string> problems;
  for (int k = 0; k < 5; ++k) {
    auto cfg = fixtures::single_player_truth().config;
    cfg.l0 = pos(rng);
    cfg.l_prime = pos(rng);
    cfg.l = cfg.l_prime + pos(rng);
    cfg.tau_hat = tau(rng);
    const auto m = build_sdc(cfg);
    std::vector<Index> out;
    std::size_t empty = 0;
    const auto& sup = m.support();
    for (Index y = 0; y < sup.y.size(); ++y)
      for (Index z = 0; z < sup.z.size(); ++z)
        for (Index u = 0; u < sup.u.size(); ++u)
          for (Index t = 0; t < m.theta().size(); ++t)
            for (Index g = 0; g < m.policies().size(); ++g) {
              m.primitives().counterfactual_set(y, z, u, t, g, out);
              empty += out.empty();
            }
    if (empty) problems.push_back(std::to_string(empty) + " empty counterfactual cells");
    const auto& c = m.constants();
    if (c.c1 != cfg.l0 * cfg.l_prime || c.c2 != cfg.l0 * cfg.l || c.delta != *cfg.tau_hat / (cfg.l0 * cfg.l_prime))
      problems.push_back("constants miswired");
    // Two constraints per player and ordered pair of (z, opponents' choices) slots.
    const std::size_t slots = cfg.z_atoms.size() << (cfg.players - 1);
    if (m.moment_count() != 2 * static_cast<std::size_t>(cfg.players) * slots * slots)
      problems.push_back("moment count " + std::to_string(m.moment_count()));
  }
  return {problems.empty(), problems.empty() ? "5 configurations: no empty cells, constants exact, 8 moments each"
                                             : problems.front()};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome(std::uint64_t, unsigned)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::vector<int> only, known;
  app.add_option("--seed", seed, "master seed");
  app.add_option("--threads", threads, "worker threads for Monte Carlo runs (0: all cores)");
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--known-failures", known, "exit 0 when exactly these criteria fail");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {1, "oracle equivalence", oracle_equivalence},
      {2, "degenerate exactness", degenerate_exactness},
      {3, "zero-multiplier inclusion", zero_multiplier_inclusion},
      {4, "certificate formula", certificate_formula},
      {5, "certificate coverage", certificate_coverage},
      {6, "flat/sharp transforms", transforms},
      {7, "sandwich coverage", sandwich_coverage},
      {8, "eME containment", eme_containment},
      {9, "regret rate", rate},
      {10, "SDC builder sanity", sdc_sanity},
  };

  std::set<int> failed, expected(known.begin(), known.end());
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) {
      expected.erase(c.id);
      continue;
    }
    Outcome o;
    try {
      o = c.run(seed, threads);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) failed.insert(c.id);
    std::printf("criterion %2d %-26s %s  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  if (failed == expected) {
    if (!failed.empty()) std::printf("failures match the known list\n");
    return 0;
  }
  std::printf("failures differ from the known list\n");
  return 1;
}
