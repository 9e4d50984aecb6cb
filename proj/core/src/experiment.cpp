#include "ptb/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ptb/decision.hpp"
#include "ptb/errors.hpp"
#include "ptb/io.hpp"
#include "ptb/levelset.hpp"
#include "ptb/rng.hpp"

namespace ptb {

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "certificate") return ExperimentKind::certificate;
  if (name == "sandwich") return ExperimentKind::sandwich;
  if (name == "eme-containment") return ExperimentKind::eme_containment;
  if (name == "rate") return ExperimentKind::rate;
  throw ContractError("unknown experiment kind '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::certificate: return "certificate";
    case ExperimentKind::sandwich: return "sandwich";
    case ExperimentKind::eme_containment: return "eme-containment";
    case ExperimentKind::rate: return "rate";
  }
  return "unknown";
}

std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractError("least squares needs two or more paired points");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ContractError("least squares needs distinct x values");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

namespace {

bool subset_of(const std::vector<Index>& a, const std::vector<std::uint8_t>& in_b) {
  for (Index g : a)
    if (!in_b[g]) return false;
  return true;
}

ReplicationRecord replicate(const EnvelopeEngine& engine, const Truth& truth, const ExperimentConfig& cfg,
                            const std::vector<double>& pop_regret, double epsilon, std::size_t n, std::size_t rep) {
  const StructuralModel& model = engine.model();
  ReplicationRecord r;
  r.n = n;
  r.rep = rep;
  r.seed = derive_seed(derive_seed(cfg.seed, n), rep);
  const Sample sample = truth.simulate(n, derive_seed(r.seed, 0));
  const std::uint64_t sign_seed = derive_seed(r.seed, 1);

  switch (cfg.kind) {
    case ExperimentKind::certificate: {
      const Certificate c = certificate_cn(engine, sample, cfg.kappa, epsilon, sign_seed);
      r.gamma_hat = c.gamma_hat;
      r.regret = pop_regret[c.gamma_index];
      r.c_n = c.c_n;
      r.certificate_valid = c.valid;
      r.covered = r.regret <= r.c_n;
      break;
    }
    case ExperimentKind::sandwich:
    case ExperimentKind::eme_containment: {
      const LevelSetResult ls = level_set_sandwich(engine, sample, cfg.kappa, cfg.a, std::nullopt, sign_seed);
      const Index pick = eme_select(engine, sample, epsilon);
      r.gamma_hat = model.policies().ids[pick];
      r.regret = pop_regret[pick];
      r.delta_star = ls.delta_star;
      r.delta = ls.delta;
      std::vector<std::uint8_t> in_true(pop_regret.size(), 0), in_outer(pop_regret.size(), 0);
      std::vector<Index> truth_set;
      for (Index g = 0; g < pop_regret.size(); ++g)
        if (pop_regret[g] <= ls.delta) {
          in_true[g] = 1;
          truth_set.push_back(g);
        }
      for (Index g : ls.outer) in_outer[g] = 1;
      r.inner_ok = subset_of(ls.inner, in_true);
      r.outer_ok = subset_of(truth_set, in_outer);
      r.eme_in_level_set = in_true[pick] != 0;
      r.epsilon_ok = epsilon <= ls.delta_star;
      r.covered = cfg.kind == ExperimentKind::sandwich ? (r.inner_ok && r.outer_ok) : r.eme_in_level_set;
      break;
    }
    case ExperimentKind::rate: {
      const Index pick = eme_select(engine, sample, epsilon);
      r.gamma_hat = model.policies().ids[pick];
      r.regret = pop_regret[pick];
      r.covered = true;
      break;
    }
  }
  return r;
}

}  // namespace

ExperimentReport run_coverage_experiment(const Truth& truth, const ExperimentConfig& cfg) {
  if (cfg.reps == 0) throw ContractError("experiment needs reps >= 1");
  if (cfg.n_list.empty()) throw ContractError("experiment needs at least one sample size");
  for (std::size_t n : cfg.n_list)
    if (n == 0) throw ContractError("sample sizes must be positive");
  if (!(cfg.kappa > 0.0 && cfg.kappa < 1.0)) throw ContractError("kappa must lie in (0, 1)");
  if (cfg.kind == ExperimentKind::rate && cfg.n_list.size() < 2)
    throw ContractError("rate experiment needs two or more sample sizes");

  const StructuralModel& model = truth.model();
  const WeightedMeasure population = truth.population();
  const EnvelopeEngine main_engine(model, cfg.envelope);
  const std::vector<double> pop_regret = regrets_from_values(main_engine.lower_values(population));
  const double epsilon = cfg.epsilon.value_or(default_epsilon(model));

  ExperimentReport rep;
  rep.kind = cfg.kind;
  rep.kappa = cfg.kappa;
  rep.a = cfg.a;
  rep.epsilon = epsilon;
  rep.seed = cfg.seed;
  rep.reps = cfg.reps;

  const std::size_t total = cfg.n_list.size() * cfg.reps;
  rep.replications.resize(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};
  // Engines cache tables lazily and are not shared across threads.
  auto worker = [&]() {
    const EnvelopeEngine engine(model, cfg.envelope);
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t n = cfg.n_list[job / cfg.reps], r = job % cfg.reps;
      try {
        rep.replications[job] = replicate(engine, truth, cfg, pop_regret, epsilon, n, r);
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t job = 0; job < total; ++job) {
    if (!errors[job]) continue;
    const std::size_t n = cfg.n_list[job / cfg.reps], r = job % cfg.reps;
    const std::string where = "replication n=" + std::to_string(n) + " rep=" + std::to_string(r) +
                              " seed=" + std::to_string(derive_seed(derive_seed(cfg.seed, n), r)) + ": ";
    try {
      std::rethrow_exception(errors[job]);
    } catch (const BudgetError& e) {
      throw BudgetError(where + e.what());
    } catch (const ContractError& e) {
      throw ContractError(where + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(where + e.what());
    }
  }

  std::size_t covered_all = 0;
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    SizeSummary s;
    s.n = cfg.n_list[i];
    s.reps = cfg.reps;
    std::size_t covered = 0;
    double sum = 0.0;
    for (std::size_t r = 0; r < cfg.reps; ++r) {
      const auto& rec = rep.replications[i * cfg.reps + r];
      sum += rec.regret;
      covered += rec.covered ? 1 : 0;
    }
    covered_all += covered;
    s.mean_regret = sum / static_cast<double>(cfg.reps);
    s.coverage = static_cast<double>(covered) / static_cast<double>(cfg.reps);
    rep.summaries.push_back(s);
  }
  rep.coverage = static_cast<double>(covered_all) / static_cast<double>(total);

  if (cfg.kind == ExperimentKind::rate) {
    std::vector<double> lx, ly;
    bool positive = true;
    for (const auto& s : rep.summaries) {
      positive = positive && s.mean_regret > 0.0;
      lx.push_back(std::log(static_cast<double>(s.n)));
      ly.push_back(std::log(s.mean_regret));
    }
    if (positive) {
      std::tie(rep.slope, rep.intercept) = least_squares(lx, ly);
    } else {
      rep.slope = rep.intercept = std::nan("");
    }
  }
  return rep;
}

std::string experiment_json(const ExperimentReport& r) {
  using nlohmann::json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json reps = json::array();
  for (const auto& x : r.replications)
    reps.push_back({{"n", x.n},
                    {"rep", x.rep},
                    {"seed", x.seed},
                    {"gamma_hat", x.gamma_hat},
                    {"regret", num(x.regret)},
                    {"c_n", num(x.c_n)},
                    {"certificate_valid", x.certificate_valid},
                    {"delta_star", num(x.delta_star)},
                    {"delta", num(x.delta)},
                    {"inner_ok", x.inner_ok},
                    {"outer_ok", x.outer_ok},
                    {"eme_in_level_set", x.eme_in_level_set},
                    {"epsilon_ok", x.epsilon_ok},
                    {"covered", x.covered}});
  json sums = json::array();
  for (const auto& s : r.summaries)
    sums.push_back({{"n", s.n}, {"reps", s.reps}, {"mean_regret", num(s.mean_regret)}, {"coverage", s.coverage}});
  json j = {{"spec_version", kSpecVersion},
            {"kind", to_string(r.kind)},
            {"kappa", r.kappa},
            {"a", r.a},
            {"epsilon", r.epsilon},
            {"seed", r.seed},
            {"reps", r.reps},
            {"coverage", r.coverage},
            {"summaries", sums},
            {"replications", reps}};
  if (r.kind == ExperimentKind::rate) {
    j["slope"] = num(r.slope);
    j["intercept"] = num(r.intercept);
  }
  return j.dump(2) + "\n";
}

std::string experiment_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "n,rep,seed,gamma_hat,regret,c_n,delta_star,delta,inner_ok,outer_ok,eme_in_level_set,covered\n";
  for (const auto& x : r.replications)
    out << x.n << ',' << x.rep << ',' << x.seed << ',' << x.gamma_hat << ',' << format_real(x.regret) << ','
        << format_real(x.c_n) << ',' << format_real(x.delta_star) << ',' << format_real(x.delta) << ','
        << x.inner_ok << ',' << x.outer_ok << ',' << x.eme_in_level_set << ',' << x.covered << "\n";
  return out.str();
}

}  // namespace ptb
