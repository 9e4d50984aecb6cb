#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ptb/complexity.hpp"
#include "ptb/decision.hpp"
#include "ptb/errors.hpp"
#include "ptb/examples.hpp"
#include "ptb/experiment.hpp"
#include "ptb/io.hpp"
#include "ptb/levelset.hpp"
#include "ptb/oracle.hpp"

namespace {

using namespace ptb;

struct Common {
  std::string model;
  std::string sample;
  std::string population;
  std::string out;
  std::uint64_t seed = 0;
  std::string format = "json";
};

void add_common(CLI::App* app, Common& c, const std::string& default_format) {
  c.format = default_format;
  app->add_option("--model", c.model, "Model document (JSON)");
  app->add_option("--sample", c.sample, "Sample CSV");
  app->add_option("--out", c.out, "Output path (stdout when omitted)");
  app->add_option("--seed", c.seed, "Seed for randomised steps");
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw ContractError("cannot write " + c.out);
  f << text;
}

struct Loaded {
  std::optional<StructuralModel> model;
  std::optional<Sample> sample;
  std::optional<WeightedMeasure> measure;  // empirical measure of the sample, or the population weights
};

Loaded load(const Common& c, bool need_sample) {
  if (c.model.empty()) throw ContractError("--model is required");
  ModelDocument doc = parse_model_document(read_file(c.model));
  const SupportSpec support = document_support(doc);
  Loaded out;
  if (!c.sample.empty()) {
    std::ifstream in(c.sample);
    if (!in) throw ContractError("cannot open " + c.sample);
    out.sample = read_sample_csv(support, in);
    out.measure = WeightedMeasure::empirical(support, *out.sample);
  } else if (!c.population.empty() && !need_sample) {
    std::ifstream in(c.population);
    if (!in) throw ContractError("cannot open " + c.population);
    out.measure = read_weights_csv(support, in);
  } else {
    throw ContractError(need_sample ? "--sample is required" : "--sample or --population is required");
  }
  // The discrete-choice builder needs a plug-in tau from the data when the document has none.
  if (doc.sdc && !doc.sdc->tau_hat) doc.sdc->tau_hat = sdc_tau_hat(*doc.sdc, out.measure->weights);
  out.model = build_model(doc);
  return out;
}

std::vector<Index> all_policies(const StructuralModel& m) {
  std::vector<Index> v(m.policies().size());
  for (Index g = 0; g < v.size(); ++g) v[g] = g;
  return v;
}

int run(int argc, char** argv) {
  CLI::App app{"Policy transform bounds: envelopes, robust decisions and finite-sample guarantees"};
  app.require_subcommand(1);

  Common env, dec, cer, lev, cpx, bld, sim, orc, exp;

  auto* s_env = app.add_subcommand("envelope", "Lower and upper envelope for every policy");
  add_common(s_env, env, "csv");
  s_env->add_option("--population", env.population, "Population weights CSV instead of a sample");
  std::string domain = "binary";
  s_env->add_option("--multipliers", domain, "Multiplier domain")->check(CLI::IsMember({"binary", "hull"}));

  auto* s_dec = app.add_subcommand("decide", "Select the eME policy");
  add_common(s_dec, dec, "json");
  std::optional<double> dec_eps;
  s_dec->add_option("--epsilon", dec_eps, "Tolerance of the eME rule");

  auto* s_cer = app.add_subcommand("certify", "eME policy with its finite-sample certificate");
  add_common(s_cer, cer, "json");
  double cer_kappa = 0.9;
  std::optional<double> cer_eps;
  s_cer->add_option("--kappa", cer_kappa, "Confidence level");
  s_cer->add_option("--epsilon", cer_eps, "Tolerance of the eME rule");

  auto* s_lev = app.add_subcommand("levelset", "Empirical level-set sandwich");
  add_common(s_lev, lev, "json");
  double lev_kappa = 0.9, lev_a = 2.0;
  std::optional<double> lev_delta;
  std::string lev_schedule, lev_trace;
  s_lev->add_option("--kappa", lev_kappa, "Confidence level");
  s_lev->add_option("--a", lev_a, "Sandwich parameter a > 1");
  s_lev->add_option("--delta", lev_delta, "Level; defaults to a * delta_star");
  s_lev->add_option("--schedule", lev_schedule, "CSV of decreasing delta_j");
  s_lev->add_option("--trace", lev_trace, "Also write the step-bound trace CSV here");

  auto* s_cpx = app.add_subcommand("complexity", "Empirical Rademacher complexity of the lower-envelope class");
  add_common(s_cpx, cpx, "json");
  bool cpx_diff = false;
  std::vector<std::string> cpx_policies;
  s_cpx->add_flag("--differences", cpx_diff, "Use the class of pairwise differences");
  s_cpx->add_option("--policies", cpx_policies, "Restrict to these policy ids");

  auto* s_bld = app.add_subcommand("build", "Validate a model document and emit its tabulated form");
  add_common(s_bld, bld, "json");
  s_bld->add_option("--population", bld.population, "Population weights CSV for the plug-in tau");
  bool bld_check = false;
  s_bld->add_flag("--validate-only", bld_check, "Emit the validation report instead of the tables");

  auto* s_sim = app.add_subcommand("simulate", "Draw a sample from a truth document");
  add_common(s_sim, sim, "csv");
  std::string truth_path, pop_out;
  std::size_t sim_n = 0;
  s_sim->add_option("--truth", truth_path, "Truth document (JSON)")->required();
  s_sim->add_option("--n", sim_n, "Sample size")->required();
  s_sim->add_option("--population-out", pop_out, "Also write the population weights CSV here");

  auto* s_orc = app.add_subcommand("oracle", "Brute-force identified-set bounds by linear programming");
  add_common(s_orc, orc, "json");
  s_orc->add_option("--population", orc.population, "Population weights CSV instead of a sample");

  auto* s_exp = app.add_subcommand("experiment", "Monte Carlo coverage and rate experiments");
  add_common(s_exp, exp, "json");
  std::string exp_truth, exp_kind = "certificate";
  ExperimentConfig ec;
  s_exp->add_option("--truth", exp_truth, "Truth document (JSON)")->required();
  s_exp->add_option("--kind", exp_kind, "Experiment kind")
      ->check(CLI::IsMember({"certificate", "sandwich", "eme-containment", "rate"}));
  s_exp->add_option("--n", ec.n_list, "Sample sizes");
  s_exp->add_option("--reps", ec.reps, "Replications per sample size");
  s_exp->add_option("--kappa", ec.kappa, "Confidence level");
  s_exp->add_option("--a", ec.a, "Sandwich parameter");
  s_exp->add_option("--epsilon", ec.epsilon, "Tolerance of the eME rule");
  s_exp->add_option("--threads", ec.threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*s_env) {
    const Loaded l = load(env, false);
    EnvelopeOptions o;
    o.domain = domain == "hull" ? MultiplierDomain::hull : MultiplierDomain::binary;
    o.seed = env.seed;
    const EnvelopeCurve curve = envelope_curve(*l.model, *l.measure, o);
    if (env.format == "csv") {
      std::ostringstream s;
      write_curve_csv(curve, s);
      emit(env, s.str());
    } else {
      emit(env, curve_json(*l.model, curve));
    }
  } else if (*s_dec) {
    const Loaded l = load(dec, true);
    const double eps = dec_eps.value_or(default_epsilon(*l.model));
    const EnvelopeEngine engine(*l.model);
    const Index g = eme_select(engine, *l.sample, eps);
    emit(dec, decision_json(*l.model, g, eps, engine.lower_values(*l.measure)));
  } else if (*s_cer) {
    const Loaded l = load(cer, true);
    const double eps = cer_eps.value_or(default_epsilon(*l.model));
    emit(cer, certificate_json(certificate_cn(*l.model, *l.sample, cer_kappa, eps, cer.seed)));
  } else if (*s_lev) {
    const Loaded l = load(lev, true);
    std::optional<DeltaSchedule> sched;
    if (!lev_schedule.empty()) {
      std::ifstream in(lev_schedule);
      if (!in) throw ContractError("cannot open " + lev_schedule);
      sched = DeltaSchedule{read_schedule_csv(in), lev_a};
    }
    const EnvelopeEngine engine(*l.model);
    const LevelSetResult r = level_set_sandwich(engine, *l.sample, lev_kappa, lev_a, lev_delta, lev.seed, sched);
    emit(lev, levelset_json(*l.model, r));
    if (!lev_trace.empty()) {
      std::ofstream f(lev_trace);
      if (!f) throw ContractError("cannot write " + lev_trace);
      write_trace_csv(r.trace, f);
    }
  } else if (*s_cpx) {
    const Loaded l = load(cpx, true);
    std::vector<Index> subset;
    for (const auto& id : cpx_policies) {
      const auto g = l.model->policies().find(id);
      if (!g) throw ContractError("unknown policy id " + id);
      subset.push_back(*g);
    }
    if (subset.empty()) subset = all_policies(*l.model);
    const EnvelopeEngine engine(*l.model);
    const auto draw = RademacherDraw::generate(l.sample->n(), cpx.seed);
    emit(cpx, complexity_json(hlb_rademacher(engine, *l.sample, subset, cpx_diff, draw), cpx.seed, l.sample->n()));
  } else if (*s_bld) {
    if (bld.model.empty()) throw ContractError("--model is required");
    ModelDocument doc = parse_model_document(read_file(bld.model));
    if (doc.sdc && !doc.sdc->tau_hat && (!bld.sample.empty() || !bld.population.empty())) {
      const Loaded l = load(bld, false);
      doc.sdc->tau_hat = sdc_tau_hat(*doc.sdc, l.measure->weights);
    }
    const StructuralModel m = build_model(doc);
    const ValidationReport rep = validate_model(m);
    if (bld_check) {
      emit(bld, validation_json(rep));
    } else {
      for (const auto& v : rep.violations) std::cerr << "warning: " << v << "\n";
      if (doc.sdc)
        for (const auto& f : coherency_failures(m)) std::cerr << "warning: empty counterfactual set at " << f << "\n";
      ModelDocument out;
      out.kind = "tabulated";
      out.tabulated = tabulate_model(m);
      out.mu_star = m.mu_star();
      emit(bld, model_document_json(out));
    }
  } else if (*s_sim) {
    const auto truth = parse_truth_document(read_file(truth_path));
    const Sample s = truth->simulate(sim_n, sim.seed);
    std::ostringstream o;
    write_sample_csv(truth->model().support(), s, o);
    emit(sim, o.str());
    if (!pop_out.empty()) {
      std::ofstream f(pop_out);
      if (!f) throw ContractError("cannot write " + pop_out);
      write_weights_csv(truth->model().support(), truth->population(), f);
    }
  } else if (*s_orc) {
    const Loaded l = load(orc, false);
    std::vector<OracleBounds> b;
    for (Index g = 0; g < l.model->policies().size(); ++g) b.push_back(oracle_envelope(*l.model, *l.measure, g));
    emit(orc, oracle_json(*l.model, b));
  } else if (*s_exp) {
    const auto truth = parse_truth_document(read_file(exp_truth));
    ec.kind = parse_experiment_kind(exp_kind);
    ec.seed = exp.seed;
    const ExperimentReport r = run_coverage_experiment(*truth, ec);
    emit(exp, exp.format == "csv" ? experiment_csv(r) : experiment_json(r));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ptb::BudgetError& e) {
    std::cerr << "budget refusal: " << e.what() << "\n";
    return 3;
  } catch (const ptb::ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
