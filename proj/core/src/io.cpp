#include "ptb/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ptb/errors.hpp"

namespace ptb {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(trim(f));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

// Non-blank lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!trim(line).empty()) out.emplace_back(no, line);
  }
  return out;
}

std::vector<std::string> labels_of(const AtomList& a, Index i) {
  std::vector<std::string> v;
  for (Index c = 0; c < a.dim(); ++c) v.push_back(a.label(i, c));
  return v;
}

std::vector<std::string> cell_header(const SupportSpec& s) {
  auto h = s.y.columns;
  h.insert(h.end(), s.z.columns.begin(), s.z.columns.end());
  return h;
}

struct CellRow {
  Index y, z;
  std::vector<std::string> rest;
};

std::vector<CellRow> read_cells(const SupportSpec& s, std::istream& in, std::size_t extra,
                                const std::vector<std::string>& extra_names) {
  const auto rows = lines(in);
  if (rows.empty()) throw ContractError("CSV input is empty");
  auto expect = cell_header(s);
  expect.insert(expect.end(), extra_names.begin(), extra_names.end());
  const auto header = split(rows.front().second);
  if (header != expect)
    throw ContractError("CSV header is '" + join(header) + "', expected '" + join(expect) + "'");
  const std::size_t dy = s.y.dim(), dz = s.z.dim();
  std::vector<CellRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [no, text] = rows[r];
    const auto f = split(text);
    if (f.size() != dy + dz + extra)
      throw ContractError("CSV line " + std::to_string(no) + " has " + std::to_string(f.size()) + " fields, expected " +
                          std::to_string(dy + dz + extra));
    const std::vector<std::string> yl(f.begin(), f.begin() + dy), zl(f.begin() + dy, f.begin() + dy + dz);
    const auto yi = s.y.find(yl);
    if (!yi) throw ContractError("CSV line " + std::to_string(no) + ": (" + join(yl) + ") is not a y atom");
    const auto zi = s.z.find(zl);
    if (!zi) throw ContractError("CSV line " + std::to_string(no) + ": (" + join(zl) + ") is not a z atom");
    out.push_back({*yi, *zi, std::vector<std::string>(f.begin() + dy + dz, f.end())});
  }
  return out;
}

double parse_real(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ContractError(what + ": '" + s + "' is not a number");
  }
}

// ---- JSON helpers ----

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ContractError(where + " must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ContractError(where + ": unknown key '" + k + "'");
}

template <class T>
T need(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ContractError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ContractError(where + "." + key + ": " + e.what());
  }
}

template <class T>
void maybe(const json& j, const std::string& key, const std::string& where, T& target) {
  if (j.contains(key)) target = need<T>(j, key, where);
}

template <class T>
void maybe(const json& j, const std::string& key, const std::string& where, std::optional<T>& target) {
  if (j.contains(key) && !j.at(key).is_null()) target = need<T>(j, key, where);
}

void check_version(const json& j) {
  if (j.contains("spec_version") && j.at("spec_version") != kSpecVersion)
    throw ContractError("unsupported spec_version " + j.at("spec_version").dump() + ", expected \"1.0\"");
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ContractError(std::string("malformed JSON: ") + e.what());
  }
}

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json atoms_json(const AtomList& a) { return {{"columns", a.columns}, {"points", a.points}}; }

AtomList atoms_from(const json& j, const std::string& where) {
  check_keys(j, {"columns", "points"}, where);
  AtomList a;
  a.columns = need<std::vector<std::string>>(j, "columns", where);
  a.points = need<std::vector<std::vector<double>>>(j, "points", where);
  if (a.points.empty()) throw ContractError(where + ": atom list is empty");
  for (const auto& p : a.points)
    if (p.size() != a.columns.size()) throw ContractError(where + ": point dimension differs from the column count");
  if (std::set<std::vector<double>>(a.points.begin(), a.points.end()).size() != a.points.size())
    throw ContractError(where + ": atoms must be distinct");
  return a;
}

json pe_config_json(const ProgramEvalConfig& c) {
  json j = {{"z0_atoms", c.z0_atoms},         {"x_atoms", c.x_atoms},
            {"y_lb", c.y_lb},                 {"y_ub", c.y_ub},
            {"outcome_grid_points", c.outcome_grid_points}, {"u_grid_points", c.u_grid_points},
            {"g_grid_points", c.g_grid_points}};
  if (!c.g_levels.empty()) j["g_levels"] = c.g_levels;
  if (!c.t_levels.empty()) j["t_levels"] = c.t_levels;
  return j;
}

ProgramEvalConfig pe_config_from(const json& j) {
  const std::string w = "config";
  check_keys(j, {"z0_atoms", "x_atoms", "y_lb", "y_ub", "outcome_grid_points", "u_grid_points", "g_grid_points",
                 "g_levels", "t_levels"},
             w);
  ProgramEvalConfig c;
  maybe(j, "z0_atoms", w, c.z0_atoms);
  maybe(j, "x_atoms", w, c.x_atoms);
  maybe(j, "y_lb", w, c.y_lb);
  maybe(j, "y_ub", w, c.y_ub);
  maybe(j, "outcome_grid_points", w, c.outcome_grid_points);
  maybe(j, "u_grid_points", w, c.u_grid_points);
  maybe(j, "g_grid_points", w, c.g_grid_points);
  maybe(j, "g_levels", w, c.g_levels);
  maybe(j, "t_levels", w, c.t_levels);
  c.validate();
  return c;
}

json sdc_config_json(const SdcConfig& c) {
  json j = {{"players", c.players}, {"z_atoms", c.z_atoms},       {"basis", c.basis},
            {"coefficient_grid", c.coefficient_grid}, {"l0", c.l0}, {"l_prime", c.l_prime},
            {"l", c.l},             {"u_grid_points", c.u_grid_points}, {"target_player", c.target_player}};
  if (c.tau_hat) j["tau_hat"] = *c.tau_hat;
  return j;
}

SdcConfig sdc_config_from(const json& j) {
  const std::string w = "config";
  check_keys(j, {"players", "z_atoms", "basis", "coefficient_grid", "l0", "l_prime", "l", "u_grid_points",
                 "target_player", "tau_hat"},
             w);
  SdcConfig c;
  maybe(j, "players", w, c.players);
  maybe(j, "z_atoms", w, c.z_atoms);
  c.basis = need<std::vector<std::vector<double>>>(j, "basis", w);
  c.coefficient_grid = need<std::vector<std::vector<double>>>(j, "coefficient_grid", w);
  maybe(j, "l0", w, c.l0);
  maybe(j, "l_prime", w, c.l_prime);
  maybe(j, "l", w, c.l);
  maybe(j, "u_grid_points", w, c.u_grid_points);
  maybe(j, "target_player", w, c.target_player);
  maybe(j, "tau_hat", w, c.tau_hat);
  c.validate();
  return c;
}

TabulatedModelSpec tabulated_from(const json& j) {
  const std::string w = "model";
  check_keys(j, {"spec_version", "kind", "support", "theta", "policies", "moments", "objective", "constants",
                 "mu_star", "gminus", "gstar", "phi", "moment_values"},
             w);
  TabulatedModelSpec t;
  const json& s = j.at("support");
  check_keys(s, {"y", "z", "ystar", "u", "grid_resolution"}, "support");
  t.support.y = atoms_from(s.at("y"), "support.y");
  t.support.z = atoms_from(s.at("z"), "support.z");
  t.support.ystar = atoms_from(s.at("ystar"), "support.ystar");
  t.support.u = atoms_from(s.at("u"), "support.u");
  maybe(s, "grid_resolution", "support", t.support.grid_resolution);
  const json& th = need<json>(j, "theta", w);
  check_keys(th, {"columns", "candidates"}, "theta");
  t.theta.columns = need<std::vector<std::string>>(th, "columns", "theta");
  t.theta.candidates = need<std::vector<std::vector<double>>>(th, "candidates", "theta");
  if (t.theta.candidates.empty()) throw ContractError("theta: no candidates");
  const json& po = need<json>(j, "policies", w);
  check_keys(po, {"ids"}, "policies");
  t.policies.ids = need<std::vector<std::string>>(po, "ids", "policies");
  if (t.policies.ids.empty()) throw ContractError("policies: no ids");
  if (std::set<std::string>(t.policies.ids.begin(), t.policies.ids.end()).size() != t.policies.ids.size())
    throw ContractError("policies: ids must be unique");
  for (const auto& m : need<json>(j, "moments", w)) {
    check_keys(m, {"name", "abs_bound"}, "moments[]");
    t.moments.push_back({need<std::string>(m, "name", "moments[]"), need<double>(m, "abs_bound", "moments[]")});
  }
  const json& ob = need<json>(j, "objective", w);
  check_keys(ob, {"phi_lb", "phi_ub"}, "objective");
  t.objective = {need<double>(ob, "phi_lb", "objective"), need<double>(ob, "phi_ub", "objective")};
  const json& co = need<json>(j, "constants", w);
  check_keys(co, {"c1", "c2", "delta"}, "constants");
  t.constants = {need<double>(co, "c1", "constants"), need<double>(co, "c2", "constants"),
                 need<double>(co, "delta", "constants")};
  t.gminus = need<std::vector<std::vector<Index>>>(j, "gminus", w);
  t.gstar = need<std::vector<std::vector<Index>>>(j, "gstar", w);
  t.phi = need<std::vector<double>>(j, "phi", w);
  t.moment_values = need<std::vector<double>>(j, "moment_values", w);
  return t;
}

json tabulated_json(const TabulatedModelSpec& t) {
  json moments = json::array();
  for (const auto& m : t.moments) moments.push_back({{"name", m.name}, {"abs_bound", m.abs_bound}});
  return {{"support",
           {{"y", atoms_json(t.support.y)},
            {"z", atoms_json(t.support.z)},
            {"ystar", atoms_json(t.support.ystar)},
            {"u", atoms_json(t.support.u)},
            {"grid_resolution", t.support.grid_resolution}}},
          {"theta", {{"columns", t.theta.columns}, {"candidates", t.theta.candidates}}},
          {"policies", {{"ids", t.policies.ids}}},
          {"moments", moments},
          {"objective", {{"phi_lb", t.objective.phi_lb}, {"phi_ub", t.objective.phi_ub}}},
          {"constants", {{"c1", t.constants.c1}, {"c2", t.constants.c2}, {"delta", t.constants.delta}}},
          {"gminus", t.gminus},
          {"gstar", t.gstar},
          {"phi", t.phi},
          {"moment_values", t.moment_values}};
}

std::vector<std::string> ids_of(const StructuralModel& model, const std::vector<Index>& set) {
  std::vector<std::string> out;
  for (Index g : set) out.push_back(model.policies().ids[g]);
  return out;
}

std::string finish(json j) {
  j["spec_version"] = kSpecVersion;
  return j.dump(2) + "\n";
}

}  // namespace

// ---- CSV ----

Sample read_sample_csv(const SupportSpec& support, std::istream& in) {
  Sample s;
  for (const auto& r : read_cells(support, in, 0, {})) s.push(r.y, r.z);
  if (s.n() == 0) throw ContractError("sample CSV has no rows");
  return s;
}

void write_sample_csv(const SupportSpec& support, const Sample& sample, std::ostream& out) {
  out << join(cell_header(support)) << "\n";
  for (std::size_t i = 0; i < sample.n(); ++i) {
    auto f = labels_of(support.y, sample.y[i]);
    const auto zl = labels_of(support.z, sample.z[i]);
    f.insert(f.end(), zl.begin(), zl.end());
    out << join(f) << "\n";
  }
}

WeightedMeasure read_weights_csv(const SupportSpec& support, std::istream& in) {
  std::vector<double> w(support.cell_count(), 0.0);
  std::vector<std::uint8_t> seen(w.size(), 0);
  for (const auto& r : read_cells(support, in, 1, {"weight"})) {
    const Index c = support.cell(r.y, r.z);
    if (seen[c]) throw ContractError("weights CSV lists a cell twice");
    seen[c] = 1;
    w[c] = parse_real(r.rest[0], "weight");
  }
  auto m = WeightedMeasure::from_weights(support, std::move(w));
  m.validate();
  return m;
}

void write_weights_csv(const SupportSpec& support, const WeightedMeasure& measure, std::ostream& out) {
  out << join(cell_header(support)) << ",weight\n";
  for (Index y = 0; y < support.y.size(); ++y)
    for (Index z = 0; z < support.z.size(); ++z) {
      auto f = labels_of(support.y, y);
      const auto zl = labels_of(support.z, z);
      f.insert(f.end(), zl.begin(), zl.end());
      f.push_back(format_real(measure.at(y, z)));
      out << join(f) << "\n";
    }
}

std::vector<double> read_schedule_csv(std::istream& in) {
  std::vector<double> d;
  const auto rows = lines(in);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string f = trim(rows[r].second);
    if (r == 0 && f == "delta") continue;
    d.push_back(parse_real(f, "schedule line " + std::to_string(rows[r].first)));
  }
  if (d.empty()) throw ContractError("schedule CSV is empty");
  return d;
}

void write_curve_csv(const EnvelopeCurve& curve, std::ostream& out) {
  out << "gamma_id,i_lb,i_ub,theta_lb,theta_ub\n";
  auto idx = [](Index t) { return t == kNoIndex ? std::string() : std::to_string(t); };
  for (const auto& r : curve)
    out << r.gamma_id << ',' << format_real(r.i_lb) << ',' << format_real(r.i_ub) << ',' << idx(r.theta_lb) << ','
        << idx(r.theta_ub) << "\n";
}

void write_trace_csv(const StepBound& trace, std::ostream& out) {
  out << "j,delta_j,T_j,policy_subset_size\n";
  for (std::size_t j = 0; j < trace.intervals.size(); ++j) {
    const auto& iv = trace.intervals[j];
    out << j << ',' << format_real(iv.hi) << ',' << format_real(iv.value) << ',' << iv.subset_size << "\n";
  }
}

// ---- model documents ----

ModelDocument parse_model_document(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object()) throw ContractError("model document must be a JSON object");
  check_version(j);
  ModelDocument doc;
  doc.kind = need<std::string>(j, "kind", "model");
  if (doc.kind == "program_evaluation") {
    check_keys(j, {"spec_version", "kind", "config", "mu_star"}, "model");
    doc.program_evaluation = pe_config_from(need<json>(j, "config", "model"));
  } else if (doc.kind == "sdc") {
    check_keys(j, {"spec_version", "kind", "config", "mu_star"}, "model");
    doc.sdc = sdc_config_from(need<json>(j, "config", "model"));
  } else if (doc.kind == "tabulated") {
    doc.tabulated = tabulated_from(j);
  } else {
    throw ContractError("unknown model kind '" + doc.kind + "'");
  }
  maybe(j, "mu_star", "model", doc.mu_star);
  return doc;
}

std::string model_document_json(const ModelDocument& doc) {
  json j;
  if (doc.program_evaluation) j["config"] = pe_config_json(*doc.program_evaluation);
  if (doc.sdc) j["config"] = sdc_config_json(*doc.sdc);
  if (doc.tabulated) j = tabulated_json(*doc.tabulated);
  j["kind"] = doc.kind;
  if (doc.mu_star) j["mu_star"] = *doc.mu_star;
  return finish(std::move(j));
}

SupportSpec document_support(const ModelDocument& doc) {
  if (doc.sdc && !doc.sdc->tau_hat) {
    SdcConfig cfg = *doc.sdc;
    cfg.tau_hat = 1.0;  // placeholder; atoms do not depend on tau
    return build_sdc(cfg).support();
  }
  return build_model(doc).support();
}

StructuralModel build_model(const ModelDocument& doc) {
  auto built = [&]() -> StructuralModel {
    if (doc.program_evaluation) return build_program_evaluation(*doc.program_evaluation);
    if (doc.sdc) return build_sdc(*doc.sdc);
    if (doc.tabulated) return build_tabulated(*doc.tabulated);
    throw ContractError("model document has no body");
  }();
  return doc.mu_star ? built.with_mu_star(*doc.mu_star) : built;
}

TabulatedModelSpec tabulate_model(const StructuralModel& model, double max_entries) {
  const auto& s = model.support();
  TabulatedModelSpec t;
  t.support = s;
  t.theta = model.theta();
  t.policies.ids = model.policies().ids;
  t.moments = model.moments();
  t.objective = model.objective();
  t.constants = model.constants();
  t.mu_star = model.mu_star();
  const double cells = static_cast<double>(s.y.size()) * s.z.size() * s.u.size() * t.theta.size();
  if (cells * (t.policies.size() + t.moments.size()) > max_entries)
    throw BudgetError("tabulating the model would need about " + format_real(cells * (t.policies.size() + t.moments.size())) +
                      " entries");
  t.allocate();
  const auto& p = model.primitives();
  std::vector<double> m(t.moments.size());
  for (Index y = 0; y < s.y.size(); ++y)
    for (Index z = 0; z < s.z.size(); ++z)
      for (Index u = 0; u < s.u.size(); ++u)
        for (Index a = 0; a < s.ystar.size(); ++a) t.phi[t.phi_index(a, y, z, u)] = p.objective(a, y, z, u);
  for (Index y = 0; y < s.y.size(); ++y)
    for (Index z = 0; z < s.z.size(); ++z)
      for (Index th = 0; th < t.theta.size(); ++th) {
        p.factual_set(y, z, th, t.gminus[t.gminus_index(y, z, th)]);
        for (Index u = 0; u < s.u.size(); ++u) {
          p.moments(y, z, u, th, m);
          std::copy(m.begin(), m.end(), t.moment_values.begin() + static_cast<std::ptrdiff_t>(t.moment_index(y, z, u, th, 0)));
          for (Index g = 0; g < t.policies.size(); ++g)
            p.counterfactual_set(y, z, u, th, g, t.gstar[t.gstar_index(y, z, u, th, g)]);
        }
      }
  return t;
}

std::unique_ptr<Truth> parse_truth_document(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object()) throw ContractError("truth document must be a JSON object");
  check_version(j);
  const auto kind = need<std::string>(j, "kind", "truth");
  if (kind == "program_evaluation") {
    check_keys(j, {"spec_version", "kind", "config", "pz", "g0", "u_mass", "outcome_joint"}, "truth");
    ProgramEvalTruth t;
    t.config = pe_config_from(need<json>(j, "config", "truth"));
    t.pz = need<std::vector<double>>(j, "pz", "truth");
    t.g0 = need<std::vector<double>>(j, "g0", "truth");
    t.u_mass = need<std::vector<double>>(j, "u_mass", "truth");
    t.outcome_joint = need<std::vector<double>>(j, "outcome_joint", "truth");
    return make_truth(t);
  }
  if (kind == "sdc") {
    check_keys(j, {"spec_version", "kind", "config", "theta0", "u_points", "u_mass", "z_mass"}, "truth");
    SdcTruth t;
    t.config = sdc_config_from(need<json>(j, "config", "truth"));
    t.theta0 = need<std::vector<double>>(j, "theta0", "truth");
    t.u_points = need<std::vector<double>>(j, "u_points", "truth");
    t.u_mass = need<std::vector<double>>(j, "u_mass", "truth");
    t.z_mass = need<std::vector<double>>(j, "z_mass", "truth");
    return make_truth(t);
  }
  throw ContractError("unknown truth kind '" + kind + "'");
}

// ---- JSON reports ----

std::string curve_json(const StructuralModel& model, const EnvelopeCurve& curve) {
  json rows = json::array();
  for (const auto& r : curve) {
    json row = {{"gamma_id", r.gamma_id},
                {"i_lb", real_or_null(r.i_lb)},
                {"i_ub", real_or_null(r.i_ub)},
                {"heuristic", r.heuristic}};
    row["theta_lb"] = r.theta_lb == kNoIndex ? json(nullptr) : json(model.theta().candidates[r.theta_lb]);
    row["theta_ub"] = r.theta_ub == kNoIndex ? json(nullptr) : json(model.theta().candidates[r.theta_ub]);
    row["lambda_lb"] = r.lambda_lb;
    row["lambda_ub"] = r.lambda_ub;
    rows.push_back(std::move(row));
  }
  return finish({{"mu_star", model.mu_star()}, {"curve", rows}});
}

std::string certificate_json(const Certificate& c) {
  return finish({{"gamma_hat", c.gamma_hat},
                 {"c_n", c.c_n},
                 {"r_n", c.r_n},
                 {"h_bar", c.h_bar},
                 {"n", c.n},
                 {"kappa", c.kappa},
                 {"epsilon", c.epsilon},
                 {"seed", c.seed},
                 {"valid", c.valid},
                 {"dropped_rows", c.dropped_rows},
                 {"class_size", c.class_size}});
}

std::string decision_json(const StructuralModel& model, Index gamma, double epsilon, const std::vector<double>& values) {
  json v = json::object();
  for (Index g = 0; g < values.size(); ++g) v[model.policies().ids[g]] = real_or_null(values[g]);
  return finish({{"gamma_hat", model.policies().ids[gamma]}, {"epsilon", epsilon}, {"lower_envelope", v}});
}

std::string complexity_json(const ClassComplexity& c, std::uint64_t seed, std::size_t n) {
  return finish({{"r_n", c.r_n},
                 {"class_size", c.class_size},
                 {"dropped_rows", c.dropped_rows},
                 {"seed", seed},
                 {"n", n},
                 {"symmetrized", c.symmetrized}});
}

std::string levelset_json(const StructuralModel& model, const LevelSetResult& r) {
  json trace = json::array();
  for (const auto& iv : r.trace.intervals)
    trace.push_back({{"lo", iv.lo},
                     {"hi", iv.hi},
                     {"value", iv.value},
                     {"r_n", iv.r_n},
                     {"policy_subset_size", iv.subset_size},
                     {"dropped_rows", iv.dropped_rows}});
  json regrets = json::object();
  for (Index g = 0; g < r.regrets.size(); ++g) regrets[model.policies().ids[g]] = real_or_null(r.regrets[g]);
  return finish({{"delta_star", r.delta_star},
                 {"delta", r.delta},
                 {"kappa", r.kappa},
                 {"a", r.a},
                 {"seed", r.seed},
                 {"inner", ids_of(model, r.inner)},
                 {"outer", ids_of(model, r.outer)},
                 {"empirical_regret", regrets},
                 {"trace", trace}});
}

std::string oracle_json(const StructuralModel& model, const std::vector<OracleBounds>& bounds) {
  json rows = json::array();
  for (Index g = 0; g < bounds.size(); ++g)
    rows.push_back({{"gamma_id", model.policies().ids[g]},
                    {"lb", real_or_null(bounds[g].lb)},
                    {"ub", real_or_null(bounds[g].ub)},
                    {"feasible", bounds[g].feasible}});
  return finish({{"oracle", rows}});
}

std::string validation_json(const ValidationReport& r) {
  return finish({{"ok", r.ok()}, {"violations", r.violations}, {"notes", r.notes}});
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ptb
