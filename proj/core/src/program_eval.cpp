#include <algorithm>
#include <cmath>

#include "ptb/errors.hpp"
#include "ptb/examples.hpp"
#include "ptb/rng.hpp"

namespace ptb {

namespace {

constexpr double kGridTol = 1e-12;

std::vector<double> even_grid(double lo, double hi, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
  g.back() = hi;
  return g;
}

std::optional<Index> grid_index(const std::vector<double>& grid, double v) {
  for (Index i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i] - v) <= kGridTol) return i;
  return std::nullopt;
}

class ProgramEvalPrimitives final : public Primitives {
 public:
  ProgramEvalPrimitives(const ProgramEvalConfig& cfg, std::vector<std::vector<double>> thetas)
      : ygrid_(cfg.outcome_grid()), ugrid_(cfg.u_grid()), thetas_(std::move(thetas)) {
    nz0_ = cfg.z0_atoms.size();
    nx_ = cfg.x_atoms.size();
    nz_ = nz0_ * nx_;
    ny_ = ygrid_.size();
    nu_ = ugrid_.size();
    maps_ = all_self_maps(nz_).maps;
  }

  // y atom a = (y index, d): a = yi * 2 + d.  z atom = z0 index * |X| + x index.
  // u atom = (i0 * ny + i1) * nu + iu.  ystar atom = yi * 2 + dstar.
  double g(Index t, Index z) const { return thetas_[t][z]; }
  double tcell(Index t, Index z) const { return thetas_[t][nz_ + z]; }

  void factual_set(Index y, Index z, Index t, std::vector<Index>& out) const override {
    out.clear();
    const Index yi = y / 2, d = y % 2;
    const double gz = g(t, z);
    for (Index iu = 0; iu < nu_; ++iu) {
      const double u = ugrid_[iu];
      const bool ok = d == 0 ? u >= gz - kGridTol : u <= gz + kGridTol;
      if (!ok) continue;
      for (Index other = 0; other < ny_; ++other) {
        const Index i0 = d == 0 ? yi : other;
        const Index i1 = d == 0 ? other : yi;
        out.push_back((i0 * ny_ + i1) * nu_ + iu);
      }
    }
  }

  void counterfactual_set(Index, Index z, Index u, Index t, Index gamma, std::vector<Index>& out) const override {
    const Index iu = u % nu_, pair = u / nu_, i0 = pair / ny_, i1 = pair % ny_;
    const Index target = maps_[gamma][z];
    if (ugrid_[iu] <= g(t, target) + kGridTol)
      out.assign(1, i1 * 2 + 1);
    else
      out.assign(1, i0 * 2 + 0);
  }

  double objective(Index ystar, Index, Index, Index) const override { return ygrid_[ystar / 2]; }

  void moments(Index y, Index z, Index u, Index t, std::span<double> out) const override {
    const double d = static_cast<double>(y % 2);
    const Index iu = u % nu_, pair = u / nu_, i0 = pair / ny_, i1 = pair % ny_;
    const double uu = ugrid_[iu];
    const double ud[2] = {ygrid_[i0], ygrid_[i1]};
    const Index x = z % nx_;
    std::size_t j = 0;
    for (Index c = 0; c < nz_; ++c) {
      const Index cx = c % nx_;
      const double in_z = c == z ? 1.0 : 0.0;
      const double in_x = cx == x ? 1.0 : 0.0;
      const double gc = g(t, c), tc = tcell(t, c);
      double t_x = 0.0;  // sum over z0 of t(z0, x_c)
      for (Index q = 0; q < nz0_; ++q) t_x += tcell(t, q * nx_ + cx);
      const double m1 = (d - gc) * in_z;
      const double m3 = ((uu <= gc + kGridTol ? 1.0 : 0.0) - gc) * in_x;
      const double m5 = tc - in_z;
      out[j++] = m1;
      out[j++] = -m1;
      out[j++] = m3;
      out[j++] = -m3;
      out[j++] = m5;
      out[j++] = -m5;
      for (int dd = 0; dd < 2; ++dd) {
        const double m7 = ud[dd] * (in_z * t_x - in_x * tc);
        out[j++] = m7;
        out[j++] = -m7;
      }
    }
  }

 private:
  std::vector<double> ygrid_, ugrid_;
  std::vector<std::vector<double>> thetas_;
  std::vector<std::vector<Index>> maps_;
  std::size_t nz0_ = 0, nx_ = 0, nz_ = 0, ny_ = 0, nu_ = 0;
};

void enumerate_tables(const std::vector<double>& levels, std::size_t cells, bool simplex,
                      std::vector<std::vector<double>>& out) {
  std::vector<Index> idx(cells, 0);
  while (true) {
    std::vector<double> row(cells);
    double sum = 0.0;
    for (Index c = 0; c < cells; ++c) sum += row[c] = levels[idx[c]];
    if (!simplex || std::abs(sum - 1.0) <= 1e-9) out.push_back(row);
    Index c = cells;
    while (c > 0) {
      --c;
      if (++idx[c] < levels.size()) break;
      idx[c] = 0;
      if (c == 0) return;
    }
    if (cells == 0) return;
  }
}

}  // namespace

std::vector<double> ProgramEvalConfig::outcome_grid() const { return even_grid(y_lb, y_ub, outcome_grid_points); }
std::vector<double> ProgramEvalConfig::u_grid() const { return even_grid(0.0, 1.0, u_grid_points); }

std::vector<double> ProgramEvalConfig::resolved_g_levels() const {
  return g_levels.empty() ? even_grid(0.0, 1.0, g_grid_points) : g_levels;
}

std::vector<double> ProgramEvalConfig::resolved_t_levels() const {
  return t_levels.empty() ? even_grid(0.0, 1.0, g_grid_points) : t_levels;
}

void ProgramEvalConfig::validate() const {
  if (z0_atoms.empty() || x_atoms.empty()) throw ContractError("program evaluation needs non-empty z0 and x atoms");
  if (!(y_lb < y_ub)) throw ContractError("program evaluation needs y_lb < y_ub");
  if (outcome_grid_points < 2 || u_grid_points < 2 || g_grid_points < 2)
    throw ContractError("program evaluation grid counts must be at least 2");
  auto distinct = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
  };
  if (!distinct(z0_atoms) || !distinct(x_atoms)) throw ContractError("program evaluation atoms must be distinct");
  for (double v : resolved_g_levels())
    if (v < 0.0 || v > 1.0) throw ContractError("g levels must lie in [0, 1]");
  for (double v : resolved_t_levels())
    if (v < 0.0 || v > 1.0) throw ContractError("t levels must lie in [0, 1]");
  const auto ug = u_grid();
  for (double v : resolved_g_levels())
    if (!grid_index(ug, v))
      throw ContractError("u grid too coarse: g level " + format_real(v) + " is not a grid point");
}

PolicyGrid all_self_maps(std::size_t n) {
  PolicyGrid p;
  if (n == 0) return p;
  double count = std::pow(static_cast<double>(n), static_cast<double>(n));
  if (count > 1e6) throw BudgetError("policy grid of all self-maps would have " + format_real(count) + " members");
  std::vector<Index> img(n, 0);
  while (true) {
    std::string id = "gamma_";
    for (Index i = 0; i < n; ++i) id += (i ? "-" : "") + std::to_string(img[i]);
    p.ids.push_back(id);
    p.maps.push_back(img);
    Index c = n;
    bool done = true;
    while (c > 0) {
      --c;
      if (++img[c] < n) {
        done = false;
        break;
      }
      img[c] = 0;
    }
    if (done) break;
  }
  return p;
}

StructuralModel build_program_evaluation(const ProgramEvalConfig& cfg) {
  cfg.validate();
  const auto ygrid = cfg.outcome_grid();
  const auto ugrid = cfg.u_grid();
  const std::size_t nz0 = cfg.z0_atoms.size(), nx = cfg.x_atoms.size(), nz = nz0 * nx;

  ModelParts parts;
  parts.kind = "program_evaluation";
  auto& s = parts.support;
  s.y.columns = {"y", "d"};
  for (double y : ygrid)
    for (int d = 0; d < 2; ++d) s.y.points.push_back({y, static_cast<double>(d)});
  s.z.columns = {"z0", "x"};
  for (double z0 : cfg.z0_atoms)
    for (double x : cfg.x_atoms) s.z.points.push_back({z0, x});
  s.u.columns = {"u0", "u1", "u"};
  for (double u0 : ygrid)
    for (double u1 : ygrid)
      for (double u : ugrid) s.u.points.push_back({u0, u1, u});
  s.ystar.columns = {"ystar", "dstar"};
  for (double y : ygrid)
    for (int d = 0; d < 2; ++d) s.ystar.points.push_back({y, static_cast<double>(d)});
  s.grid_resolution = {cfg.outcome_grid_points, cfg.outcome_grid_points, cfg.u_grid_points};

  std::vector<std::vector<double>> gtables, ttables;
  enumerate_tables(cfg.resolved_g_levels(), nz, false, gtables);
  enumerate_tables(cfg.resolved_t_levels(), nz, true, ttables);
  if (ttables.empty()) throw ContractError("no t table on the level grid sums to one");
  for (Index c = 0; c < nz; ++c) parts.theta.columns.push_back("g[" + s.z.describe(c) + "]");
  for (Index c = 0; c < nz; ++c) parts.theta.columns.push_back("t[" + s.z.describe(c) + "]");
  for (const auto& gt : gtables)
    for (const auto& tt : ttables) {
      std::vector<double> row = gt;
      row.insert(row.end(), tt.begin(), tt.end());
      parts.theta.candidates.push_back(std::move(row));
    }

  parts.policies = all_self_maps(nz);
  const double ybound = std::max(std::abs(cfg.y_lb), std::abs(cfg.y_ub));
  for (Index c = 0; c < nz; ++c) {
    const std::string tag = s.z.describe(c);
    for (const char* name : {"mom1", "mom2", "mom3", "mom4", "mom5", "mom6"}) parts.moments.push_back({std::string(name) + tag, 1.0});
    for (int d = 0; d < 2; ++d) {
      parts.moments.push_back({"mom7_d" + std::to_string(d) + tag, ybound});
      parts.moments.push_back({"mom8_d" + std::to_string(d) + tag, ybound});
    }
  }
  parts.objective = {cfg.y_lb, cfg.y_ub};
  parts.constants = {1.0, 1.0, cfg.y_ub - cfg.y_lb};
  parts.mu_star = cfg.mu_star;
  parts.primitives = std::make_shared<ProgramEvalPrimitives>(cfg, parts.theta.candidates);
  return StructuralModel(std::move(parts));
}

// ---- truth ----

void ProgramEvalTruth::validate() const {
  config.validate();
  const std::size_t nz = config.z0_atoms.size() * config.x_atoms.size();
  const std::size_t ny = static_cast<std::size_t>(config.outcome_grid_points);
  const std::size_t nu = static_cast<std::size_t>(config.u_grid_points);
  auto check_prob = [](const std::vector<double>& p, std::size_t n, const char* what) {
    if (p.size() != n) throw ContractError(std::string(what) + " has the wrong length");
    double s = 0.0;
    for (double v : p) {
      if (!(v >= 0.0)) throw ContractError(std::string(what) + " has a negative entry");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) throw ContractError(std::string(what) + " does not sum to one");
  };
  check_prob(pz, nz, "pz");
  check_prob(u_mass, nu, "u_mass");
  if (g0.size() != nz) throw ContractError("g0 has the wrong length");
  if (outcome_joint.size() != nu * ny * ny) throw ContractError("outcome_joint has the wrong length");
  for (std::size_t u = 0; u < nu; ++u)
    check_prob(std::vector<double>(outcome_joint.begin() + static_cast<std::ptrdiff_t>(u * ny * ny),
                                   outcome_joint.begin() + static_cast<std::ptrdiff_t>((u + 1) * ny * ny)),
               ny * ny, "outcome_joint row");
}

namespace {

Index draw_index(const std::vector<double>& p, double r, std::size_t offset = 0, std::size_t len = 0) {
  if (len == 0) len = p.size() - offset;
  double acc = 0.0;
  Index last = 0;
  for (Index i = 0; i < len; ++i) {
    if (p[offset + i] <= 0.0) continue;
    last = i;
    acc += p[offset + i];
    if (r < acc) return i;
  }
  return last;  // rounding guard
}

class ProgramEvalTruthImpl final : public Truth {
 public:
  explicit ProgramEvalTruthImpl(ProgramEvalTruth t) : t_(std::move(t)), model_(build_program_evaluation(t_.config)) {
    t_.validate();
  }
  const StructuralModel& model() const override { return model_; }
  std::string kind() const override { return "program_evaluation"; }

  WeightedMeasure population() const override {
    const auto& s = model_.support();
    const std::size_t ny = static_cast<std::size_t>(t_.config.outcome_grid_points);
    const auto ug = t_.config.u_grid();
    std::vector<double> w(s.cell_count(), 0.0);
    for (Index z = 0; z < s.z.size(); ++z)
      for (Index iu = 0; iu < ug.size(); ++iu) {
        const double base = t_.pz[z] * t_.u_mass[iu];
        if (base == 0.0) continue;
        const Index d = ug[iu] <= t_.g0[z] + kGridTol ? 1 : 0;
        for (Index i0 = 0; i0 < ny; ++i0)
          for (Index i1 = 0; i1 < ny; ++i1) {
            const double p = base * t_.outcome_joint[(iu * ny + i0) * ny + i1];
            const Index yi = d ? i1 : i0;
            w[s.cell(yi * 2 + d, z)] += p;
          }
      }
    double sum = 0.0;
    for (double v : w) sum += v;
    for (double& v : w) v /= sum;
    return WeightedMeasure::from_weights(s, std::move(w));
  }

  Sample simulate(std::size_t n, std::uint64_t seed) const override {
    if (n == 0) throw ContractError("simulate needs n >= 1");
    const std::size_t ny = static_cast<std::size_t>(t_.config.outcome_grid_points);
    const auto ug = t_.config.u_grid();
    const CounterRng rng(seed);
    Sample out;
    for (std::size_t i = 0; i < n; ++i) {
      const Index z = draw_index(t_.pz, rng.uniform(i, 0));
      const Index iu = draw_index(t_.u_mass, rng.uniform(i, 1));
      const Index pair = draw_index(t_.outcome_joint, rng.uniform(i, 2), iu * ny * ny, ny * ny);
      const Index i0 = pair / ny, i1 = pair % ny;
      const Index d = ug[iu] <= t_.g0[z] + kGridTol ? 1 : 0;
      out.push((d ? i1 : i0) * 2 + d, z);
    }
    return out;
  }

 private:
  ProgramEvalTruth t_;
  StructuralModel model_;
};

}  // namespace

std::unique_ptr<Truth> make_truth(const ProgramEvalTruth& truth) {
  return std::make_unique<ProgramEvalTruthImpl>(truth);
}

}  // namespace ptb
