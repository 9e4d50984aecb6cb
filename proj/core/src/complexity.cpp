#include "ptb/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ptb/errors.hpp"
#include "ptb/rng.hpp"

namespace ptb {

RademacherDraw RademacherDraw::generate(std::size_t n, std::uint64_t seed) {
  RademacherDraw d;
  d.seed = seed;
  d.signs.resize(n);
  const CounterRng rng(seed);
  for (std::size_t i = 0; i < n; ++i) d.signs[i] = (rng.bits(i, 0) >> 63) ? 1 : -1;
  return d;
}

void RestrictedClass::add_row(const ClassRow& id, std::span<const double> v) {
  if (v.size() != n) throw ContractError("class row has the wrong number of sample points");
  rows.push_back(id);
  values.insert(values.end(), v.begin(), v.end());
}

double rademacher_complexity(const RestrictedClass& cls, const RademacherDraw& draw) {
  if (cls.size() == 0) throw ContractError("rademacher complexity of an empty class");
  if (draw.signs.size() != cls.n) throw ContractError("rademacher draw length differs from the sample size");
  double best = 0.0;
  for (std::size_t r = 0; r < cls.size(); ++r) {
    const auto v = cls.row(r);
    double s = 0.0;
    for (std::size_t i = 0; i < cls.n; ++i) s += draw.signs[i] * v[i];
    best = std::max(best, std::abs(s) / static_cast<double>(cls.n));
  }
  return best;
}

RestrictedClass restrict_hlb(const StructuralModel& model, const Sample& sample, const std::vector<Index>& subset,
                             bool include_differences, double max_entries) {
  if (subset.empty()) throw ContractError("policy subset is empty");
  for (Index g : subset)
    if (g >= model.policies().size()) throw ContractError("policy subset refers to a missing policy");
  if (sample.n() == 0) throw ContractError("sample is empty");
  const std::size_t J = model.moment_count();
  if (J >= 63) throw BudgetError("explicit class enumeration needs fewer than 63 moments");
  const std::size_t patterns = std::size_t{1} << J;
  const double plain = static_cast<double>(model.theta().size()) * subset.size() * patterns;
  const double rows = include_differences ? plain * plain : plain;
  if (rows * static_cast<double>(sample.n()) > max_entries)
    throw BudgetError("restricted class would hold " + format_real(rows * sample.n()) + " entries");

  // h is evaluated once per distinct sample cell.
  const auto& s = model.support();
  std::map<Index, std::size_t> cell_slot;
  std::vector<std::size_t> column_slot(sample.n());
  std::vector<std::pair<Index, Index>> cells;
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const Index c = s.cell(sample.y[i], sample.z[i]);
    auto [it, fresh] = cell_slot.emplace(c, cells.size());
    if (fresh) cells.emplace_back(sample.y[i], sample.z[i]);
    column_slot[i] = it->second;
  }

  RestrictedClass base;
  base.n = sample.n();
  base.bound = model.h_bar();
  std::vector<std::uint8_t> lambda(J);
  std::vector<double> cell_val(cells.size()), row(sample.n());
  for (Index t = 0; t < model.theta().size(); ++t)
    for (Index g : subset)
      for (std::size_t k = 0; k < patterns; ++k) {
        for (std::size_t j = 0; j < J; ++j) lambda[j] = static_cast<std::uint8_t>((k >> j) & 1U);
        bool finite = true;
        for (std::size_t q = 0; q < cells.size() && finite; ++q) {
          cell_val[q] = h_integrand(model, cells[q].first, cells[q].second, t, g, lambda, Side::lower);
          finite = std::isfinite(cell_val[q]);
        }
        if (!finite) {
          ++base.dropped_rows;
          continue;
        }
        for (std::size_t i = 0; i < sample.n(); ++i) row[i] = cell_val[column_slot[i]];
        base.add_row({t, g, k}, row);
      }
  if (!include_differences) return base;

  RestrictedClass diff;
  diff.n = base.n;
  diff.bound = 2.0 * base.bound;
  const auto total = static_cast<std::uint64_t>(plain);
  const std::uint64_t kept = base.size();
  diff.dropped_rows = total * total - kept * kept;
  for (std::size_t a = 0; a < base.size(); ++a)
    for (std::size_t b = 0; b < base.size(); ++b) {
      const auto ra = base.row(a), rb = base.row(b);
      for (std::size_t i = 0; i < base.n; ++i) row[i] = ra[i] - rb[i];
      ClassRow id = base.rows[a];
      id.theta2 = base.rows[b].theta;
      id.gamma2 = base.rows[b].gamma;
      id.lambda2 = base.rows[b].lambda;
      diff.add_row(id, row);
    }
  return diff;
}

std::size_t empirical_covering_number(const RestrictedClass& cls, double eps, CoverNorm norm) {
  if (!(eps > 0.0)) throw ContractError("covering radius must be positive");
  const std::size_t m = cls.size();
  if (m == 0) return 0;
  const double scale = norm == CoverNorm::empirical ? 1.0 / static_cast<double>(cls.n) : 1.0;
  auto dist = [&](std::size_t a, std::size_t b) {
    const auto ra = cls.row(a), rb = cls.row(b);
    double s = 0.0;
    for (std::size_t i = 0; i < cls.n; ++i) s += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    return std::sqrt(s * scale);
  };
  std::vector<double> d(m);
  for (std::size_t r = 0; r < m; ++r) d[r] = dist(r, 0);
  std::size_t centers = 1;
  while (true) {
    const std::size_t far = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
    if (d[far] <= eps) return centers;
    ++centers;
    for (std::size_t r = 0; r < m; ++r) d[r] = std::min(d[r], dist(r, far));
  }
}

ClassComplexity hlb_rademacher(const EnvelopeEngine& engine, const Sample& sample, const std::vector<Index>& subset,
                               bool include_differences, const RademacherDraw& draw, bool symmetrized) {
  const StructuralModel& model = engine.model();
  if (subset.empty()) throw ContractError("policy subset is empty");
  if (sample.n() == 0) throw ContractError("sample is empty");
  if (draw.signs.size() != sample.n()) throw ContractError("rademacher draw length differs from the sample size");
  const auto& s = model.support();
  const double n = static_cast<double>(sample.n());
  const double mu = model.mu_star();

  // Signed weights per cell; a cell is "present" when any observation falls in it.
  std::vector<double> signed_w(s.cell_count(), 0.0);
  std::vector<std::uint8_t> present(s.cell_count(), 0);
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const Index c = s.cell(sample.y[i], sample.z[i]);
    signed_w[c] += draw.signs[i];
    present[c] = 1;
  }
  std::vector<Index> cells, active;
  std::vector<double> w;
  for (Index c = 0; c < s.cell_count(); ++c) {
    if (present[c]) cells.push_back(c);
    if (signed_w[c] != 0.0) {
      active.push_back(c);
      w.push_back(signed_w[c] / n);
    }
  }

  ClassComplexity out;
  out.symmetrized = symmetrized;
  const double patterns_full = std::ldexp(1.0, static_cast<int>(model.moment_count()));
  double gmax = -kInf, gmin = kInf, kept = 0.0, total = 0.0;
  for (Index t = 0; t < model.theta().size(); ++t)
    for (Index g : subset) {
      if (g >= model.policies().size()) throw ContractError("policy subset refers to a missing policy");
      total += patterns_full;
      const TableView v = engine.table(Side::lower, t, g);
      bool finite = true;
      for (Index c : cells) finite = finite && !v.cell_infinite[c];
      if (!finite) continue;
      kept += patterns_full;
      double hi = -kInf, lo = kInf;
      for (std::size_t k = 0; k < v.patterns; ++k) {
        const double* row = v.h + k * v.cells;
        double f = 0.0;
        for (std::size_t i = 0; i < active.size(); ++i) f += w[i] * row[active[i]];
        hi = std::max(hi, f);
        lo = std::min(lo, f);
      }
      for (std::size_t j = 0; j < v.n_sep; ++j) {
        double sj = 0.0;
        for (std::size_t i = 0; i < active.size(); ++i) sj += w[i] * v.sep[active[i] * v.n_sep + j];
        if (sj > 0.0) hi += mu * sj;
        if (sj < 0.0) lo += mu * sj;
      }
      gmax = std::max(gmax, hi);
      gmin = std::min(gmin, lo);
    }
  out.class_size = include_differences ? total * total : total;
  const double kept_rows = include_differences ? kept * kept : kept;
  out.dropped_rows = static_cast<std::uint64_t>(out.class_size - kept_rows);
  if (kept == 0.0) return out;
  out.r_n = include_differences ? gmax - gmin : std::max(gmax, -gmin);
  out.r_n = std::max(out.r_n, 0.0);
  return out;
}

}  // namespace ptb
