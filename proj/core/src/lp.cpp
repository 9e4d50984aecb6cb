#include "ptb/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ptb/errors.hpp"

namespace ptb {

namespace {

void check_shapes(const LinearProgram& lp) {
  if (lp.c.size() != lp.n) throw ContractError("LP objective length differs from variable count");
  if (lp.a_ub.size() != lp.b_ub.size() || lp.a_eq.size() != lp.b_eq.size())
    throw ContractError("LP constraint rows and right-hand sides differ in count");
  for (const auto& r : lp.a_ub)
    if (r.size() != lp.n) throw ContractError("LP inequality row has the wrong length");
  for (const auto& r : lp.a_eq)
    if (r.size() != lp.n) throw ContractError("LP equality row has the wrong length");
}

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, n_); }
  double& cost(std::size_t j) { return at(m_, j); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  // Minimises with the current cost row. Returns false if unbounded.
  bool run(const std::vector<char>& allowed, double tol) {
    double last = rhs(m_);
    int stalled = 0;
    for (int iter = 0; iter < 200000; ++iter) {
      const bool bland = stalled > 50;
      std::size_t enter = n_;
      double best = -tol;
      for (std::size_t j = 0; j < n_; ++j) {
        if (!allowed[j]) continue;
        const double d = cost(j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter == n_) return true;
      std::size_t leave = m_;
      double ratio = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= tol) continue;
        const double r = rhs(i) / a;
        if (leave == m_ || r < ratio - 1e-12 || (r <= ratio + 1e-12 && basis_[i] < basis_[leave])) {
          leave = i;
          ratio = r;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
      const double now = rhs(m_);
      stalled = std::abs(now - last) <= 1e-14 * std::max(1.0, std::abs(now)) ? stalled + 1 : 0;
      last = now;
    }
    throw std::runtime_error("simplex iteration limit reached");
  }

 private:
  std::size_t m_, n_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_simplex(const LinearProgram& lp, double tol) {
  check_shapes(lp);
  const std::size_t n = lp.n, mu = lp.a_ub.size(), me = lp.a_eq.size(), m = mu + me;
  // Columns: originals, one slack per inequality, then artificials.
  std::vector<std::size_t> art_row;
  std::vector<double> sign(m, 1.0);
  for (std::size_t i = 0; i < mu; ++i)
    if (lp.b_ub[i] < 0.0) sign[i] = -1.0;
  for (std::size_t i = 0; i < me; ++i)
    if (lp.b_eq[i] < 0.0) sign[mu + i] = -1.0;
  for (std::size_t i = 0; i < m; ++i)
    if (i >= mu || sign[i] < 0.0) art_row.push_back(i);
  const std::size_t n_art = art_row.size(), first_art = n + mu, cols = n + mu + n_art;

  Tableau t(m, cols);
  double bscale = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = i < mu ? lp.a_ub[i] : lp.a_eq[i - mu];
    const double b = i < mu ? lp.b_ub[i] : lp.b_eq[i - mu];
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = sign[i] * row[j];
    if (i < mu) t.at(i, n + i) = sign[i];
    t.rhs(i) = sign[i] * b;
    bscale = std::max(bscale, std::abs(b));
    t.basis()[i] = n + i;  // slack, replaced below for artificial rows
  }
  for (std::size_t a = 0; a < n_art; ++a) {
    t.at(art_row[a], first_art + a) = 1.0;
    t.basis()[art_row[a]] = first_art + a;
  }

  std::vector<char> allowed(cols, 1);
  if (n_art > 0) {
    // Phase one: minimise the sum of artificials, cost row already in canonical form.
    for (std::size_t j = 0; j <= cols; ++j) {
      double s = 0.0;
      for (std::size_t r : art_row) s += t.at(r, j);
      t.at(m, j) = j >= first_art && j < cols ? 0.0 : -s;
    }
    t.run(allowed, tol);
    if (-t.rhs(m) > 1e-7 * bscale) return {LpStatus::infeasible, 0.0, {}};
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis()[i] < first_art) continue;
      for (std::size_t j = 0; j < first_art; ++j)
        if (std::abs(t.at(i, j)) > tol) {
          t.pivot(i, j);
          break;
        }
    }
    for (std::size_t j = first_art; j < cols; ++j) allowed[j] = 0;
  }

  // Phase two cost row.
  for (std::size_t j = 0; j <= cols; ++j) t.at(m, j) = j < n ? lp.c[j] : 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = t.basis()[i];
    const double cb = b < n ? lp.c[b] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= cols; ++j) t.at(m, j) -= cb * t.at(i, j);
  }
  if (!t.run(allowed, tol)) return {LpStatus::unbounded, -std::numeric_limits<double>::infinity(), {}};

  LpResult res;
  res.status = LpStatus::optimal;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (t.basis()[i] < n) res.x[t.basis()[i]] = std::max(0.0, t.rhs(i));
  double obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) obj += lp.c[j] * res.x[j];
  res.objective = obj;
  return res;
}

namespace {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

using Matrix = std::vector<std::vector<double>>;

// Slack form A x = b with x >= 0, rows reduced to an independent set.
// Returns false if the equalities are inconsistent.
bool slack_form(const LinearProgram& lp, Matrix& a, std::vector<double>& b, double tol) {
  const std::size_t n = lp.n, mu = lp.a_ub.size(), cols = n + mu;
  Matrix rows;
  std::vector<double> rhs;
  for (std::size_t i = 0; i < mu; ++i) {
    std::vector<double> r(cols, 0.0);
    std::copy(lp.a_ub[i].begin(), lp.a_ub[i].end(), r.begin());
    r[n + i] = 1.0;
    rows.push_back(std::move(r));
    rhs.push_back(lp.b_ub[i]);
  }
  for (std::size_t i = 0; i < lp.a_eq.size(); ++i) {
    std::vector<double> r(cols, 0.0);
    std::copy(lp.a_eq[i].begin(), lp.a_eq[i].end(), r.begin());
    rows.push_back(std::move(r));
    rhs.push_back(lp.b_eq[i]);
  }
  // Row echelon form; rows that vanish are dropped after checking consistency.
  const std::size_t m = rows.size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < m; ++col) {
    std::size_t piv = rank;
    for (std::size_t i = rank + 1; i < m; ++i)
      if (std::abs(rows[i][col]) > std::abs(rows[piv][col])) piv = i;
    if (std::abs(rows[piv][col]) <= tol) continue;
    std::swap(rows[piv], rows[rank]);
    std::swap(rhs[piv], rhs[rank]);
    for (std::size_t i = rank + 1; i < m; ++i) {
      const double f = rows[i][col] / rows[rank][col];
      if (f == 0.0) continue;
      for (std::size_t j = col; j < cols; ++j) rows[i][j] -= f * rows[rank][j];
      rhs[i] -= f * rhs[rank];
    }
    ++rank;
  }
  for (std::size_t i = rank; i < m; ++i)
    if (std::abs(rhs[i]) > 1e-7) return false;
  rows.resize(rank);
  rhs.resize(rank);
  a = std::move(rows);
  b = std::move(rhs);
  return true;
}

// Solves the square system restricted to the chosen columns; false when singular.
bool solve_basis(const Matrix& a, const std::vector<double>& b, const std::vector<std::size_t>& cols,
                 std::vector<double>& x) {
  const std::size_t m = cols.size();
  Matrix s(m, std::vector<double>(m + 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) s[i][k] = a[i][cols[k]];
    s[i][m] = b[i];
  }
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < m; ++i)
      if (std::abs(s[i][k]) > std::abs(s[piv][k])) piv = i;
    if (std::abs(s[piv][k]) < 1e-11) return false;
    std::swap(s[piv], s[k]);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == k) continue;
      const double f = s[i][k] / s[k][k];
      if (f == 0.0) continue;
      for (std::size_t j = k; j <= m; ++j) s[i][j] -= f * s[k][j];
    }
  }
  x.resize(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = s[i][m] / s[i][i];
  return true;
}

}  // namespace

double vertex_enumeration_size(const LinearProgram& lp) {
  const std::size_t rows = lp.a_ub.size() + lp.a_eq.size();
  return binomial(lp.n + lp.a_ub.size(), rows);
}

LpResult solve_by_vertex_enumeration(const LinearProgram& lp, double max_bases, double tol) {
  check_shapes(lp);
  if (vertex_enumeration_size(lp) > max_bases)
    throw BudgetError("vertex enumeration would visit more than " + std::to_string(max_bases) + " bases");
  Matrix a;
  std::vector<double> b;
  if (!slack_form(lp, a, b, 1e-12)) return {LpStatus::infeasible, 0.0, {}};
  const std::size_t m = a.size(), cols = lp.n + lp.a_ub.size();
  if (binomial(cols, m) > max_bases)
    throw BudgetError("vertex enumeration would visit more than " + std::to_string(max_bases) + " bases");

  LpResult best;
  auto consider = [&](const std::vector<double>& full) {
    double obj = 0.0;
    for (std::size_t j = 0; j < lp.n; ++j) obj += lp.c[j] * full[j];
    if (best.status != LpStatus::optimal || obj < best.objective - 1e-12) {
      best.status = LpStatus::optimal;
      best.objective = obj;
      best.x.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(lp.n));
    }
  };
  if (m == 0) {  // no constraints: the origin is the only vertex
    consider(std::vector<double>(cols, 0.0));
    return best;
  }
  std::vector<std::size_t> pick(m);
  for (std::size_t i = 0; i < m; ++i) pick[i] = i;
  std::vector<double> xb, full(cols);
  while (true) {
    if (solve_basis(a, b, pick, xb)) {
      bool feasible = true;
      for (double v : xb) feasible = feasible && v >= -tol;
      if (feasible) {
        std::fill(full.begin(), full.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) full[pick[i]] = std::max(0.0, xb[i]);
        consider(full);
      }
    }
    // next combination in lexicographic order
    std::size_t i = m;
    while (i > 0 && pick[i - 1] == cols - m + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < m; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

LpResult solve_lp(const LinearProgram& lp, double vertex_limit) {
  if (vertex_enumeration_size(lp) <= vertex_limit) return solve_by_vertex_enumeration(lp, vertex_limit);
  return solve_simplex(lp);
}

}  // namespace ptb
