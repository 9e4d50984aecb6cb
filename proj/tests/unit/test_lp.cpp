#include <gtest/gtest.h>

#include <random>

#include "ptb/errors.hpp"
#include "ptb/lp.hpp"

using namespace ptb;

TEST(Simplex, SmallHandProblem) {
  // min -x - y  s.t.  x + 2y <= 4, 3x + y <= 6
  LinearProgram lp;
  lp.n = 2;
  lp.c = {-1.0, -1.0};
  lp.add_le({1.0, 2.0}, 4.0);
  lp.add_le({3.0, 1.0}, 6.0);
  const auto r = solve_simplex(lp);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.objective, -2.8, 1e-12);
  EXPECT_NEAR(r.x[0], 1.6, 1e-12);
  EXPECT_NEAR(r.x[1], 1.2, 1e-12);
}

TEST(Simplex, EqualityRows) {
  LinearProgram lp;
  lp.n = 2;
  lp.c = {1.0, 2.0};
  lp.add_eq({1.0, 1.0}, 1.0);
  const auto r = solve_simplex(lp);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.objective, 1.0, 1e-12);
}

TEST(Simplex, InfeasibleAndUnbounded) {
  LinearProgram inf;
  inf.n = 2;
  inf.c = {1.0, 1.0};
  inf.add_eq({1.0, 1.0}, -1.0);
  EXPECT_EQ(solve_simplex(inf).status, LpStatus::infeasible);
  EXPECT_EQ(solve_by_vertex_enumeration(inf).status, LpStatus::infeasible);

  LinearProgram unb;
  unb.n = 2;
  unb.c = {-1.0, 0.0};
  unb.add_le({0.0, 1.0}, 1.0);
  EXPECT_EQ(solve_simplex(unb).status, LpStatus::unbounded);
}

TEST(Simplex, AgreesWithVertexEnumeration) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> sym(-1.0, 1.0), pos(0.1, 2.0);
  for (int rep = 0; rep < 300; ++rep) {
    LinearProgram lp;
    lp.n = 2 + rng() % 3;
    for (std::size_t i = 0; i < lp.n; ++i) lp.c.push_back(sym(rng));
    for (std::size_t i = 0; i < lp.n; ++i) {
      std::vector<double> box(lp.n, 0.0);
      box[i] = 1.0;
      lp.add_le(box, pos(rng));
    }
    const std::size_t extra = rng() % 3;
    for (std::size_t k = 0; k < extra; ++k) {
      std::vector<double> row(lp.n);
      for (auto& v : row) v = sym(rng);
      lp.add_le(row, sym(rng) * 0.5);
    }
    if (rng() % 2) {
      std::vector<double> row(lp.n);
      for (auto& v : row) v = pos(rng);
      lp.add_eq(row, pos(rng));
    }
    const auto a = solve_simplex(lp);
    const auto b = solve_by_vertex_enumeration(lp);
    ASSERT_EQ(a.status, b.status) << "rep " << rep;
    if (a.status == LpStatus::optimal) {
      EXPECT_NEAR(a.objective, b.objective, 1e-8) << "rep " << rep;
      EXPECT_NEAR(solve_lp(lp).objective, a.objective, 1e-8);
    }
  }
}

TEST(VertexEnumeration, RefusesLargeProblems) {
  LinearProgram lp;
  lp.n = 30;
  lp.c.assign(30, 1.0);
  for (int k = 0; k < 30; ++k) lp.add_le(std::vector<double>(30, 1.0), 1.0);
  EXPECT_GT(vertex_enumeration_size(lp), 1e6);
  EXPECT_THROW(solve_by_vertex_enumeration(lp, 1e3), BudgetError);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::optimal);
}
