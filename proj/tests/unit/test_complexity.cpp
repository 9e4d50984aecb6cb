#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ptb/complexity.hpp"
#include "ptb/errors.hpp"
#include "ptb/tabulated.hpp"

using namespace ptb;

namespace {

RestrictedClass rows_of(std::size_t n, const std::vector<std::vector<double>>& rows) {
  RestrictedClass c;
  c.n = n;
  for (std::size_t r = 0; r < rows.size(); ++r) c.add_row({0, r, 0}, rows[r]);
  return c;
}

RademacherDraw signs(std::vector<int> s) {
  RademacherDraw d;
  d.signs = std::move(s);
  return d;
}

std::vector<Index> all_of(const StructuralModel& m) {
  std::vector<Index> v(m.policies().size());
  for (Index g = 0; g < v.size(); ++g) v[g] = g;
  return v;
}

}  // namespace

TEST(Rademacher, HandExamples) {
  EXPECT_EQ(rademacher_complexity(rows_of(4, {{0, 0, 0, 0}}), signs({1, -1, 1, 1})), 0.0);
  EXPECT_EQ(rademacher_complexity(rows_of(4, {{1, 1, 1, 1}}), signs({1, -1, 1, -1})), 0.0);
  EXPECT_EQ(rademacher_complexity(rows_of(1, {{3}}), signs({1})), 3.0);
  EXPECT_EQ(rademacher_complexity(rows_of(1, {{3}}), signs({-1})), 3.0);
}

TEST(Rademacher, DimensionMismatchIsAContractError) {
  EXPECT_THROW(rademacher_complexity(rows_of(2, {{1, 2}}), signs({1})), ContractError);
  RestrictedClass c;
  c.n = 2;
  EXPECT_THROW(c.add_row({}, std::vector<double>{1.0}), ContractError);
}

TEST(Rademacher, InvariantToDuplicationAndSignFlip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng() % 20, m = 1 + rng() % 6;
    std::vector<std::vector<double>> rows(m, std::vector<double>(n));
    for (auto& r : rows)
      for (auto& v : r) v = u(rng);
    const auto d = RademacherDraw::generate(n, rng());
    auto flipped = d;
    for (auto& s : flipped.signs) s = -s;
    auto doubled = rows;
    doubled.insert(doubled.end(), rows.begin(), rows.end());
    const double base = rademacher_complexity(rows_of(n, rows), d);
    EXPECT_EQ(base, rademacher_complexity(rows_of(n, doubled), d));
    EXPECT_EQ(base, rademacher_complexity(rows_of(n, rows), flipped));
  }
}

TEST(Rademacher, DrawIsDeterministicAndBalanced) {
  const auto a = RademacherDraw::generate(10000, 99), b = RademacherDraw::generate(10000, 99);
  EXPECT_EQ(a.signs, b.signs);
  long sum = 0;
  for (int s : a.signs) {
    ASSERT_TRUE(s == 1 || s == -1);
    sum += s;
  }
  EXPECT_LT(std::abs(sum), 400);  // four standard deviations
}

TEST(RestrictHlb, RowCounts) {
  std::mt19937_64 rng(1);
  auto spec = fixtures::random_spec(rng, {2, 2, 3, 2, 3, 2, 1});
  for (auto& g : spec.gminus)
    if (g.empty()) g = {0};
  const auto m = build_tabulated(spec);
  const auto s = fixtures::random_sample(rng, m.support(), 7);
  EXPECT_EQ(restrict_hlb(m, s, {1}, false).size(), 4U);
  EXPECT_EQ(restrict_hlb(m, s, {1}, true).size(), 16U);
  EXPECT_THROW(restrict_hlb(m, s, {}, false), ContractError);
}

TEST(RestrictHlb, SinglePolicyDegenerateRowEqualsH) {
  auto spec = fixtures::blank_spec(2, 1, 1, 1, 1, 1, 0);
  spec.gminus = {{0}, {0}};
  for (auto& g : spec.gstar) g = {0};
  spec.phi = {0.25, 0.25};
  const auto m = build_tabulated(spec);
  Sample s;
  s.push(0, 0);
  s.push(1, 0);
  const auto c = restrict_hlb(m, s, {0}, false);
  ASSERT_EQ(c.size(), 1U);
  EXPECT_EQ(c.row(0)[0], 0.25);
  EXPECT_EQ(c.row(0)[1], 0.25);
}

TEST(RestrictHlb, DropsRowsWithInfiniteCells) {
  auto spec = fixtures::blank_spec(1, 1, 1, 2, 1, 1, 0);
  spec.gminus = {{0}, {}};
  for (auto& g : spec.gstar) g = {0};
  const auto m = build_tabulated(spec);
  Sample s;
  s.push(0, 0);
  const auto c = restrict_hlb(m, s, {0}, false);
  EXPECT_EQ(c.size(), 1U);
  EXPECT_EQ(c.dropped_rows, 1U);
  EXPECT_EQ(restrict_hlb(m, s, {0}, true).dropped_rows, 3U);
}

TEST(RestrictHlb, BudgetRefusal) {
  std::mt19937_64 rng(2);
  const auto m = build_tabulated(fixtures::random_spec(rng, {2, 2, 3, 2, 2, 2, 4}));
  const auto s = fixtures::random_sample(rng, m.support(), 50);
  EXPECT_THROW(restrict_hlb(m, s, {0, 1}, true, 1000.0), BudgetError);
}

TEST(Covering, HandExamples) {
  EXPECT_EQ(empirical_covering_number(rows_of(2, {{1, 2}}), 0.1), 1U);
  EXPECT_EQ(empirical_covering_number(rows_of(2, {{0, 0}, {1, 0}}), 0.4), 2U);
  EXPECT_EQ(empirical_covering_number(rows_of(2, {{0.5, 3}, {0.5, 3}}), 1e-9), 1U);
  // Empirical norm divides by n: distance 1 / sqrt(2).
  EXPECT_EQ(empirical_covering_number(rows_of(2, {{0, 0}, {1, 0}}), 0.75, CoverNorm::empirical), 1U);
  EXPECT_THROW(empirical_covering_number(rows_of(1, {{0}}), 0.0), ContractError);
}

TEST(Covering, GreedyCentersAreSeparatedAndCoverEveryRow) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<std::vector<double>> rows(20, std::vector<double>(3));
    for (auto& r : rows)
      for (auto& v : r) v = u(rng);
    const auto c = rows_of(3, rows);
    const std::size_t k1 = empirical_covering_number(c, 0.2), k2 = empirical_covering_number(c, 0.5);
    EXPECT_GE(k1, k2);
    EXPECT_LE(k1, rows.size());
  }
}

// The table-based computation must equal the explicit matrix computation.
TEST(HlbRademacher, MatchesExplicitClass) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 60; ++rep) {
    fixtures::RandomShape sh;
    sh.ny = 1 + rng() % 3;
    sh.nz = 1 + rng() % 2;
    sh.nu = 1 + rng() % 3;
    sh.nt = 1 + rng() % 3;
    sh.ng = 1 + rng() % 3;
    sh.J = rng() % 4;
    const auto m = build_tabulated(fixtures::random_spec(rng, sh, rep % 4 == 0 ? 0.15 : 0.0));
    const auto s = fixtures::random_sample(rng, m.support(), 1 + rng() % 25);
    const auto draw = RademacherDraw::generate(s.n(), rng());
    const EnvelopeEngine engine(m);
    std::vector<Index> subset = all_of(m);
    if (subset.size() > 1 && rng() % 2) subset.pop_back();
    for (bool diff : {false, true}) {
      const auto explicit_class = restrict_hlb(m, s, subset, diff);
      const auto implicit = hlb_rademacher(engine, s, subset, diff, draw);
      EXPECT_EQ(implicit.dropped_rows, explicit_class.dropped_rows);
      EXPECT_EQ(implicit.class_size, static_cast<double>(explicit_class.size() + explicit_class.dropped_rows));
      if (explicit_class.size() == 0) {
        EXPECT_EQ(implicit.r_n, 0.0);
        continue;
      }
      EXPECT_NEAR(implicit.r_n, rademacher_complexity(explicit_class, draw), 1e-12);
    }
  }
}

TEST(HlbRademacher, SymmetrizedFlagDoesNotChangeTheValue) {
  std::mt19937_64 rng(14);
  const auto m = build_tabulated(fixtures::random_spec(rng, {2, 2, 3, 2, 2, 2, 2}));
  const auto s = fixtures::random_sample(rng, m.support(), 30);
  const auto draw = RademacherDraw::generate(s.n(), 1);
  const EnvelopeEngine engine(m);
  const auto a = hlb_rademacher(engine, s, all_of(m), false, draw, false);
  const auto b = hlb_rademacher(engine, s, all_of(m), false, draw, true);
  EXPECT_EQ(a.r_n, b.r_n);
  EXPECT_TRUE(b.symmetrized);
}
