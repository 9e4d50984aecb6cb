#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ptb/complexity.hpp"
#include "ptb/decision.hpp"
#include "ptb/errors.hpp"
#include "ptb/tabulated.hpp"

using namespace ptb;

TEST(Argmax, FirstOfTiedMaximisers) {
  EXPECT_EQ(argmax_first({0.2, 0.5, 0.5}), Index{1});
  EXPECT_EQ(argmax_first({0.7}), Index{0});
  EXPECT_EQ(argmax_first({0.1, 0.2, 0.9}), Index{2});
  EXPECT_EQ(argmax_first({kInf, 0.2}), Index{1});
}

TEST(Argmax, NoAdmissiblePolicy) {
  try {
    argmax_first({kInf, -kInf});
    FAIL();
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("no admissible policy"), std::string::npos);
  }
}

TEST(CertificateFormula, HandEvaluation) {
  const double expected = 0.4 + std::sqrt(72.0 * std::log(2.0 / 1.1) / 100.0) + 0.05;
  EXPECT_DOUBLE_EQ(Certificate::formula(0.1, 1.0, 100, 0.9, 0.01), expected);
  EXPECT_NEAR(Certificate::formula(0.1, 1.0, 100, 0.9, 0.01), 1.1061, 5e-5);
  EXPECT_DOUBLE_EQ(Certificate::formula(0.1, 1.0, 100, 0.0, 0.01), 0.4 + 0.05);
  EXPECT_LT(Certificate::formula(0.1, 1.0, 100, 0.5, 0.01), Certificate::formula(0.1, 1.0, 100, 0.99, 0.01));
  EXPECT_THROW(Certificate::formula(0.1, 1.0, 0, 0.5, 0.01), ContractError);
  EXPECT_THROW(Certificate::formula(0.1, 1.0, 10, 1.0, 0.01), ContractError);
}

TEST(Regret, DirectSubtraction) {
  const auto r = regrets_from_values({0.2, 0.5});
  EXPECT_DOUBLE_EQ(r[0], 0.3);
  EXPECT_DOUBLE_EQ(r[1], 0.0);
  for (double v : regrets_from_values({0.4, 0.4, 0.4})) EXPECT_EQ(v, 0.0);
}

namespace {

StructuralModel policy_model(const std::vector<double>& phi_per_policy) {
  const std::size_t ng = phi_per_policy.size();
  auto s = fixtures::blank_spec(1, 1, 1, 1, ng, ng, 0);
  s.gminus[0] = {0};
  for (Index g = 0; g < ng; ++g) {
    s.gstar[s.gstar_index(0, 0, 0, 0, g)] = {g};
    s.phi[s.phi_index(g, 0, 0, 0)] = phi_per_policy[g];
  }
  return build_tabulated(s);
}

}  // namespace

TEST(Eme, SelectsFirstEmpiricalMaximiser) {
  const auto m = policy_model({0.2, 0.5, 0.5});
  Sample s;
  s.push(0, 0);
  EXPECT_EQ(eme_select(m, s, 1e-3), Index{1});
  EXPECT_EQ(eme_select(policy_model({0.3}), s, 1e-3), Index{0});
  EXPECT_THROW(eme_select(m, s, 0.0), ContractError);
}

TEST(TrueRegret, PopulationCurve) {
  const auto m = policy_model({0.2, 0.5});
  const auto w = WeightedMeasure::from_weights(m.support(), {1.0});
  EXPECT_DOUBLE_EQ(true_regret(m, w, 0), 0.3);
  EXPECT_DOUBLE_EQ(true_regret(m, w, 1), 0.0);
}

TEST(Certificate, ReproducesClosedFormWithIndependentComplexity) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const auto m = build_tabulated(fixtures::random_spec(rng, {2, 2, 3, 2, 3, 2, 2}));
    const auto s = fixtures::random_sample(rng, m.support(), 5 + rng() % 40);
    const double kappa = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const double eps = std::uniform_real_distribution<double>(1e-4, 0.1)(rng);
    const std::uint64_t seed = rng();
    const Certificate c = certificate_cn(m, s, kappa, eps, seed);
    std::vector<Index> all = {0, 1, 2};
    const double r = rademacher_complexity(restrict_hlb(m, s, all, false), RademacherDraw::generate(s.n(), seed));
    const double h = m.h_bar();
    const double hand = 4 * r + std::sqrt(72 * std::log(2 / (2 - kappa)) * h * h / static_cast<double>(s.n())) + 5 * eps;
    EXPECT_NEAR(c.c_n, hand, 1e-12);
    EXPECT_NEAR(c.c_n, c.recompute(), 1e-15);
    EXPECT_TRUE(c.valid);
    EXPECT_EQ(c.gamma_hat, m.policies().ids[c.gamma_index]);
  }
}

TEST(Certificate, InvalidWhenRowsAreDropped) {
  auto spec = fixtures::blank_spec(1, 1, 1, 2, 1, 1, 0);
  spec.gminus = {{0}, {}};
  for (auto& g : spec.gstar) g = {0};
  const auto m = build_tabulated(spec);
  Sample s;
  s.push(0, 0);
  const auto c = certificate_cn(m, s, 0.9, 0.01, 1);
  EXPECT_FALSE(c.valid);
  EXPECT_EQ(c.dropped_rows, 1U);
}

TEST(Certificate, RejectsBadArguments) {
  const auto m = policy_model({0.2, 0.5});
  Sample s;
  s.push(0, 0);
  EXPECT_THROW(certificate_cn(m, s, 0.0, 0.01, 1), ContractError);
  EXPECT_THROW(certificate_cn(m, s, 1.0, 0.01, 1), ContractError);
  EXPECT_THROW(certificate_cn(m, s, 0.5, 0.0, 1), ContractError);
}
