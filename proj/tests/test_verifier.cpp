#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "linmeas/error.hpp"
#include "linmeas/verifier.hpp"

using namespace linmeas;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidInput;
}

bool saturates(const VerifierReport& r, std::size_t id, const std::string& rel) {
  return std::any_of(r.saturations.begin(), r.saturations.end(),
                     [&](const Saturation& s) { return s.config_id == id && s.relation == rel; });
}

}  // namespace

TEST(Family, ParseAndName) {
  EXPECT_EQ(parse_family("conserving"), ModelFamily::conserving);
  EXPECT_EQ(to_string(ModelFamily::general), "general");
  EXPECT_EQ(kind_of([] { parse_family("odd"); }), ErrorKind::InvalidConfig);
}

TEST(RandomModels, RespectFamilyConstraints) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 500; ++k) {
    const auto c = random_model(rng, ModelFamily::conserving);
    EXPECT_TRUE(c.conserves_momentum());
    EXPECT_GE(std::abs(c.beta1()), 0.1);
    EXPECT_LE(std::abs(c.beta1()), 3.0);
    const auto g = random_model(rng, ModelFamily::general, 2.0);
    EXPECT_NEAR(std::abs(g.determinant()), 1.0, 1e-9);
    EXPECT_EQ(g.hbar(), 2.0);
    const auto [o, p] = random_states(rng, 4.0);
    EXPECT_NEAR(o.var_x * o.var_p, 4.0, 1e-9);
    EXPECT_GE(o.sigma_x(), 0.4 - 1e-12);
    EXPECT_LE(p.sigma_x(), 4.0 + 1e-12);
  }
}

TEST(ExpandPlan, CatalogProduct) {
  SweepPlan plan;
  plan.g0_values = {0.5, 1.0, 2.0};
  plan.sigma_x0 = {0.5, 1.0};
  plan.sigma_X0 = {0.5};
  const auto cfgs = expand_plan(plan);
  ASSERT_EQ(cfgs.size(), 6u);
  EXPECT_EQ(*cfgs[2].g0, 1.0);
  EXPECT_EQ(cfgs[2].object.sigma_x(), 0.5);
}

TEST(ExpandPlan, EmptyRangesAreRejected) {
  SweepPlan plan;
  plan.g0_values.clear();
  EXPECT_EQ(kind_of([&] { expand_plan(plan); }), ErrorKind::InvalidConfig);
  SweepPlan r;
  r.source = SweepPlan::Source::random;
  EXPECT_EQ(kind_of([&] { expand_plan(r); }), ErrorKind::InvalidConfig);
  SweepPlan c;
  c.source = SweepPlan::Source::coefficients;
  EXPECT_EQ(kind_of([&] { expand_plan(c); }), ErrorKind::InvalidConfig);
}

TEST(ExpandPlan, UnmeasurableCouplingNeedsPermission) {
  SweepPlan plan;
  plan.g0_values = {0.0, 1.0};
  EXPECT_EQ(kind_of([&] { expand_plan(plan); }), ErrorKind::Unmeasurable);
  plan.allow_unmeasurable = true;
  const auto r = verify_relations(plan);
  EXPECT_EQ(r.unmeasurable, 1u);
  EXPECT_FALSE(r.rows[0].report);
  EXPECT_EQ(r.violations(), 0u);
}

TEST(Verify, MomentumConservingSweepPasses) {
  SweepPlan plan;
  plan.g0_values.clear();
  for (int k = -20; k <= 20; ++k)
    if (k != 0) plan.g0_values.push_back(0.1 * k);
  plan.sigma_x0 = {0.3, 1.0, 2.0};
  plan.sigma_X0 = {0.1, 0.5, 1.5};
  const auto r = verify_relations(plan);
  EXPECT_EQ(r.rows.size(), 40u * 9u);
  EXPECT_EQ(r.violations(), 0u);
  EXPECT_GE(r.rel_64.min_slack, 0.0);
}

TEST(Verify, VonNeumannSaturatesErrorRelations) {
  SweepPlan plan;
  plan.catalog = "von-neumann";
  const auto r = verify_relations(plan);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_TRUE(saturates(r, 0, "64"));
  EXPECT_TRUE(saturates(r, 0, "65"));
  EXPECT_FALSE(saturates(r, 0, "69"));
  EXPECT_EQ(r.violations(), 0u);
}

TEST(Verify, OzawaProbeErrorRelationIsTight) {
  SweepPlan plan;
  plan.catalog = "ozawa";
  plan.sigma_x0 = {0.5, 1.0};
  const auto r = verify_relations(plan);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.report->bound_65, 0.0);
    EXPECT_EQ(row.report->prod_65, 0.0);
    EXPECT_TRUE(saturates(r, row.config_id, "65"));
  }
}

TEST(Verify, RandomSweepIsReproducible) {
  SweepPlan plan;
  plan.source = SweepPlan::Source::random;
  plan.random_count = 300;
  plan.seed = 5;
  const auto a = verify_relations(plan), b = verify_relations(plan);
  EXPECT_EQ(a.violations(), 0u);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) EXPECT_EQ(*a.rows[k].report, *b.rows[k].report);
}

TEST(Verify, OracleSubsample) {
  SweepPlan plan;
  plan.g0_values = {0.5, 1.0, 1.5, 2.0};
  plan.oracle = true;
  plan.oracle_subsample = 2;
  const auto r = verify_relations(plan);
  EXPECT_EQ(r.oracle_rows, 2u);
  EXPECT_EQ(r.oracle_failures, 0u);
  EXPECT_LT(r.max_oracle_gap, kOracleTol);
  EXPECT_TRUE(r.rows[0].oracle);
  EXPECT_FALSE(r.rows[1].oracle);
}

TEST(Subsample, SpreadsEvenly) {
  EXPECT_EQ(subsample_indices(10, 3), (std::vector<std::size_t>{0, 3, 6}));
  EXPECT_EQ(subsample_indices(2, 5), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(subsample_indices(0, 5).empty());
}

TEST(Demo, OzawaProductBelowBoundWhileErrorRelationHolds) {
  const auto d = demo_ozawa_violation();
  EXPECT_TRUE(d.ozawa_product_below_bound);
  EXPECT_TRUE(d.error_relation_holds);
  EXPECT_NEAR(d.report.prod_64, 0.5590169944, 1e-10);
  EXPECT_NE(d.narrative.find("0.559017"), std::string::npos);

  const auto narrow = demo_ozawa_violation(1.0, 0.1);
  EXPECT_NEAR(narrow.report.prod_64, 0.1 * std::sqrt(25.25), 1e-12);
  EXPECT_NE(narrow.narrative.find("0.502494"), std::string::npos);
}

TEST(BornAudit, ReadoutUnbiasedWhileProbePositionIsNot) {
  const auto rows = born_rule_audit(momentum_conserving(1.0),
                                    {MomentSummary::minimal_gaussian(1.0, 1.0), MomentSummary::minimal_gaussian(0.5, -0.5)},
                                    MomentSummary::minimal_gaussian(0.5));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0].readout_bias, 0.0, 1e-15);
  EXPECT_NEAR(rows[0].ozawa_bias, -2.0, 1e-15);
  EXPECT_NEAR(rows[1].ozawa_bias, 1.0, 1e-15);
  const auto oz = born_rule_audit(ozawa(), {MomentSummary::minimal_gaussian(1.0, 0.7)}, MomentSummary::minimal_gaussian(0.5));
  EXPECT_EQ(oz[0].ozawa_bias, 0.0);
}
