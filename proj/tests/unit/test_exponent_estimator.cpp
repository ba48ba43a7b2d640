#include <gtest/gtest.h>

#include <cmath>

#include "fluidex/errors.hpp"
#include "fluidex/exponent_estimator.hpp"

using namespace fluidex;

namespace {
const std::vector<double> kHorizons{5, 10, 20, 30};
}

TEST(Sampling, ConstantFlowHasNoVorticitySamples) {
  auto f = make_flow("constant", {{"c1", 1}, {"c2", 0}, {"c3", 0.5}});
  std::vector<std::string> warnings;
  auto s = sample_admissible(f, SampleClass::Star3, 50, 1, &warnings);
  EXPECT_TRUE(s.empty());
  ASSERT_FALSE(warnings.empty());
}

TEST(Sampling, CellularStar2) {
  auto f = make_flow("cellular");
  auto s = sample_admissible(f, SampleClass::Star2, 100, 1);
  ASSERT_EQ(s.size(), 104u);
  int stagnant = 0;
  for (const auto& a : s) {
    EXPECT_TRUE(in_support(f, a.x0, SupportField::GradOmega));
    EXPECT_NEAR(a.xi0.norm(), 1.0, 1e-12);
    EXPECT_NEAR(a.b0.norm(), 1.0, 1e-12);
    EXPECT_NEAR(a.xi0.dot(a.b0), 0.0, 1e-12);
    EXPECT_EQ(a.class_tag, SampleClass::Star2);
    if (velocity(f, a.x0).norm() < 1e-14 && jacobian(f, a.x0).norm() > 0.5) ++stagnant;
  }
  EXPECT_GE(stagnant, 4);
}

TEST(Sampling, CellularF2AlignedIsAligned) {
  auto f = make_flow("cellular");
  auto s = sample_admissible(f, SampleClass::F2Aligned, 10, 1);
  ASSERT_GE(s.size(), 10u);
  for (const auto& a : s) {
    Vec g = vorticity_gradient(f, a.x0);
    EXPECT_NEAR(a.b0.dot(g), 0.0, 1e-12);
    if (g.norm() > 1e-10) EXPECT_LE((a.xi0 - g / g.norm()).norm(), 1e-12);
  }
}

TEST(Sampling, F3OnWholeSupportRejected) {
  EXPECT_THROW(sample_admissible(make_flow("abc"), SampleClass::F3, 10, 1), UnsupportedClass);
  EXPECT_THROW(sample_admissible(make_flow("cellular"), SampleClass::Star3, 10, 1), UnsupportedClass);
}

TEST(Sampling, Deterministic) {
  auto f = make_flow("abc");
  auto a = sample_admissible(f, SampleClass::Star3, 40, 9);
  auto b = sample_admissible(f, SampleClass::Star3, 40, 9);
  auto c = sample_admissible(f, SampleClass::Star3, 40, 10);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].x0, b[i].x0);
    EXPECT_EQ(a[i].xi0, b[i].xi0);
    EXPECT_EQ(a[i].b0, b[i].b0);
  }
  EXPECT_NE(a[0].x0, c[0].x0);
}

TEST(ThetaSup, Examples) {
  auto c = make_flow("cellular");
  EXPECT_GE(theta_sup(c, 10.0, sample_admissible(c, SampleClass::Star2, 20, 1)), 10.0 - 1e-6);

  auto k = make_flow("constant", {{"c1", 1}, {"c2", 2}});
  EXPECT_NEAR(theta_sup(k, 7.0, sample_admissible(k, SampleClass::Full, 20, 1)), 0.0, 1e-14);

  auto b = make_flow("bump-shear");
  EXPECT_NEAR(theta_sup(b, 10.0, sample_admissible(b, SampleClass::F3, 50, 1)), 0.0, 1e-8);
}

TEST(ThetaSup, MonotoneInSampleSet) {
  auto f = make_flow("abc");
  auto big = sample_admissible(f, SampleClass::Star3, 60, 2);
  std::vector<AdmissibleSample> small(big.begin(), big.begin() + 20);
  EXPECT_LE(theta_sup(f, 5.0, small, 5e-3), theta_sup(f, 5.0, big, 5e-3));
}

TEST(EstimateExponent, CellularStar2) {
  auto e = estimate_exponent(make_flow("cellular"), SampleClass::Star2, kHorizons, 500, 1);
  EXPECT_GE(e.mu_hat, 0.95);
  EXPECT_LE(e.mu_hat, 1.10);
  EXPECT_EQ(e.theta_log.size(), kHorizons.size());
  EXPECT_EQ(e.fit_start, 2u);
  auto [slope, res] = linear_fit({20, 30}, {e.theta_log[2], e.theta_log[3]});
  EXPECT_DOUBLE_EQ(slope, e.mu_hat);
  (void)res;
}

TEST(EstimateExponent, ConstantIsZero) {
  auto e = estimate_exponent(make_flow("constant", {{"c1", 1}, {"c2", 2}}), SampleClass::Full, kHorizons, 100, 1);
  EXPECT_NEAR(e.mu_hat, 0.0, 1e-9);
}

TEST(EstimateExponent, AbcStretches) {
  auto f = make_flow("abc");
  auto e = estimate_exponent(f, SampleClass::Star3, kHorizons, 300, 1, 5e-3);
  EXPECT_GT(e.mu_hat, 0.05);
  auto e2 = estimate_exponent(f, SampleClass::Star3, kHorizons, 300, 1, 2.5e-3);
  EXPECT_NEAR(e2.mu_hat, e.mu_hat, 0.2 * e.mu_hat);
}

TEST(EstimateExponent, ScaleInvariance) {
  auto f = make_flow("cellular");
  auto s = sample_admissible(f, SampleClass::Full, 30, 3);
  auto s2 = s;
  for (auto& a : s2) a.xi0 *= 2.0;
  auto e = estimate_from_samples(f, SampleClass::Full, s, {2, 4, 6}, 1e-3);
  auto e2 = estimate_from_samples(f, SampleClass::Full, s2, {2, 4, 6}, 1e-3);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(e.theta_log[i], e2.theta_log[i], 1e-10);
}

TEST(EstimateExponent, BitIdenticalReruns) {
  auto f = make_flow("cellular");
  auto a = estimate_exponent(f, SampleClass::Full, {2, 4, 6}, 50, 5);
  auto b = estimate_exponent(f, SampleClass::Full, {2, 4, 6}, 50, 5);
  EXPECT_EQ(a.theta_log, b.theta_log);
  EXPECT_EQ(a.argmax, b.argmax);
  EXPECT_EQ(a.mu_hat, b.mu_hat);
}

TEST(EstimateExponent, RejectsBadHorizons) {
  auto f = make_flow("cellular");
  EXPECT_THROW(estimate_exponent(f, SampleClass::Full, {5}, 10, 1), ConfigError);
  EXPECT_THROW(estimate_exponent(f, SampleClass::Full, {5, 3}, 10, 1), ConfigError);
}

TEST(RessLowerBound, Arithmetic) {
  ExponentEstimate e;
  e.mu_hat = 0.0;
  EXPECT_DOUBLE_EQ(ress_lower_bound(e, 7.0), 1.0);
  e.mu_hat = 1.0;
  EXPECT_NEAR(ress_lower_bound(e, 2.0), 7.389056, 1e-6);
}

TEST(CompositeReport, Constant) {
  ReportConfig rc;
  rc.classes = {SampleClass::Full, SampleClass::Star2, SampleClass::F2};
  rc.horizons = {2, 4, 6};
  rc.n = 40;
  auto r = composite_report(make_flow("constant", {{"c1", 1}, {"c2", 2}}), rc);
  for (const auto& e : r.estimates) EXPECT_NEAR(e.mu_hat, 0.0, 1e-12) << to_string(e.class_tag);
  EXPECT_LE(r.relation.gap, 1e-12);
}

TEST(CompositeReport, CellularMaxRelation) {
  ReportConfig rc;
  rc.classes = {SampleClass::Full, SampleClass::Star2, SampleClass::F2};
  rc.horizons = kHorizons;
  rc.n = 200;
  auto r = composite_report(make_flow("cellular"), rc);
  ASSERT_TRUE(r.relation.available);
  EXPECT_TRUE(r.relation.holds);
  EXPECT_LE(r.relation.theta_gap, 1e-9);
  for (const auto& e : r.estimates) EXPECT_NEAR(e.mu_hat, 1.0, 0.1) << to_string(e.class_tag);
  ASSERT_NE(r.find(SampleClass::Full), nullptr);
  EXPECT_GE(r.bounds[0][0], std::exp(0.9));
}

TEST(CompositeReport, BumpShearOffBandIsFlat) {
  ReportConfig rc;
  rc.classes = {SampleClass::Full, SampleClass::Star3, SampleClass::F3};
  rc.horizons = {5, 10, 20};
  rc.n = 60;
  rc.step = 5e-3;
  auto r = composite_report(make_flow("bump-shear"), rc);
  const auto* f3 = r.find(SampleClass::F3);
  ASSERT_NE(f3, nullptr);
  EXPECT_NEAR(f3->mu_hat, 0.0, 1e-6);
  EXPECT_NEAR(r.find(SampleClass::Full)->mu_hat, r.find(SampleClass::Star3)->mu_hat, 1e-12);
  EXPECT_TRUE(r.relation.holds);
}

TEST(LinearFit, Exact) {
  auto [s, r] = linear_fit({1, 2, 3}, {2, 4, 6});
  EXPECT_DOUBLE_EQ(s, 2.0);
  EXPECT_NEAR(r, 0.0, 1e-15);
}
