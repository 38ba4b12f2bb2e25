#include <gtest/gtest.h>

#include <cmath>

#include "moikit/error.hpp"
#include "moikit/harness.hpp"
#include "moikit/statistics.hpp"

using namespace moikit;

namespace {

ScalarFunction poly(std::vector<cplx> c) { return ScalarFunction::polynomial(Polynomial(std::move(c))); }

ComplexMatrix diag(std::vector<double> d) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = d[i];
  return m;
}

TailBoundExperiment small_moi_norm() {
  TailBoundExperiment e;
  e.theorem = TheoremId::moi_norm_a;
  e.operator_models = {{2, UniformLaw{-1.0, 1.0}, 0}, {2, UniformLaw{-1.0, 1.0}, 0}};
  e.fixed_inputs = {diag({1.0, 0.5})};
  e.integrand = SeparableIntegrand{2, {{poly({0.0, 1.0}), poly({1.0, 0.0, 1.0})}}};
  e.theta_grid = {0.25, 0.5, 1.0, 2.0};
  e.samples = 1000;
  e.seed = 17;
  return e;
}

}  // namespace

TEST(Statistics, PairwiseSumAndStderr) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(pairwise_sum(v), 10.0);
  const auto e = mean_and_stderr(v);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.stderr_, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}

TEST(Statistics, KolmogorovTailAndKsUniform) {
  EXPECT_NEAR(kolmogorov_q(1.36), 0.0494, 5e-4);
  std::vector<double> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back((i + 0.5) / 1000.0);
  EXPECT_GT(ks_uniform(grid, 0.0, 1.0).p_value, 0.99);
  std::vector<double> skewed;
  for (int i = 0; i < 1000; ++i) skewed.push_back(std::pow((i + 0.5) / 1000.0, 2.0));
  EXPECT_LT(ks_uniform(skewed, 0.0, 1.0).p_value, 1e-6);
}

TEST(TailRow, SlackAndComparison) {
  const std::vector<double> stat{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> num{1.0, 1.0, 1.0, 1.0};
  const auto r = tail_row(1.5, stat, num);
  EXPECT_DOUBLE_EQ(r.empirical_prob, 0.5);
  EXPECT_DOUBLE_EQ(r.bound_rhs, 1.0 / 1.5);
  EXPECT_NEAR(r.mc_stderr, std::sqrt(0.25 / 4.0), 1e-15);
  EXPECT_TRUE(r.satisfied);
  const auto v = tail_row(1.5, stat, std::vector<double>{0.0, 0.0, 0.0, 0.0});
  EXPECT_FALSE(v.empirical_prob <= v.bound_rhs);
}

TEST(TailBound, MoiNormSmallRunSatisfied) {
  const auto rep = run_tail_bound(small_moi_norm());
  EXPECT_EQ(rep.completed, 1000u);
  EXPECT_EQ(rep.aborted, 0u);
  EXPECT_FALSE(rep.run_failed);
  EXPECT_EQ(rep.rows.size(), 4u);
  EXPECT_TRUE(rep.all_satisfied());
  ASSERT_EQ(rep.expectations.size(), 1u);
  EXPECT_GT(rep.expectations[0].estimate.mean, 0.0);
}

TEST(TailBound, WorkerCountGivesIdenticalStatistics) {
  const auto e = small_moi_norm();
  const auto a = run_tail_bound(e, {1});
  const auto b = run_tail_bound(e, {3});
  EXPECT_EQ(a.statistic.mean, b.statistic.mean);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].empirical_prob, b.rows[i].empirical_prob);
    EXPECT_EQ(a.rows[i].bound_rhs, b.rows[i].bound_rhs);
  }
}

TEST(TailBound, HigherDifferenceScalarCounterexampleIsReported) {
  TailBoundExperiment e;
  e.theorem = TheoremId::higher_difference;
  e.operator_models = {{1, UniformLaw{-1.0, 1.0}, 0}};
  e.fixed_inputs = {diag({0.5})};
  e.function = poly({0.0, 0.0, 1.0});
  e.order = 2;
  e.kappa = 1.0;
  e.theta_grid = {0.1, 0.2, 0.4};
  e.samples = 1000;
  e.seed = 1;
  const auto rep = run_tail_bound(e);
  EXPECT_NEAR(rep.statistic.mean, 0.5, 1e-12);
  EXPECT_FALSE(rep.run_failed);
  EXPECT_FALSE(rep.all_satisfied());
  for (const auto& r : rep.rows) {
    EXPECT_DOUBLE_EQ(r.empirical_prob, 1.0);
    EXPECT_NEAR(r.bound_rhs * r.theta, 0.25, 1e-12);
  }
  EXPECT_EQ(rep.fixed_kappa_rows.size(), 3u);
  EXPECT_EQ(rep.kappa_excluded, 0u);
}

TEST(TailBound, ValidationErrors) {
  auto e = small_moi_norm();
  e.samples = 10;
  EXPECT_THROW(e.validate(), Error);
  e = small_moi_norm();
  e.theta_grid = {1.0, 0.5};
  EXPECT_THROW(e.validate(), Error);
  e = small_moi_norm();
  e.fixed_inputs.clear();
  EXPECT_THROW(e.validate(), Error);
  e = small_moi_norm();
  e.theorem = TheoremId::moi_norm_schatten_b;
  e.schatten_p = {0.5};
  try {
    e.validate();
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::parameter);
  }
  EXPECT_THROW(parse_theorem_id("no_such_theorem"), Error);
  EXPECT_EQ(parse_theorem_id("sa_remainder"), TheoremId::sa_remainder);
}

TEST(TailBound, KthDerivativeRecordsNormOfB) {
  TailBoundExperiment e;
  e.theorem = TheoremId::kth_derivative;
  e.operator_models = {{2, UniformLaw{-1.0, 1.0}, 0}};
  e.fixed_inputs = {diag({1.0, -1.0})};
  e.function = poly({0.0, 0.0, 0.0, 1.0});
  e.order = 2;
  e.theta_grid = {1.0};
  e.samples = 1000;
  const auto rep = run_tail_bound(e);
  EXPECT_EQ(rep.aborted, 0u);
  EXPECT_EQ(rep.constants.at("norm_B"), 1.0);
}

TEST(Expectation, MeanOfUniformIsHalf) {
  const auto est = estimate_expectation([](Rng& r) { return r.uniform01(); }, 10000, 3);
  EXPECT_NEAR(est.mean, 0.5, 4.0 * est.stderr_ + 1e-3);
  EXPECT_THROW(estimate_expectation([](Rng&) { return 0.0; }, 10, 3), Error);
  const auto a = estimate_expectation([](Rng& r) { return r.normal(); }, 500, 4, {1});
  const auto b = estimate_expectation([](Rng& r) { return r.normal(); }, 500, 4, {4});
  EXPECT_EQ(a.mean, b.mean);
}

TEST(ConvergenceInMean, DominatedAndDecreasing) {
  ConvergenceConfig c;
  c.model = {3, UniformLaw{-1.0, 1.0}, 0};
  c.function = poly({0.0, 1.0, -0.5, 0.25});
  c.order = 1;
  c.r = 2;
  c.eps0 = 0.1;
  c.steps = 16;
  c.samples = 50;
  c.seed = 5;
  const auto rep = convergence_in_mean_check(c);
  EXPECT_FALSE(rep.run_failed);
  EXPECT_TRUE(rep.dominated);
  EXPECT_TRUE(rep.monotone_decreasing);
  EXPECT_EQ(rep.rows.size(), 16u);
  EXPECT_NEAR(rep.decay_ratio, 1.0 / 256.0, 1e-3);
  c.r = 3;
  EXPECT_THROW(c.validate(), Error);
}
