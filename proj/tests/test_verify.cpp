#include <cmath>

#include <gtest/gtest.h>

#include <mmjump/errors.hpp>
#include <mmjump/stats.hpp>
#include <mmjump/verify.hpp>

#include "support.hpp"

namespace mmjump {
namespace {

using testing::gauss;
using testing::kernel;
using testing::make_spec;
using testing::one_state;
using testing::one_state_model;
using testing::point;
using testing::swap2;

const Point kZero{0.0};

LimitModel single_limit(StateKernel k) {
  return assemble_limit(one_state_model(std::move(k)), stationary_distribution(build_generator(one_state())));
}

StudyConfig small_config(std::size_t N) {
  StudyConfig c;
  c.N = N;
  c.bootstrap = 50;
  c.seed = 9;
  return c;
}

TEST(Grid, Dyadic) {
  const auto g = dyadic_grid(2.0, 2);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g[1], 0.5);
  EXPECT_EQ(g.back(), 2.0);
}

TEST(ParallelFor, CoversEveryIndexAndPropagatesErrors) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 3, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 2, [](std::size_t i) {
                 if (i == 7) throw SimulationError("boom");
               }),
               SimulationError);
}

TEST(TrendVerdict, Rules) {
  const std::vector<double> se{0.01, 0.01, 0.01, 0.01};
  EXPECT_TRUE(trend_verdict(std::vector<double>{0.4, 0.3, 0.2, 0.1}, se, 1, 2.0).passed);
  // one small inversion: rise 0.01 <= 2 sqrt(2) 0.01
  const auto one = trend_verdict(std::vector<double>{0.4, 0.3, 0.31, 0.1}, se, 1, 2.0);
  EXPECT_TRUE(one.passed);
  EXPECT_EQ(one.inversions, 1u);
  // large inversion
  EXPECT_FALSE(trend_verdict(std::vector<double>{0.4, 0.3, 0.5, 0.1}, se, 1, 2.0).passed);
  // two inversions
  EXPECT_FALSE(trend_verdict(std::vector<double>{0.3, 0.31, 0.3, 0.31}, se, 1, 2.0).passed);
}

TEST(Study, DegenerateModelPassesWithZeroDistances) {
  const JumpModel m(1, {kernel({}), kernel({})});
  const auto rep = run_convergence_study(make_spec({1, 2}, swap2()), m, small_config(200));
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.w1[0], 0.0);
    EXPECT_EQ(row.ks_D[0], 0.0);
    EXPECT_EQ(row.B_w1[0], 0.0);
    EXPECT_EQ(row.increment_ratio, 0.0);
    for (double t : row.ccc_tail) EXPECT_EQ(t, 0.0);
  }
  EXPECT_EQ(rep.limit_self_w1, 0.0);
  EXPECT_TRUE(rep.passed);
}

TEST(Study, CompoundPoissonRegimeWithinNoiseFloor) {
  const auto m = one_state_model(kernel({point(1.0, 2.0)}));
  const auto rep = run_convergence_study(one_state(), m, small_config(4000));
  EXPECT_TRUE(rep.compound_poisson_limit);
  EXPECT_GT(rep.limit_self_w1, 0.0);
  EXPECT_LT(rep.rows.back().w1[0], 3.0 * rep.limit_self_w1);
}

TEST(Study, RejectsSmallEnsembles) {
  const auto m = one_state_model(kernel({point(1.0, 2.0)}));
  EXPECT_THROW(run_convergence_study(one_state(), m, small_config(99)), ValidationError);
  auto cfg = small_config(200);
  cfg.eps = {0.01, 0.1};
  EXPECT_THROW(run_convergence_study(one_state(), m, cfg), ValidationError);
}

TEST(Study, ReportIsDeterministicAcrossThreadCounts) {
  const auto f = testing::fixture();
  auto cfg = small_config(300);
  cfg.threads = 1;
  const auto a = to_json(run_convergence_study(f.switching, f.model, cfg)).dump();
  cfg.threads = 3;
  const auto b = to_json(run_convergence_study(f.switching, f.model, cfg)).dump();
  EXPECT_EQ(a, b);
}

TEST(Ensemble, SupDominatesTerminal) {
  const auto f = testing::fixture();
  const PrelimitIntegrands integrands(f.model, probes::catalogue());
  const auto ens = run_prelimit_ensemble(f.switching, f.model, integrands, 0.05, 1.0, 500, 3, 0, kZero, 0);
  const auto term = ens.terminal(0);
  ASSERT_EQ(ens.sup.size(), 500u);
  for (std::size_t p = 0; p < 500; ++p) EXPECT_GE(ens.sup[p], std::abs(term[p]));
}

TEST(Ccc, QuantileSelfConsistency) {
  const auto lim = single_limit(kernel({gauss(0.2, 1.0, 2.0)}));
  const LimitIntegrands integrands(lim, probes::catalogue());
  const std::size_t N = 10000;
  const auto ens = run_limit_ensemble(integrands, 1.0, N, 11, kLimitStream, kZero, true);
  const std::vector<double> c{quantile(ens.sup, 0.99)};
  const auto tab = ccc_table(ens, c);
  EXPECT_NEAR(tab.tail[0], 0.01, 3.0 * std::sqrt(0.01 * 0.99 / N));
}

TEST(Ccc, TailsNonIncreasingAndZeroPastStart) {
  const auto lim = single_limit(kernel({point(1.0, 2.0)}));
  const LimitIntegrands integrands(lim, probes::catalogue());
  const auto ens = run_limit_ensemble(integrands, 1.0, 2000, 12, kLimitStream, kZero, true);
  const std::vector<double> c{0.5, 1.0, 2.0, 3.0, 5.0, 8.0};
  const auto tab = ccc_table(ens, c);
  EXPECT_TRUE(tab.non_increasing);
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LE(tab.tail[i], tab.tail[i - 1]);

  const auto frozen = single_limit(kernel({}));
  const LimitIntegrands fi(frozen, probes::catalogue());
  const Point xi0{0.5};
  const auto still = run_limit_ensemble(fi, 1.0, 200, 1, kLimitStream, xi0, false);
  const std::vector<double> above{0.6, 1.0};
  for (double t : ccc_table(still, above).tail) EXPECT_EQ(t, 0.0);
  EXPECT_EQ(increment_modulus(still).max_ratio, 0.0);
}

TEST(Increment, CompoundPoissonRatio) {
  // E|xi(t) - xi(s)|^2 / (t - s) = Lambda + Lambda^2 (t - s) for unit jumps
  const auto lim = single_limit(kernel({point(1.0, 2.0)}));
  const LimitIntegrands integrands(lim, probes::catalogue());
  const auto ens = run_limit_ensemble(integrands, 1.0, 20000, 13, kLimitStream, kZero, true);
  const double gap = 1.0 / 16.0;
  EXPECT_NEAR(increment_modulus(ens).small_gap_ratio, 2.0 + 4.0 * gap, 0.05);
}

TEST(SupMoment, CompoundPoissonUnitJumps) {
  // nondecreasing path: sup |xi|^2 = xi(T)^2, E = Lambda T + (Lambda T)^2 = 6
  const auto lim = single_limit(kernel({point(1.0, 2.0)}));
  const LimitIntegrands integrands(lim, probes::catalogue());
  const auto ens = run_limit_ensemble(integrands, 1.0, 20000, 14, kLimitStream, kZero, true);
  EXPECT_NEAR(sup_second_moment(ens), 6.0, 0.15);
}

}  // namespace
}  // namespace mmjump
