#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <mmjump/errors.hpp>
#include <mmjump/jump_model.hpp>

#include "support.hpp"

namespace mmjump {
namespace {

using testing::gauss;
using testing::kernel;
using testing::one_state_model;
using testing::point;
using testing::uniform;

const Point kOrigin{0.0};

// Composite Simpson on [lo, hi]; independent of the library quadrature.
template <class F>
double simpson(F f, double lo, double hi, int n = 200000) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double normal_pdf(double x, double m, double sd) {
  const double z = (x - m) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

TestFunction power(int k) {
  return {"v^" + std::to_string(k), [k](std::span<const double> v) { return std::pow(v[0], k); }, {}};
}

TEST(KernelMean, PointMass) {
  const auto m = one_state_model(kernel({point(1.0, 2.0)}));
  const auto km = kernel_mean(m, kOrigin, 0);
  EXPECT_DOUBLE_EQ(km.jump_mean(0), 2.0);
  EXPECT_DOUBLE_EQ(km.drift(0), 2.0);
}

TEST(KernelMean, SymmetricGaussianWithDrift) {
  const auto m = one_state_model(kernel({gauss(0.0, 1.0, 3.0)}, 1.0, 0.5));
  const auto km = kernel_mean(m, kOrigin, 0);
  EXPECT_DOUBLE_EQ(km.jump_mean(0), 0.0);
  EXPECT_DOUBLE_EQ(km.drift(0), 0.5);
}

TEST(KernelMean, MixtureAgainstSimpsonOracle) {
  const auto m = one_state_model(kernel({point(1.0, 2.0), gauss(0.0, 1.0, 3.0)}, 1.0, 0.5));
  const double gauss_part = simpson([](double v) { return 3.0 * v * normal_pdf(v, 0.0, 1.0); }, -12, 12);
  const double oracle = 2.0 * 1.0 + gauss_part + 1.0 * 0.5;
  EXPECT_NEAR(oracle, 2.5, 1e-10);
  EXPECT_NEAR(kernel_mean(m, kOrigin, 0).drift(0), oracle, 1e-10);
}

TEST(KernelMean, RateGrowthSaturates) {
  // lambda(u) = 2 (1 + 0.5 min(|u|, 2))
  const auto m = one_state_model(kernel({point(1.0, 2.0, 0.5, 2.0)}));
  EXPECT_DOUBLE_EQ(kernel_mean(m, Point{1.0}, 0).jump_mean(0), 3.0);
  EXPECT_DOUBLE_EQ(kernel_mean(m, Point{-5.0}, 0).jump_mean(0), 4.0);
  EXPECT_DOUBLE_EQ(m.max_big_jump_intensity(0), 4.0);
}

TEST(KernelSecondMoment, ClosedForms) {
  EXPECT_DOUBLE_EQ(kernel_second_moment(one_state_model(kernel({point(1.0, 2.0)})), kOrigin, 0)(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(kernel_second_moment(one_state_model(kernel({gauss(0.0, 2.0, 1.0)})), kOrigin, 0)(0, 0), 4.0);
  // int_0^3 v^2 dv / 3 = 3
  const double oracle = simpson([](double v) { return v * v / 3.0; }, 0.0, 3.0, 1000);
  EXPECT_NEAR(kernel_second_moment(one_state_model(kernel({uniform(0.0, 3.0, 1.0)})), kOrigin, 0)(0, 0), oracle,
              1e-12);
}

TEST(KernelGMoment, ZeroKernel) {
  const auto m = one_state_model(kernel({}));
  for (const auto& g : probes::catalogue()) EXPECT_EQ(kernel_g_moment(m, kOrigin, 0, g), 0.0);
}

TEST(KernelGMoment, PointMassAtTwo) {
  const auto m = one_state_model(kernel({point(2.0, 1.0)}));
  EXPECT_DOUBLE_EQ(kernel_g_moment(m, kOrigin, 0, probes::cube_min()), 1.0);
}

TEST(KernelGMoment, GaussianTailSecondMoment) {
  // int_{|v|>3} v^2 phi(v) dv = 2 (3 phi(3) + Qbar(3)), by parts.
  const double tail = 0.5 * std::erfc(3.0 / std::sqrt(2.0));
  const double closed = 2.0 * (3.0 * normal_pdf(3.0, 0, 1) + tail);
  const double oracle = 2.0 * simpson([](double v) { return v * v * normal_pdf(v, 0, 1); }, 3.0, 40.0);
  EXPECT_NEAR(closed, oracle, 1e-12);
  EXPECT_NEAR(closed, 0.0292909, 1e-7);
  const auto m = one_state_model(kernel({gauss(0.0, 1.0, 1.0)}));
  EXPECT_NEAR(kernel_g_moment(m, kOrigin, 0, probes::tail_second_moment(3.0)), closed, 1e-8);
}

TEST(KernelGMoment, AdditiveOverComponents) {
  const std::vector<JumpComponent> comps{point(0.7, 1.5), gauss(0.3, 0.8, 2.0), uniform(-1.0, 2.5, 0.5)};
  const auto mixture = one_state_model(kernel(comps));
  for (const auto& g : probes::catalogue()) {
    double sum = 0.0;
    for (const auto& c : comps) sum += kernel_g_moment(one_state_model(kernel({c})), kOrigin, 0, g, 1e-12);
    EXPECT_NEAR(kernel_g_moment(mixture, kOrigin, 0, g, 1e-12), sum, 1e-10) << g.name;
  }
}

TEST(KernelGMoment, ClosedFormMomentsMatchQuadrature) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> pos(0.1, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double a = u(gen);
    const std::vector<JumpComponent> comps{gauss(u(gen), pos(gen), 1.0), uniform(a, a + pos(gen), 1.0),
                                           point(u(gen), 1.0)};
    for (const auto& c : comps) {
      EXPECT_NEAR(law_g_moment(c, power(1)), c.law_mean()(0), 1e-7);
      EXPECT_NEAR(law_g_moment(c, power(2)), c.law_second_moment()(0, 0), 1e-7);
    }
  }
}

TEST(Component, Validation) {
  EXPECT_THROW(gauss(0.0, 0.0, 1.0).validate("c"), ValidationError);
  EXPECT_THROW(uniform(1.0, 1.0, 1.0).validate("c"), ValidationError);
  EXPECT_THROW(point(0.0, -1.0).validate("c"), ValidationError);
  EXPECT_NO_THROW(point(0.0, 0.0).validate("c"));
}

TEST(PrelimitKernel, EventRateIsPositive) {
  const auto m = one_state_model(kernel({point(1.0, 2.0)}, 1.0, 1.0));
  const PrelimitKernel k(m, 0.1);
  EXPECT_DOUBLE_EQ(k.event_rate(kOrigin, 0), 12.0);
  EXPECT_DOUBLE_EQ(k.small_jump(kOrigin, 0)[0], 0.1);
}

TEST(ValidatePa, ThetaBIsExactlyZero) {
  const auto f = testing::fixture();
  const std::vector<double> eps{0.1, 0.05, 0.02, 0.01};
  const auto rep = validate_pa(f.model, eps, diagonal_grid(-4, 4, 9, 1), probes::catalogue());
  EXPECT_TRUE(rep.theta_b_zero);
  for (const auto& row : rep.rows) EXPECT_EQ(row.theta_b, 0.0);
  EXPECT_LE(rep.max_closed_form_gap, 1e-12);
  EXPECT_TRUE(rep.passed);
}

TEST(ValidatePa, UnitDriftClosedForms) {
  const auto m = one_state_model(kernel({}, 1.0, 1.0));
  const std::vector<double> eps{0.5, 0.1, 0.05};
  const auto rep = validate_pa(m, eps, {kOrigin}, {probes::cube_min()});
  ASSERT_EQ(rep.columns.size(), 3u);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    EXPECT_NEAR(rep.columns[1].sup_by_eps[i], eps[i], 1e-15);
    EXPECT_NEAR(rep.columns[2].sup_by_eps[i], eps[i] * eps[i], 1e-15);
  }
  EXPECT_TRUE(rep.passed);
}

TEST(ValidatePa, StrictlyDecreasingWhenDriftActive) {
  const auto f = testing::fixture();
  const std::vector<double> eps{0.1, 0.05, 0.02, 0.01};
  const auto rep = validate_pa(f.model, eps, diagonal_grid(-4, 4, 9, 1), probes::catalogue());
  for (const auto& col : rep.columns) {
    if (col.name == "theta_b") continue;
    // |eps d| <= 0.4 never reaches the tail probe's cutoff at 1
    if (col.name.find("tail_sq") != std::string::npos) {
      for (double v : col.sup_by_eps) EXPECT_EQ(v, 0.0);
      continue;
    }
    for (std::size_t i = 1; i < eps.size(); ++i) EXPECT_LT(col.sup_by_eps[i], col.sup_by_eps[i - 1]) << col.name;
  }
}

TEST(ValidatePa, RejectsAscendingGrid) {
  const auto m = one_state_model(kernel({}, 1.0, 1.0));
  const std::vector<double> eps{0.01, 0.1};
  EXPECT_THROW(validate_pa(m, eps, {kOrigin}, {}), ValidationError);
}

TEST(ValidateC3C4, ZeroKernelPasses) {
  const auto m = one_state_model(kernel({}));
  const std::vector<double> c{1, 2, 4};
  const auto rep = validate_c3_c4(m, c, diagonal_grid(-2, 2, 5, 1));
  EXPECT_TRUE(rep.passed);
  for (const auto& row : rep.c3) EXPECT_EQ(row.sup_tail, 0.0);
  EXPECT_EQ(rep.required_L, 0.0);
}

TEST(ValidateC3C4, GaussianTailAtSixIsTiny) {
  const auto m = one_state_model(kernel({gauss(0.0, 1.0, 1.0)}));
  const std::vector<double> c{1, 2, 4, 6};
  const auto rep = validate_c3_c4(m, c, diagonal_grid(-2, 2, 5, 1));
  EXPECT_LT(rep.c3.back().sup_tail, 1e-6);
  EXPECT_TRUE(rep.c3_monotone);
}

TEST(ValidateC3C4, PointMassHasNoTailBeyondSupport) {
  const auto m = one_state_model(kernel({point(1.0, 1.0)}));
  const std::vector<double> c{1.5, 2, 4};
  const auto rep = validate_c3_c4(m, c, diagonal_grid(-2, 2, 5, 1));
  for (const auto& row : rep.c3) EXPECT_EQ(row.sup_tail, 0.0);
  EXPECT_FALSE(rep.notes.empty());
}

TEST(ValidateC3C4, FixturePasses) {
  const auto f = testing::fixture();
  const std::vector<double> c{1, 2, 4, 8};
  const auto rep = validate_c3_c4(f.model, c, diagonal_grid(-4, 4, 9, 1));
  EXPECT_TRUE(rep.passed) << (rep.failures.empty() ? "" : rep.failures.front());
}

}  // namespace
}  // namespace mmjump
