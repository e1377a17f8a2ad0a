#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <mmjump/averaging.hpp>
#include <mmjump/errors.hpp>
#include <mmjump/model_io.hpp>

#include "support.hpp"

namespace mmjump {
namespace {

using testing::gauss;
using testing::kernel;
using testing::kernel_linear;
using testing::make_spec;
using testing::point;
using testing::swap2;
using testing::uniform;

StationaryLaw law(std::vector<double> p) {
  StationaryLaw s;
  s.pi = Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
  return s;
}

const std::vector<double> kEps{0.1, 0.05, 0.02, 0.01};

TEST(AssembleLimit, ArithmeticMeanOfDrifts) {
  const JumpModel m(1, {kernel({}, 1.0, 1.0), kernel({}, 1.0, 3.0)});
  const auto lim = assemble_limit(m, law({0.5, 0.5}));
  for (double u : {-2.0, 0.0, 3.0}) EXPECT_DOUBLE_EQ(lim.averaged_drift(Point{u})(0), 2.0);
}

TEST(AssembleLimit, PiScaledRates) {
  const JumpModel m(1, {kernel({point(1.0, 3.0)}), kernel({point(1.0, 0.0)})});
  const auto lim = assemble_limit(m, law({2.0 / 3.0, 1.0 / 3.0}));
  EXPECT_NEAR(lim.jump_intensity(Point{0.0}), 2.0, 1e-15);
  ASSERT_TRUE(lim.total_rate().has_value());
  EXPECT_NEAR(*lim.total_rate(), 2.0, 1e-15);
}

TEST(AssembleLimit, StateIndependentModelIsFixedPoint) {
  const auto k = kernel_linear({point(0.5, 2.0, 0.3, 1.0), gauss(-0.2, 0.7, 1.5)}, 1.0, 0.4, -0.2, 2.0);
  const JumpModel m(1, {k, k, k});
  const auto lim = assemble_limit(m, law({0.2, 0.5, 0.3}));
  const JumpModel single(1, {k});
  for (double u : {-3.0, -0.5, 0.0, 1.0, 4.0}) {
    const Point p{u};
    EXPECT_NEAR(lim.averaged_drift(p)(0), kernel_mean(single, p, 0).drift(0), 1e-12);
    EXPECT_NEAR(lim.averaged_second_moment(p)(0, 0), kernel_second_moment(single, p, 0)(0, 0), 1e-12);
    EXPECT_NEAR(lim.jump_intensity(p), single.big_jump_intensity(p, 0), 1e-12);
  }
}

TEST(AssembleLimit, DimensionMismatchRejected) {
  const JumpModel m(1, {kernel({}), kernel({})});
  EXPECT_THROW(assemble_limit(m, law({1.0})), ValidationError);
}

TEST(AssembleLimit, FlowDriftIdentityOnFixture) {
  const auto f = testing::fixture();
  const auto pi = stationary_distribution(build_generator(f.switching));
  const auto lim = assemble_limit(f.model, pi);
  for (double u = -5.0; u <= 5.0; u += 0.25) {
    const Point p{u};
    EXPECT_NEAR(lim.flow_drift(p)(0) + lim.averaged_jump_mean(p)(0), lim.averaged_drift(p)(0), 1e-10);
  }
}

TEST(AssembleLimit, AveragingIsLinearInPerStateMeans) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> pos(0.1, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<StateKernel> states;
    for (int x = 0; x < 3; ++x) {
      states.push_back(kernel_linear({point(u(gen), pos(gen), pos(gen), pos(gen)), gauss(u(gen), pos(gen), pos(gen)),
                                      uniform(-pos(gen), pos(gen), pos(gen))},
                                     pos(gen), u(gen), u(gen), pos(gen)));
    }
    const JumpModel m(1, states);
    std::vector<double> w{pos(gen), pos(gen), pos(gen)};
    const double sum = w[0] + w[1] + w[2];
    for (double& v : w) v /= sum;
    const auto lim = assemble_limit(m, law(w));
    for (double t : {-3.0, -0.7, 0.0, 0.4, 2.5}) {
      const Point p{t};
      double b = 0.0, jm = 0.0, c = 0.0, rate = 0.0;
      for (StateId x = 0; x < 3; ++x) {
        const auto km = kernel_mean(m, p, x);
        b += w[x] * km.drift(0);
        jm += w[x] * km.jump_mean(0);
        c += w[x] * kernel_second_moment(m, p, x)(0, 0);
        rate += w[x] * m.big_jump_intensity(p, x);
      }
      EXPECT_NEAR(lim.averaged_drift(p)(0), b, 1e-10);
      EXPECT_NEAR(lim.averaged_jump_mean(p)(0), jm, 1e-10);
      EXPECT_NEAR(lim.averaged_second_moment(p)(0, 0), c, 1e-10);
      EXPECT_NEAR(lim.jump_intensity(p), rate, 1e-10);
    }
  }
}

TEST(AssembleLimit, SingleStateSerializationKeepsDrift) {
  const auto f = testing::fixture();
  const auto pi = stationary_distribution(build_generator(f.switching));
  const auto lim = assemble_limit(f.model, pi);
  const auto reparsed = parse_model(model_to_json("avg", single_state_switching(), lim.as_single_state_model()));
  for (double u : {-4.0, -1.0, 0.0, 2.0, 6.0}) {
    const Point p{u};
    EXPECT_NEAR(kernel_mean(reparsed.model, p, 0).drift(0), lim.averaged_drift(p)(0), 1e-12);
    EXPECT_NEAR(reparsed.model.big_jump_intensity(p, 0), lim.jump_intensity(p), 1e-12);
  }
}

TEST(Pa3, BalancedModelHasZeroGap) {
  // b(x) = int v Gamma(dv; x): rho = 0
  const JumpModel m(1, {kernel({point(1.0, 2.0)}), kernel({gauss(-0.5, 1.0, 1.0)})});
  const auto rep = check_pa3(m, law({2.0 / 3.0, 1.0 / 3.0}));
  EXPECT_EQ(rep.gap, 0.0);
  EXPECT_TRUE(rep.compound_poisson_enabled);
  EXPECT_NEAR(rep.total_rate, 2.0 * 2.0 / 3.0 + 1.0 / 3.0, 1e-15);
}

TEST(Pa3, UnitOffsetDisablesCompoundPoisson) {
  const JumpModel m(1, {kernel({point(1.0, 2.0)}, 1.0, 1.0), kernel({point(1.0, 2.0)}, 1.0, 1.0)});
  const auto rep = check_pa3(m, law({0.5, 0.5}));
  EXPECT_DOUBLE_EQ(rep.gap, 1.0);
  EXPECT_FALSE(rep.compound_poisson_enabled);
}

TEST(Pa3, BalancedByCancellingDrifts) {
  // rho d averages to zero under pi = (2/3, 1/3)
  const auto f = load_model(testing::source_path("models/two_state_cp.json"));
  const auto pi = stationary_distribution(build_generator(f.switching));
  const auto rep = check_pa3(f.model, pi);
  EXPECT_LE(rep.gap, 1e-15);
  EXPECT_TRUE(rep.compound_poisson_enabled);
}

TEST(Pa3, RateGrowthIsNotApplicable) {
  const auto f = testing::fixture();
  const auto rep = check_pa3(f.model, stationary_distribution(build_generator(f.switching)));
  EXPECT_FALSE(rep.applicable);
  EXPECT_FALSE(rep.compound_poisson_enabled);
}

TEST(Residual, StateIndependentDriftGivesZero) {
  const auto k = kernel({point(1.0, 2.0)}, 1.0, 0.5);
  const JumpModel m(1, {k, k});
  const std::vector<double> u{-1.0, 0.0, 1.0};
  const auto tab = perturbation_residual(make_spec({1, 1}, swap2()), m, smooth_probes::sine(), u, kEps);
  for (const auto& r : tab.rows) {
    EXPECT_EQ(r.phi1, 0.0);
    EXPECT_EQ(r.residual, 0.0);
  }
  EXPECT_EQ(tab.ratio, 1.0);
  EXPECT_TRUE(tab.bounded);
}

TEST(Residual, HandSolvedPoissonCorrector) {
  // f = (bhat - b) phi' = (1, -1); Q phi_1 = f with pi(phi_1) = 0 gives
  // phi_1 = (-1/2, 1/2), which cancels the O(1) term (b - bhat) phi'.
  const JumpModel m(1, {kernel({}, 1.0, 1.0), kernel({}, 1.0, 3.0)});
  const std::vector<double> u{-1.0, 0.0, 2.0};
  const auto tab = perturbation_residual(make_spec({1, 1}, swap2()), m, smooth_probes::identity(), u, kEps);
  for (const auto& r : tab.rows) {
    EXPECT_NEAR(r.phi1, r.x == 0 ? -0.5 : 0.5, 1e-14);
    EXPECT_NEAR(r.residual, 0.0, 1e-12);
  }
}

TEST(Residual, LinearStateDriftAgainstHandOracle) {
  // b(u; x) = (x + 1) u, phi = u^2: f = (u^2, -u^2), phi_1 = (-u^2/2, u^2/2),
  // r = eps b d(phi_1)/du = eps (-u^2, 2 u^2).
  const JumpModel m(1, {kernel_linear({}, 1.0, 0.0, 1.0), kernel_linear({}, 1.0, 0.0, 2.0)});
  const std::vector<double> u{-1.5, -0.5, 0.5, 1.0, 2.0};
  const auto tab = perturbation_residual(make_spec({1, 1}, swap2()), m, smooth_probes::square(), u, kEps);
  for (const auto& r : tab.rows) {
    const double oracle = r.eps * (r.x == 0 ? -1.0 : 2.0) * r.u * r.u;
    EXPECT_NEAR(r.residual, oracle, 1e-8 * (1.0 + std::abs(oracle)));
    EXPECT_NEAR(r.phi1, (r.x == 0 ? -0.5 : 0.5) * r.u * r.u, 1e-12);
  }
  EXPECT_LE(tab.ratio, 1.01);
  EXPECT_TRUE(tab.bounded);
}

TEST(Residual, FixtureIdentityProbe) {
  const auto f = testing::fixture();
  std::vector<double> u;
  for (double t = -2.0; t <= 2.0; t += 0.5) u.push_back(t);
  const auto tab = perturbation_residual(f.switching, f.model, smooth_probes::identity(), u, kEps);
  EXPECT_LE(tab.max_closed_form_gap, 1e-10);
  EXPECT_LE(tab.ratio, 1.01);
  EXPECT_TRUE(tab.bounded);
  EXPECT_GT(tab.K, 0.0);
}

TEST(Residual, GeneralProbeRatioBelowTwo) {
  const auto f = testing::fixture();
  const std::vector<double> u{-2.0, -1.0, 0.0, 1.0, 2.0};
  for (const char* name : {"square", "sine"}) {
    const auto tab = perturbation_residual(f.switching, f.model, smooth_probes::by_name(name), u, kEps);
    EXPECT_LE(tab.ratio, 2.0) << name;
    EXPECT_LE(tab.max_closed_form_gap, 1e-10) << name;
  }
}

TEST(Residual, UnknownProbeRejected) { EXPECT_THROW(smooth_probes::by_name("cube"), ValidationError); }

}  // namespace
}  // namespace mmjump
