#include "wsigma/flow.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace wsigma;

namespace {

RadialProfile perturbed_sphere(double R) {
  auto p = RadialProfile::of_degree(4);
  p.coeffs[static_cast<std::size_t>(p.find(0, 0, 0))] = R;
  p.coeffs[static_cast<std::size_t>(p.find(0, 0, 2))] = 0.05 * R;
  p.coeffs[static_cast<std::size_t>(p.find(1, 1, 0))] = 0.03 * R;
  return p;
}

NormalFlowOptions options(int r, double mu0) {
  NormalFlowOptions o;
  o.r = r;
  o.mu0 = mu0;
  return o;
}

}  // namespace

TEST(RadialFlow, ConvergesFromBothSides) {
  for (double R0 : {0.5, 2.0}) {
    const auto t = radial_sphere_flow(2, 1, -1.0, R0, 10.0, 0.01);
    EXPECT_TRUE(t.converged) << R0;
    EXPECT_NEAR(t.radius.back(), 1.0, 1e-6) << R0;
    for (std::size_t k = 1; k < t.size(); ++k) {
      // monotone approach, and F monotone in the trace direction
      EXPECT_LE(std::abs(t.radius[k] - 1.0), std::abs(t.radius[k - 1] - 1.0) + 1e-15);
      EXPECT_LE(t.direction * (t.functional[k] - t.functional[k - 1]), 1e-9 * std::abs(t.functional[k - 1]));
    }
  }
}

TEST(RadialFlow, StationaryAtCriticalRadius) {
  const auto t = radial_sphere_flow(2, 1, -1.0, 1.0, 1.0, 0.05);
  for (double R : t.radius) EXPECT_NEAR(R, 1.0, 1e-12);
  EXPECT_TRUE(t.converged);
}

TEST(RadialFlow, CollapseWithoutCriticalRadius) {
  const auto t = radial_sphere_flow(2, 1, 0.0, 1.0, 10.0, 0.01);
  EXPECT_FALSE(t.converged);
  EXPECT_EQ(t.status, "collapsed");
  for (std::size_t k = 1; k < t.size(); ++k) EXPECT_LT(t.radius[k], t.radius[k - 1]);
}

TEST(RadialFlow, HigherOrder) {
  const auto t = radial_sphere_flow(3, 2, -1.0, 1.5, 30.0, 0.01);
  ASSERT_TRUE(t.target.has_value());
  EXPECT_TRUE(t.converged);
  EXPECT_NEAR(t.radius.back(), *t.target, 1e-6);
}

TEST(RadialFlow, RejectsBadInput) {
  EXPECT_THROW(radial_sphere_flow(2, 1, -1.0, -1.0, 1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(radial_sphere_flow(2, 1, -1.0, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(RadialFlow, StepUnderflow) {
  RadialFlowOptions opt;
  opt.max_halvings = 0;
  opt.collapse_fraction = 0.0;
  EXPECT_THROW(radial_sphere_flow(2, 1, 0.0, 1.0, 10.0, 1.0, opt), StepUnderflow);
}

TEST(NormalFlow, RoundSphereAtCriticalRadiusIsStationary) {
  const auto st = normal_flow_step(RadialProfile::constant(1.0, 2), AmbientKind::Euclidean, 0.01, options(1, -1.0));
  for (std::size_t j = 0; j < st.profile.size(); ++j)
    EXPECT_NEAR(st.profile.coeffs[j], RadialProfile::constant(1.0, 2).coeffs[j], 1e-9);
}

TEST(NormalFlow, PerturbedSphereDescends) {
  for (auto kind : {AmbientKind::Euclidean, AmbientKind::UnitSphere}) {
    const double R = kind == AmbientKind::Euclidean ? 1.0 : 0.9;
    auto profile = perturbed_sphere(R);
    const auto opt = options(1, -1.0);
    for (int k = 0; k < 10; ++k) {
      const auto st = normal_flow_step(profile, kind, 0.01, opt);
      EXPECT_LT(st.F_after, st.F_before) << to_string(kind) << " step " << k;
      const double rate = (st.F_after - st.F_before) / st.dt;
      EXPECT_NEAR(rate / -st.dissipation, 1.0, 0.2) << to_string(kind) << " step " << k;
      profile = st.profile;
    }
  }
}

TEST(NormalFlow, TraceIsMonotone) {
  const auto t = normal_flow(perturbed_sphere(1.0), AmbientKind::Euclidean, 0.01, 10,
                             options(2, 0.5));
  ASSERT_EQ(t.size(), 11u);
  for (std::size_t k = 1; k < t.size(); ++k) EXPECT_LE(t.functional[k], t.functional[k - 1]);
}

TEST(NormalFlow, FunctionalIsReparametrizationInvariant) {
  const auto imm = radial_graph(perturbed_sphere(1.0), AmbientKind::Euclidean);
  const auto w = WeightField::constant(-1.0);
  const double a = functional_value(imm, GridSpec{{16, 32}, {}}, w, 1);
  const double b = functional_value(imm, GridSpec{{16, 32}, {0.0, 0.43}}, w, 1);
  EXPECT_NEAR(a, b, 1e-9 * std::abs(a));
}

// Near the concave round minimum in S^3 the r = 1 flow is backward
// parabolic; steps must shrink rather than jump to an unrelated surface.
TEST(NormalFlow, DisplacementLimitHoldsInIllPosedRegime) {
  auto profile = perturbed_sphere(2.3);
  const auto opt = options(1, 0.5);
  for (int k = 0; k < 12; ++k) {
    const auto st = normal_flow_step(profile, AmbientKind::UnitSphere, 0.05, opt);
    EXPECT_LE(st.F_after, st.F_before);
    for (double th : {0.3, 1.2, 2.0, 2.9})
      for (double ph : {0.0, 1.7, 4.0}) {
        Vec w(3);
        w << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
        const double before = profile(w);
        const double room = std::min(before, std::numbers::pi - before);
        EXPECT_LE(std::abs(st.profile(w) - before), 0.1 * room * (1.0 + 1e-9)) << "step " << k;
      }
    profile = st.profile;
  }
}
