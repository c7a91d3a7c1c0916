#include "wsigma/fixtures.hpp"
#include "wsigma/geometry.hpp"
#include "wsigma/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace wsigma;

namespace {

constexpr double kPi = std::numbers::pi;

Vec chart(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

double max_principal_error(const GeometryField& g, double expected) {
  double worst = 0.0;
  for (const auto& p : g.points()) worst = std::max(worst, (p.principal.array() - expected).abs().maxCoeff());
  return worst;
}

}  // namespace

TEST(Quadrature, GaussLegendreIntegratesPolynomialsExactly) {
  for (int n : {1, 2, 5, 8, 16}) {
    const auto q = gauss_legendre(n);
    ASSERT_EQ(q.nodes.size(), static_cast<std::size_t>(n));
    for (std::size_t i = 1; i < q.nodes.size(); ++i) EXPECT_LT(q.nodes[i - 1], q.nodes[i]);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0.0;
      for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      EXPECT_NEAR(s, exact, 1e-14) << "n=" << n << " degree " << d;
    }
  }
}

TEST(Ambient, SpaceFormCheck) {
  EXPECT_NO_THROW(AmbientSpace::euclidean(2).require_space_form());
  EXPECT_NO_THROW(AmbientSpace::unit_sphere(3).require_space_form());
  EXPECT_THROW((AmbientSpace{AmbientKind::Euclidean, 2, 1.0}.require_space_form()), UnsupportedAmbient);
  EXPECT_THROW((AmbientSpace{AmbientKind::UnitSphere, 2, 0.5}.require_space_form()), UnsupportedAmbient);
  EXPECT_EQ(AmbientSpace::unit_sphere(2).embedding_dim(), 4);
}

TEST(Geometry, UnitSphereAreaAndCurvatures) {
  const auto g = build_geometry(euclidean_sphere(1.0), GridSpec::uniform(2, 16));
  EXPECT_NEAR(area(g), 4.0 * kPi, 1e-8);
  EXPECT_LT(max_principal_error(g, 1.0), 1e-8);
}

TEST(Geometry, SphereOfRadiusTwo) {
  const auto g = build_geometry(euclidean_sphere(2.0), GridSpec::uniform(2, 12));
  EXPECT_NEAR(area(g), 16.0 * kPi, 1e-8);
  EXPECT_LT(max_principal_error(g, 0.5), 1e-10);
}

TEST(Geometry, TorusAreaAndOuterEquator) {
  const auto g = build_geometry(torus(2.0, 1.0), GridSpec::uniform(2, 16));
  EXPECT_NEAR(area(g), 8.0 * kPi * kPi, 1e-8);
  const auto p = geometry_at(torus(2.0, 1.0), chart(0.7, 0.0));
  EXPECT_NEAR(p.principal(0), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(p.principal(1), 1.0, 1e-12);
}

TEST(Geometry, EllipsoidAreaConverges) {
  // prolate spheroid: closed-form area
  const double a = 1.0, c = 2.0;
  const double e = std::sqrt(1.0 - a * a / (c * c));
  const double exact = 2.0 * kPi * a * a * (1.0 + c / (a * e) * std::asin(e));
  const auto g = build_geometry(ellipsoid(a, a, c), GridSpec::uniform(2, 32));
  EXPECT_NEAR(area(g), exact, 1e-9 * exact);
}

TEST(Geometry, FlatGraphHasZeroCurvature) {
  GraphParams prm;
  prm.n = 2;
  prm.slope = {0.3, -0.2};
  const auto g = build_geometry(periodic_graph(prm), GridSpec::uniform(2, 8));
  EXPECT_LT(max_principal_error(g, 0.0), 1e-14);
  EXPECT_NEAR(area(g), 4.0 * kPi * kPi * std::sqrt(1.0 + 0.09 + 0.04), 1e-10);
}

TEST(Geometry, CliffordTorus) {
  const double a = std::sqrt(0.5);
  const auto g = build_geometry(clifford_torus(a), GridSpec::uniform(2, 8));
  EXPECT_NEAR(area(g), 2.0 * kPi * kPi, 1e-10);  // (2πa)(2πb) with a = b = 1/√2
  for (const auto& p : g.points()) {
    EXPECT_NEAR(p.principal(0), -1.0, 1e-12);
    EXPECT_NEAR(p.principal(1), 1.0, 1e-12);
  }
  const auto q = geometry_at(clifford_torus(0.6), chart(0.4, 1.1));
  EXPECT_NEAR(q.principal(0), -0.8 / 0.6, 1e-12);
  EXPECT_NEAR(q.principal(1), 0.6 / 0.8, 1e-12);
}

TEST(Geometry, GeodesicSphere) {
  const double rho = 0.8;
  const auto g = build_geometry(geodesic_sphere(rho), GridSpec::uniform(2, 12));
  EXPECT_NEAR(area(g), 4.0 * kPi * std::pow(std::sin(rho), 2), 1e-10);
  EXPECT_LT(max_principal_error(g, 1.0 / std::tan(rho)), 1e-12);
}

TEST(Geometry, FrameInvariants) {
  for (const auto& imm : {torus(2.0, 1.0), ellipsoid(1.0, 1.5, 0.7), clifford_torus(0.6), geodesic_sphere(1.2)}) {
    const auto p = geometry_at(imm, chart(0.9, 2.3));
    EXPECT_NEAR(p.normal.norm(), 1.0, 1e-14) << imm.name();
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(p.normal.dot(p.jet.d1.col(i)), 0.0, 1e-13) << imm.name();
    if (imm.ambient().is_sphere()) EXPECT_NEAR(p.normal.dot(p.jet.value), 0.0, 1e-14);
    // frame^T g frame = I and the shape operator is self-adjoint
    EXPECT_LT((p.frame.transpose() * p.metric * p.frame - Mat::Identity(2, 2)).norm(), 1e-12);
    EXPECT_LT((p.shape_orthonormal - p.shape_orthonormal.transpose()).norm(), 1e-13);
    EXPECT_LT((p.metric * p.metric_inv - Mat::Identity(2, 2)).norm(), 1e-12);
  }
}

TEST(Geometry, OrientationFlipNegatesCurvatures) {
  const auto imm = ellipsoid(1.0, 2.0, 3.0);
  const auto p = geometry_at(imm, chart(1.0, 0.5));
  const auto q = geometry_at(imm.flipped(), chart(1.0, 0.5));
  EXPECT_LT((p.normal + q.normal).norm(), 1e-14);
  EXPECT_NEAR(p.principal(0), -q.principal(1), 1e-13);
  EXPECT_NEAR(p.principal(1), -q.principal(0), 1e-13);
  EXPECT_GT(p.principal(0), 0.0);  // inward default: convex surfaces have positive curvatures
}

TEST(Geometry, ChristoffelSymbolsOfSphereChart) {
  // Round sphere (θ, φ): Γ^θ_φφ = −sinθ cosθ, Γ^φ_θφ = cotθ.
  const double th = 0.7;
  const auto p = geometry_at(euclidean_sphere(1.0), chart(th, 0.3));
  EXPECT_NEAR(p.christoffel[0](1, 1), -std::sin(th) * std::cos(th), 1e-13);
  EXPECT_NEAR(p.christoffel[1](0, 1), 1.0 / std::tan(th), 1e-13);
  EXPECT_NEAR(p.christoffel[0](0, 0), 0.0, 1e-13);
}

TEST(Geometry, DegenerateFrameIsReported) {
  JetEvaluator collapsed = [](const Vec& x, int order) {
    Jet j(3, 2, order);
    j.value << x(0), x(0), 0.0;
    j.d1.col(0) << 1.0, 1.0, 0.0;  // second tangent vanishes
    return j;
  };
  ParametricImmersion imm("degenerate", AmbientSpace::euclidean(2),
                          {{0.0, 1.0, AxisRule::Periodic}, {0.0, 1.0, AxisRule::Periodic}}, collapsed, 1.0, 1);
  EXPECT_THROW(geometry_at(imm, chart(0.3, 0.2)), DegenerateFrame);
}

TEST(Geometry, AmbientViolationIsReported) {
  JetEvaluator off = [](const Vec& x, int order) {
    Jet j(4, 2, order);
    j.value << std::cos(x(0)), std::sin(x(0)), 0.0, 0.1;  // |ψ| = √1.01
    j.d1.col(0) << -std::sin(x(0)), std::cos(x(0)), 0.0, 0.0;
    j.d1.col(1) << 0.0, 0.0, 1.0, 0.0;
    return j;
  };
  ParametricImmersion imm("off-sphere", AmbientSpace::unit_sphere(2),
                          {{0.0, 1.0, AxisRule::Periodic}, {0.0, 1.0, AxisRule::Periodic}}, off, 1.0, 1);
  EXPECT_THROW(geometry_at(imm, chart(0.3, 0.2)), AmbientViolation);
}

TEST(Geometry, GridRequiresEightNodes) {
  EXPECT_THROW(build_geometry(torus(2.0, 1.0), GridSpec::uniform(2, 7)), std::invalid_argument);
}

TEST(Geometry, PhaseShiftedGridIntegratesTheSame) {
  const auto imm = torus(2.0, 1.0);
  const auto a = build_geometry(imm, GridSpec::uniform(2, 16));
  const auto b = build_geometry(imm, GridSpec{{16, 16}, {0.37, 0.61}});
  auto mean_curv = [](const GeometryPoint& p) { return p.principal.sum(); };
  EXPECT_NEAR(integrate(a, mean_curv), integrate(b, mean_curv), 1e-9);
  EXPECT_NEAR(a[0].chart(1) + 0.61 * a.spacing(1), b[0].chart(1), 1e-14);
}

TEST(Geometry, IntegrationIsDeterministic) {
  const auto imm = ellipsoid(1.0, 1.3, 0.8);
  set_thread_count(1);
  const double one = area(build_geometry(imm, GridSpec::uniform(2, 20)));
  set_thread_count(4);
  const double four = area(build_geometry(imm, GridSpec::uniform(2, 20)));
  set_thread_count(1);
  EXPECT_EQ(one, four);
}

TEST(Fixtures, RegistryParsesNamesAndParameters) {
  EXPECT_EQ(make_fixture("sphere R=2").diameter(), 4.0);
  const auto t = make_fixture("torus a=3 b=0.5");
  EXPECT_NEAR(area(build_geometry(t, GridSpec::uniform(2, 12))), 4.0 * kPi * kPi * 1.5, 1e-9);
  EXPECT_TRUE(make_fixture("clifford_torus a=0.6").ambient().is_sphere());
  EXPECT_TRUE(make_fixture("great_sphere").ambient().is_sphere());
  EXPECT_EQ(make_fixture("graph n=2 amp=0.3").dim(), 2);
  for (const auto& info : fixture_catalog()) EXPECT_NO_THROW(make_fixture(info.name)) << info.name;
}

TEST(Fixtures, RegistryRejectsBadInput) {
  EXPECT_THROW(make_fixture("cube"), FixtureError);
  EXPECT_THROW(make_fixture("sphere radius=2"), FixtureError);
  EXPECT_THROW(make_fixture("sphere R=abc"), FixtureError);
  EXPECT_THROW(make_fixture("sphere R"), FixtureError);
  EXPECT_THROW(make_fixture("torus a=1 b=2"), FixtureError);  // self-intersecting
  EXPECT_THROW(make_fixture("clifford_torus a=1"), FixtureError);
}

TEST(Fixtures, RadialGraphOfConstantProfileIsRoundSphere) {
  const auto g = build_geometry(radial_graph(RadialProfile::constant(1.5, 2), AmbientKind::Euclidean),
                                GridSpec::uniform(2, 12));
  EXPECT_NEAR(area(g), 4.0 * kPi * 2.25, 1e-10);
  EXPECT_LT(max_principal_error(g, 1.0 / 1.5), 1e-12);
  const auto s = build_geometry(radial_graph(RadialProfile::constant(0.8), AmbientKind::UnitSphere),
                                GridSpec::uniform(2, 12));
  EXPECT_LT(max_principal_error(s, 1.0 / std::tan(0.8)), 1e-12);
}
