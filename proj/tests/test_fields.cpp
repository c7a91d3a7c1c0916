#include "wsigma/fields.hpp"
#include "wsigma/fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace wsigma;

namespace {

Vec chart(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

std::vector<double> default_steps(const ParametricImmersion& imm, const Vec& x) {
  return fd_steps(imm, x, DiffOptions{}, nullptr);
}

}  // namespace

TEST(Hessian, ConstantFieldHasZeroHessian) {
  const auto imm = ellipsoid(1.0, 1.4, 0.8);
  const auto g = build_geometry(imm, GridSpec::uniform(2, 10));
  const auto hess = covariant_hessian(g, [](const Vec&) { return 3.0; });
  for (const auto& h : hess) EXPECT_LT(h.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Hessian, FlatGraphSine) {
  GraphParams prm;
  prm.n = 2;
  const auto imm = periodic_graph(prm);
  const auto p = geometry_at(imm, chart(0.8, 1.7));
  const auto h = covariant_hessian_at([](const Vec& x) { return std::sin(x(0)); }, p, default_steps(imm, p.chart));
  EXPECT_NEAR(h(0, 0), -std::sin(0.8), 1e-9);
  EXPECT_NEAR(h(0, 1), 0.0, 1e-9);
  EXPECT_NEAR(h(1, 1), 0.0, 1e-9);
}

TEST(Hessian, HeightOnUnitSphere) {
  // Restrictions of linear functions to the unit sphere satisfy f_{,ij} = -f g_ij.
  const auto imm = euclidean_sphere(1.0);
  for (const auto& x : {chart(0.6, 0.2), chart(1.3, 4.0), chart(2.5, 5.9)}) {
    const auto p = geometry_at(imm, x);
    ScalarField height = [&](const Vec& y) { return imm.position(y)(2) + 0.5 * imm.position(y)(0); };
    const auto h = covariant_hessian_at(height, p, default_steps(imm, x));
    const double f = height(x);
    EXPECT_LT((h + f * p.metric).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Hessian, HeightOnGeodesicSphereInS3) {
  // For f = <psi, e4> on a geodesic sphere about e4: f is constant cos(rho).
  const auto imm = geodesic_sphere(0.9);
  const auto g = build_geometry(imm, GridSpec::uniform(2, 10));
  const auto hess = covariant_hessian(g, [&](const Vec& y) { return imm.position(y)(3); });
  for (const auto& h : hess) EXPECT_LT(h.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Codazzi, VanishesOnUmbilicAndParallelFixtures) {
  for (const auto& imm : {euclidean_sphere(1.3), clifford_torus(std::sqrt(0.5)), clifford_torus(0.6), geodesic_sphere(0.7)}) {
    const auto g = build_geometry(imm, GridSpec::uniform(2, 12));
    EXPECT_LT(codazzi_residual(covariant_derivative_A_exact(g)), 1e-12) << imm.name();
    EXPECT_LT(codazzi_residual(covariant_derivative_A(g)), 1e-8) << imm.name();
  }
  // Clifford tori have parallel second fundamental form: the whole tensor vanishes.
  const auto c = build_geometry(clifford_torus(0.6), GridSpec::uniform(2, 8));
  for (const auto& d : covariant_derivative_A_exact(c))
    for (const auto& m : d) EXPECT_LT(m.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Codazzi, HoldsOnGenericFixtures) {
  GraphParams prm;
  prm.n = 2;
  prm.amp = {0.3, 0.2};
  prm.mix = 0.1;
  for (const auto& imm : {torus(2.0, 1.0), ellipsoid(1.0, 1.4, 0.8), periodic_graph(prm)}) {
    const auto g = build_geometry(imm, GridSpec::uniform(2, 16));
    EXPECT_LT(codazzi_residual(covariant_derivative_A_exact(g)), 1e-11) << imm.name();
    EXPECT_LT(codazzi_residual(covariant_derivative_A(g)), 1e-7) << imm.name();
  }
}

TEST(Codazzi, ExactAndDifferencedRoutesAgree) {
  const auto imm = ellipsoid(1.0, 1.4, 0.8);
  const auto p = geometry_at(imm, chart(1.1, 0.4), 3);
  const auto exact = covariant_derivative_A_exact_at(p);
  const auto fd = covariant_derivative_A_at(imm, p, default_steps(imm, p.chart));
  for (std::size_t k = 0; k < exact.size(); ++k) EXPECT_LT((exact[k] - fd[k]).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Codazzi, ConvergesUnderRefinement) {
  const auto imm = torus(2.0, 1.0);
  double prev = 0.0;
  for (int n : {8, 16, 32}) {
    const auto g = build_geometry(imm, GridSpec::uniform(2, n));
    const double res = codazzi_residual(covariant_derivative_A(g, DiffOptions::grid_tied(0.5)));
    if (prev > 0.0) EXPECT_GE(prev / res, 4.0) << "n=" << n;  // at least second order
    prev = res;
  }
}

TEST(PositionIdentity, HoldsInBothSpaceForms) {
  GraphParams prm;
  prm.n = 2;
  prm.amp = {0.3, 0.2};
  for (const auto& imm :
       {geodesic_sphere(0.7), clifford_torus(0.6), torus(2.0, 1.0), ellipsoid(1.0, 1.2, 0.8), periodic_graph(prm)}) {
    EXPECT_LT(position_identity_residual(build_geometry(imm, GridSpec::uniform(2, 12))), 1e-8) << imm.name();
  }
}

TEST(PositionIdentity, SphereClosedForm) {
  const auto p = geometry_at(euclidean_sphere(2.0), chart(0.9, 0.3));
  const auto lhs = position_second_covariant_at(p);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Vec expected = p.metric(i, j) / 2.0 * p.normal;
      EXPECT_LT((lhs[static_cast<std::size_t>(i * 2 + j)] - expected).norm(), 1e-12);
    }
}

TEST(Divergence, LaplacianOfHeightOnSphere) {
  // div grad z = -2 z on the unit sphere.
  const auto imm = euclidean_sphere(1.0);
  const auto x = chart(1.0, 0.7);
  const auto p = geometry_at(imm, x);
  const auto h = default_steps(imm, x);
  auto grad = [&](const Vec& y) -> Vec {
    const auto q = geometry_at(imm, y);
    return q.metric_inv * chart_gradient([&](const Vec& z) { return imm.position(z)(2); }, q, h);
  };
  const double div = covariant_divergence_vector_at(grad, p, h);
  EXPECT_NEAR(div, -2.0 * std::cos(1.0), 1e-6);
}

TEST(Divergence, MetricInverseIsDivergenceFree) {
  const auto imm = torus(2.0, 1.0);
  const auto x = chart(0.4, 2.0);
  const auto p = geometry_at(imm, x);
  const auto div = covariant_divergence_tensor_at([&](const Vec& y) -> Mat { return geometry_at(imm, y).metric_inv; },
                                                  p, default_steps(imm, x));
  EXPECT_LT(div.norm(), 1e-8);
}

TEST(Steps, PolarStepsStayInsideChart) {
  const auto imm = euclidean_sphere(1.0);
  const auto h = default_steps(imm, chart(1e-3, 0.0));
  EXPECT_LT(2.0 * h[0], 1e-3);
  EXPECT_GT(h[0], 0.0);
}
