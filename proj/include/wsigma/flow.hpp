#pragma once

// Flows toward critical points of F = integral of s_r: an ODE for the radius
// of round spheres, and explicit normal steps for radial graphs over S^2.

#include "wsigma/core.hpp"
#include "wsigma/fixtures.hpp"
#include "wsigma/geometry.hpp"
#include "wsigma/minimality.hpp"
#include "wsigma/variation.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace wsigma {

struct FlowTrace {
  std::vector<double> time;
  std::vector<double> radius;      // radius, or profile mean radius for graphs
  std::vector<double> functional;  // F
  std::vector<double> residual;    // |E| (sphere) or L2 norm of E (graph)
  /// +1: F is driven down (descent). -1: the flow follows +grad F, which is
  /// what makes a critical radius that is a maximum of F attracting.
  int direction = 1;
  std::optional<double> target;  // critical radius when one exists
  bool converged = false;
  std::string status;  // "converged", "collapsed", "diverged", "stopped"
  int rejected_steps = 0;

  std::size_t size() const { return time.size(); }
};

// ---------------------------------------------------------------------------
// Round spheres
// ---------------------------------------------------------------------------

/// Area of the unit n-sphere.
inline double unit_sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

/// F on the round sphere of radius R in E^{n+1}.
inline double round_sphere_functional(int n, int r, double mu0, double R) {
  return sigma_weighted_closed({mu0, std::vector<double>(static_cast<std::size_t>(n), 1.0 / R)}, r) *
         unit_sphere_area(n) * std::pow(R, n);
}

struct RadialFlowOptions {
  double convergence_tol = 1e-6;
  int max_halvings = 40;
  double collapse_fraction = 1e-3;  // R below this fraction of R_init: collapsed
  double divergence_factor = 1e6;   // R above this multiple: diverged
};

/// dR/dt = -s E(R), E the Euclidean residual of the radius-R sphere and
/// s = sign(E'(R*)) when a critical radius R* exists (s = +1 otherwise), so
/// that R* attracts from both sides. Since dF/dR = E * Area, F changes
/// monotonically in the direction s; steps violating that (or leaving
/// R > 0) are rejected and retried with half the step.
inline FlowTrace radial_sphere_flow(int n, int r, double mu0, double R_init, double t_end, double dt,
                                    const RadialFlowOptions& opt = {}) {
  if (!(R_init > 0.0) || !(dt > 0.0) || !(t_end >= 0.0))
    throw std::invalid_argument("radial_sphere_flow: need R_init > 0, dt > 0, t_end >= 0");
  FlowTrace trace;
  trace.target = critical_sphere_radius(n, r, mu0);
  auto E = [&](double R) { return round_sphere_residual(n, r, mu0, R); };
  if (trace.target) {
    const double Rs = *trace.target;
    const double h = 1e-6 * Rs;
    const double slope = (E(Rs + h) - E(Rs - h)) / (2.0 * h);
    trace.direction = slope >= 0.0 ? 1 : -1;
  }
  const double s = trace.direction;
  auto rhs = [&](double R) { return -s * E(R); };
  auto F = [&](double R) { return round_sphere_functional(n, r, mu0, R); };

  double t = 0.0;
  double R = R_init;
  auto record = [&] {
    trace.time.push_back(t);
    trace.radius.push_back(R);
    trace.functional.push_back(F(R));
    trace.residual.push_back(std::abs(E(R)));
  };
  record();
  trace.status = "stopped";
  double step = dt;
  while (t < t_end - 1e-12 * t_end) {
    if (R < opt.collapse_fraction * R_init) {
      trace.status = "collapsed";
      break;
    }
    if (R > opt.divergence_factor * R_init) {
      trace.status = "diverged";
      break;
    }
    double h = std::min(step, t_end - t);
    int halvings = 0;
    for (;;) {
      const double k1 = rhs(R);
      const double k2 = rhs(R + 0.5 * h * k1);
      const double k3 = rhs(R + 0.5 * h * k2);
      const double k4 = rhs(R + h * k3);
      const double Rn = R + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double Fo = F(R);
      const bool ok = std::isfinite(Rn) && Rn > 0.0 && s * (F(Rn) - Fo) <= 1e-9 * std::abs(Fo) &&
                      std::isfinite(k1 + k2 + k3 + k4);
      if (ok) {
        R = Rn;
        t += h;
        break;
      }
      ++trace.rejected_steps;
      if (++halvings > opt.max_halvings)
        throw StepUnderflow("radial_sphere_flow: step halved " + std::to_string(opt.max_halvings) + " times at t=" +
                            std::to_string(t) + ", R=" + std::to_string(R));
      h *= 0.5;
    }
    step = halvings > 0 ? h : std::min(dt, 2.0 * step);
    record();
  }
  if (trace.target && std::abs(R - *trace.target) <= opt.convergence_tol) {
    trace.converged = true;
    trace.status = "converged";
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Radial graphs
// ---------------------------------------------------------------------------

struct NormalFlowOptions {
  int r = 1;
  double mu0 = 0.0;
  EulerLagrangeForm form = EulerLagrangeForm::FirstVariation;  // sphere ambient only
  GridSpec grid = GridSpec{{16, 32}, {}};
  int max_halvings = 40;
  /// Largest accepted profile change per step, as a fraction of the local
  /// profile value (sphere: of the distance to the nearer pole of the
  /// radial chart). Keeps a descending but badly resolved step from jumping
  /// to an unrelated surface.
  double max_relative_change = 0.1;
};

/// Euler-Lagrange residual E with dF/dt = -integral of lambda E dV for
/// inward normal speed lambda and constant mu0.
inline double euler_lagrange_value(const GeometryPoint& p, const AmbientSpace& amb, const NormalFlowOptions& opt) {
  const auto s = p.spectrum(opt.mu0);
  return amb.is_sphere() ? sphere_residual_value(s, opt.r, opt.form) : euclidean_residual_value(s, opt.r);
}

/// Unit vector of increasing profile value at a node: omega (Euclidean) or
/// (cos rho omega, -sin rho) (sphere).
inline Vec profile_direction(const GeometryPoint& p, const RadialProfile& profile, AmbientKind kind) {
  const Vec w = unit_direction(p.chart);
  if (kind == AmbientKind::Euclidean) return w;
  const double rho = profile(w);
  Vec d(4);
  d.head(3) = std::cos(rho) * w;
  d(3) = -std::sin(rho);
  return d;
}

struct NormalFlowStep {
  RadialProfile profile;
  double dt = 0.0;           // step actually taken
  double F_before = 0.0;
  double F_after = 0.0;
  double dissipation = 0.0;  // integral of E^2 dV before the step
  double residual_l2 = 0.0;
  int halvings = 0;
};

namespace detail {

struct FlowSample {
  GeometryField geom;
  double F = 0.0;
  std::vector<double> E;
  std::vector<double> normal_dot;  // <d, nu>, d the profile direction
};

inline FlowSample sample_flow(const RadialProfile& profile, AmbientKind kind, const NormalFlowOptions& opt) {
  FlowSample s{build_geometry(radial_graph(profile, kind), opt.grid), 0.0, {}, {}};
  const auto& geom = s.geom;
  s.E.resize(geom.size());
  s.normal_dot.resize(geom.size());
  parallel_for(geom.size(), [&](std::size_t i) {
    s.E[i] = euler_lagrange_value(geom[i], geom.ambient(), opt);
    s.normal_dot[i] = profile_direction(geom[i], profile, kind).dot(geom[i].normal);
  });
  s.F = functional_value(geom, WeightField::constant(opt.mu0), opt.r);
  return s;
}

/// Least-squares fit of node values onto the profile's monomials; the basis
/// is redundant on S^2, so the minimum-norm solution is taken.
inline std::vector<double> fit_profile(const GeometryField& geom, const RadialProfile& basis,
                                       const std::vector<double>& values, const std::vector<double>& weights) {
  const auto m = static_cast<Eigen::Index>(geom.size());
  const auto k = static_cast<Eigen::Index>(basis.size());
  Mat a(m, k);
  Vec b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sw = std::sqrt(weights[static_cast<std::size_t>(i)]);
    const Vec w = unit_direction(geom[static_cast<std::size_t>(i)].chart);
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) = sw * basis.monomial(static_cast<std::size_t>(j), w);
    b(i) = sw * values[static_cast<std::size_t>(i)];
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(a);
  cod.setThreshold(1e-12);
  const Vec c = cod.solve(b);
  return std::vector<double>(c.data(), c.data() + c.size());
}

}  // namespace detail

/// One explicit step: inward normal speed lambda = E, realized as a change
/// of the profile delta = -dt E / |<d, nu>| fitted onto the profile basis.
/// The step is halved until F does not increase (beyond 1e-9 |F|) and the
/// profile moves by at most max_relative_change.
inline NormalFlowStep normal_flow_step(const RadialProfile& profile, AmbientKind kind, double dt,
                                       const NormalFlowOptions& opt = {}) {
  const auto cur = detail::sample_flow(profile, kind, opt);
  const auto& geom = cur.geom;
  std::vector<double> speed(geom.size()), weights(geom.size()), sq(geom.size());
  for (std::size_t i = 0; i < geom.size(); ++i) {
    const double nd = std::abs(cur.normal_dot[i]);
    if (!(nd > 1e-8)) throw DegenerateFrame("radial graph is no longer transverse to the radial direction");
    speed[i] = -cur.E[i] / nd;
    weights[i] = geom.chart_weight(i) * geom[i].sqrt_det * nd;
    sq[i] = cur.E[i] * cur.E[i];
  }
  const auto delta = detail::fit_profile(geom, profile, speed, weights);
  // The largest step the displacement limit allows.
  double h_cap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < geom.size(); ++i) {
    const Vec w = unit_direction(geom[i].chart);
    double change = 0.0;
    for (std::size_t j = 0; j < delta.size(); ++j) change += delta[j] * profile.monomial(j, w);
    const double rho = profile(w);
    const double room = kind == AmbientKind::Euclidean ? rho : std::min(rho, std::numbers::pi - rho);
    if (std::abs(change) > 0.0) h_cap = std::min(h_cap, opt.max_relative_change * room / std::abs(change));
  }

  NormalFlowStep out;
  out.F_before = cur.F;
  out.dissipation = integrate(geom, std::span<const double>(sq));
  out.residual_l2 = std::sqrt(out.dissipation);
  double h = dt;
  for (int k = 0;; ++k) {
    RadialProfile next = profile;
    for (std::size_t j = 0; j < next.size(); ++j) next.coeffs[j] += h * delta[j];
    const bool small = h <= h_cap;
    const double F_next = small ? functional_value(radial_graph(next, kind), opt.grid, WeightField::constant(opt.mu0), opt.r)
                                : std::numeric_limits<double>::quiet_NaN();
    if (small && std::isfinite(F_next) && F_next <= cur.F + 1e-9 * std::abs(cur.F)) {
      out.profile = std::move(next);
      out.dt = h;
      out.F_after = F_next;
      out.halvings = k;
      return out;
    }
    if (k >= opt.max_halvings)
      throw StepUnderflow("normal_flow_step: no descent after " + std::to_string(opt.max_halvings) + " halvings");
    h *= 0.5;
  }
}

/// Repeated normal steps; `radius` records the profile's mean value over
/// the grid directions (area-weighted on S^2).
inline FlowTrace normal_flow(RadialProfile profile, AmbientKind kind, double dt, int steps,
                             const NormalFlowOptions& opt = {}) {
  FlowTrace trace;
  trace.status = "stopped";
  double t = 0.0;
  auto mean_radius = [&](const RadialProfile& p) {
    const auto geom = build_geometry(euclidean_sphere(1.0), opt.grid);
    return integrate(geom, [&](const GeometryPoint& q) { return p(unit_direction(q.chart)); }) / (4.0 * std::numbers::pi);
  };
  for (int k = 0; k < steps; ++k) {
    NormalFlowStep st;
    try {
      st = normal_flow_step(profile, kind, dt, opt);
    } catch (const DegenerateFrame&) {
      trace.status = "collapsed";
      return trace;
    } catch (const StepUnderflow&) {
      trace.status = "stalled";
      return trace;
    }
    if (k == 0) {
      trace.time.push_back(t);
      trace.radius.push_back(mean_radius(profile));
      trace.functional.push_back(st.F_before);
      trace.residual.push_back(st.residual_l2);
    } else {
      trace.residual.back() = st.residual_l2;
    }
    trace.rejected_steps += st.halvings;
    t += st.dt;
    profile = st.profile;
    trace.time.push_back(t);
    trace.radius.push_back(mean_radius(profile));
    trace.functional.push_back(st.F_after);
    trace.residual.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  return trace;
}

}  // namespace wsigma
