#pragma once

// The functional F = integral of s_r over M (s_r the weighted sigma), its
// analytic first variation in two routes (the closed space-form integrand
// and the general form with the ambient curvature tensor), and a
// finite-difference oracle that actually deforms the immersion.

#include "wsigma/core.hpp"
#include "wsigma/fields.hpp"
#include "wsigma/geometry.hpp"
#include "wsigma/immersion.hpp"
#include "wsigma/weighted_symfun.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace wsigma {

// ---------------------------------------------------------------------------
// Weight fields
// ---------------------------------------------------------------------------

enum class WeightMode { ConstantWeight, AmbientWeight };

/// How the weight mu0 is attached to the hypersurface: a constant, or the
/// pullback F(psi) of an ambient function (a modeling choice: mu0 then moves
/// with the points, d mu0/dt = dF(X)).
class WeightField {
 public:
  using AmbientFn = std::function<double(const Vec&)>;
  using AmbientGrad = std::function<Vec(const Vec&)>;

  static WeightField constant(double mu0) {
    WeightField w;
    w.mode_ = WeightMode::ConstantWeight;
    w.mu0_ = mu0;
    w.label_ = "constant " + std::to_string(mu0);
    return w;
  }

  /// Without an explicit gradient, 4th-order central differences are used.
  static WeightField ambient(AmbientFn f, AmbientGrad grad = {}, std::string label = "ambient function") {
    WeightField w;
    w.mode_ = WeightMode::AmbientWeight;
    w.f_ = std::move(f);
    w.grad_ = std::move(grad);
    w.label_ = std::move(label);
    return w;
  }

  WeightMode mode() const { return mode_; }
  bool is_constant() const { return mode_ == WeightMode::ConstantWeight; }
  double constant_value() const { return mu0_; }
  const std::string& label() const { return label_; }

  double value_at(const Vec& y) const { return is_constant() ? mu0_ : f_(y); }

  Vec gradient_at(const Vec& y) const {
    if (is_constant()) return Vec::Zero(y.size());
    if (grad_) return grad_(y);
    Vec g(y.size());
    const double h = 1e-3 * (1.0 + y.norm());
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      auto at = [&](double s) {
        Vec z = y;
        z(k) += s;
        return f_(z);
      };
      g(k) = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
    }
    return g;
  }

 private:
  WeightMode mode_ = WeightMode::ConstantWeight;
  double mu0_ = 0.0;
  AmbientFn f_;
  AmbientGrad grad_;
  std::string label_;
};

inline std::string to_string(WeightMode m) { return m == WeightMode::ConstantWeight ? "constant" : "ambient"; }

// ---------------------------------------------------------------------------
// Deformations
// ---------------------------------------------------------------------------

using TangentField = std::function<Vec(const Vec&)>;

/// X = lambda nu + tau^l psi_l. An empty tangential part means tau = 0.
struct VariationSpec {
  ScalarField normal_speed;
  TangentField tangential;
  WeightField weight = WeightField::constant(0.0);
  std::string label;

  double lambda(const Vec& x) const { return normal_speed ? normal_speed(x) : 0.0; }
  Vec tau(const Vec& x) const { return tangential ? tangential(x) : Vec::Zero(x.size()); }

  /// The deformation vector in the ambient at a geometry point.
  Vec deformation(const GeometryPoint& p) const {
    return lambda(p.chart) * p.normal + p.jet.d1 * tau(p.chart);
  }
};

struct FirstVariationTerms {
  double principal = 0.0;        // lambda(-(r+1) s_{r+1} + mu0 s_r)
  double hessian = 0.0;          // lambda_{,ij} T^{ij}
  double curvature = 0.0;        // ambient curvature coupling
  double weight_gradient = 0.0;  // -s_{r-1} tau^l mu0_{,l} (times lambda as printed)
  double weight_rate = 0.0;      // s * d mu0/dt

  double sum() const { return principal + hessian + curvature + weight_gradient + weight_rate; }
};

struct FirstVariationReport {
  std::string route;
  double analytic = 0.0;
  double fd = std::numeric_limits<double>::quiet_NaN();
  double abs_error = std::numeric_limits<double>::quiet_NaN();
  double rel_error = std::numeric_limits<double>::quiet_NaN();
  FirstVariationTerms terms;
  /// Curvature term with the ambient curvature tensor's middle arguments in
  /// the order (nu, psi_i, X, psi_m); only filled by the general route.
  double curvature_swapped_order = std::numeric_limits<double>::quiet_NaN();

  void attach_fd(double value) {
    fd = value;
    abs_error = std::abs(analytic - fd);
    rel_error = abs_error / std::max(std::abs(fd), std::numeric_limits<double>::min());
  }
};

/// Which Newton tensor / sigma multiplies the Hessian and weight-rate terms.
///  AsPrinted  - T_r and s_r, as in the closed integrand usually quoted
///  Consistent - T_{r-1} and s_{r-1}, i.e. d s_r / dA and d s_r / d mu0
/// They integrate to the same value for constant weights; only Consistent is
/// correct when mu0 varies.
enum class NewtonIndexing { AsPrinted, Consistent };

/// Direct: integrate lambda_{,ij} T^{ij}. ByParts: integrate
/// -lambda_{,j} (div T)^j instead (the divergence by finite differences).
enum class HessianTreatment { Direct, ByParts };

struct AnalyticOptions {
  NewtonIndexing indexing = NewtonIndexing::Consistent;
  HessianTreatment hessian = HessianTreatment::Direct;
  DiffOptions diff = {};
};

inline std::string to_string(NewtonIndexing i) { return i == NewtonIndexing::AsPrinted ? "as_printed" : "consistent"; }

/// The constant-curvature tensor R(X,Y,Z,W) = c(<X,Z><Y,W> - <X,W><Y,Z>).
inline double space_form_curvature(double c, const Vec& x, const Vec& y, const Vec& z, const Vec& w) {
  return c * (x.dot(z) * y.dot(w) - x.dot(w) * y.dot(z));
}

// ---------------------------------------------------------------------------
// Functional value
// ---------------------------------------------------------------------------

inline double functional_value(const GeometryField& geom, const WeightField& weight, int r) {
  return integrate(geom, [&](const GeometryPoint& p) {
    const double mu0 = weight.value_at(p.position());
    return sigma_weighted_closed(p.spectrum(mu0), r);
  });
}

inline double functional_value(const ParametricImmersion& imm, const GridSpec& grid, const WeightField& weight,
                               int r) {
  return functional_value(build_geometry(imm, grid), weight, r);
}

// ---------------------------------------------------------------------------
// Analytic first variation
// ---------------------------------------------------------------------------

namespace detail {

struct NodeTerms {
  FirstVariationTerms t;
  double curvature_swapped = 0.0;
};

enum class CurvatureRoute { ClosedTrace, CurvatureTensor };

inline NodeTerms variation_node(const GeometryField& geom, std::size_t node, const VariationSpec& var, int r,
                                const AnalyticOptions& opt, CurvatureRoute route) {
  const auto& imm = geom.immersion();
  const auto& p = geom[node];
  const int n = p.dim();
  const double c = geom.ambient().curvature;
  const Vec& x = p.chart;
  const auto h = fd_steps(imm, x, opt.diff, &geom);

  const double mu0 = var.weight.value_at(p.position());
  const auto s = sigmas_at(p, mu0, r + 1);
  const double lam = var.lambda(x);
  const Vec tau = var.tau(x);
  const bool printed = opt.indexing == NewtonIndexing::AsPrinted;
  const int hess_index = printed ? r : r - 1;

  NodeTerms out;
  out.t.principal = lam * (-(r + 1) * at_index(s, r + 1) + mu0 * at_index(s, r));

  if (var.normal_speed && hess_index >= 0) {
    if (opt.hessian == HessianTreatment::Direct) {
      const Mat hess = covariant_hessian_at(var.normal_speed, p, h);
      out.t.hessian = hess.cwiseProduct(newton_tensor_upper(p, mu0, hess_index)).sum();
    } else {
      auto tensor = [&](const Vec& y) -> Mat {
        const GeometryPoint q = geometry_at(imm, y);
        return newton_tensor_upper(q, var.weight.value_at(q.position()), hess_index);
      };
      const Vec div = covariant_divergence_tensor_at(tensor, p, h);
      const Vec grad = chart_gradient(var.normal_speed, p, h);
      out.t.hessian = -grad.dot(div);
    }
  }

  if (route == CurvatureRoute::ClosedTrace) {
    out.t.curvature = c * lam * ((n - r + 1) * at_index(s, r - 1) + mu0 * at_index(s, r - 2));
  } else if (r >= 1) {
    // -g^{jm} R(nu, psi_m, psi_i, X) (T_{r-1})^i_j
    //   + T_{r-1}^{ij} R(psi_j, tau, nu, psi_i)   (normal part; tangential tau)
    const Vec X = var.deformation(p);
    const Vec tau_amb = p.jet.d1 * tau;
    const Mat t_up = newton_tensor_upper(p, mu0, r - 1);
    const Mat t_mixed = t_up * p.metric;  // (T)^i_j
    double main = 0.0;
    double swapped = 0.0;
    double normal_part = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m) {
          const Vec psi_i = p.jet.d1.col(i);
          const Vec psi_m = p.jet.d1.col(m);
          main -= p.metric_inv(j, m) * space_form_curvature(c, p.normal, psi_m, psi_i, X) * t_mixed(i, j);
          swapped -= p.metric_inv(j, m) * space_form_curvature(c, p.normal, psi_i, X, psi_m) * t_mixed(i, j);
        }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        normal_part +=
            t_up(i, j) * space_form_curvature(c, p.jet.d1.col(j), tau_amb, p.normal, p.jet.d1.col(i));
    out.t.curvature = main + normal_part;
    out.curvature_swapped = swapped + normal_part;
  }

  if (!var.weight.is_constant()) {
    const Vec grad_f = var.weight.gradient_at(p.position());
    const double tau_dmu = grad_f.dot(p.jet.d1 * tau);         // tau^l mu0_{,l}
    const double rate = grad_f.dot(var.deformation(p));        // d mu0 / dt
    const double s_prev = at_index(s, r - 1);
    out.t.weight_gradient = printed ? -lam * s_prev * tau_dmu : -s_prev * tau_dmu;
    out.t.weight_rate = (printed ? at_index(s, r) : s_prev) * rate;
  }
  return out;
}

inline FirstVariationReport integrate_terms(const GeometryField& geom, const std::vector<NodeTerms>& nodes,
                                            std::string route) {
  const std::size_t m = geom.size();
  std::vector<double> buf(m);
  auto integral = [&](auto get) {
    for (std::size_t i = 0; i < m; ++i) buf[i] = get(nodes[i]);
    return integrate(geom, std::span<const double>(buf));
  };
  FirstVariationReport rep;
  rep.route = std::move(route);
  rep.terms.principal = integral([](const NodeTerms& t) { return t.t.principal; });
  rep.terms.hessian = integral([](const NodeTerms& t) { return t.t.hessian; });
  rep.terms.curvature = integral([](const NodeTerms& t) { return t.t.curvature; });
  rep.terms.weight_gradient = integral([](const NodeTerms& t) { return t.t.weight_gradient; });
  rep.terms.weight_rate = integral([](const NodeTerms& t) { return t.t.weight_rate; });
  rep.analytic = rep.terms.sum();
  return rep;
}

inline FirstVariationReport run_variation(const GeometryField& geom, const VariationSpec& var, int r,
                                          const AnalyticOptions& opt, CurvatureRoute route, std::string name) {
  geom.ambient().require_space_form();
  if (r < 0) throw std::invalid_argument("first variation: r must be >= 0");
  std::vector<NodeTerms> nodes(geom.size());
  parallel_for(geom.size(), [&](std::size_t i) { nodes[i] = variation_node(geom, i, var, r, opt, route); });
  auto rep = integrate_terms(geom, nodes, std::move(name));
  if (route == CurvatureRoute::CurvatureTensor) {
    std::vector<double> buf(geom.size());
    for (std::size_t i = 0; i < geom.size(); ++i) buf[i] = nodes[i].curvature_swapped;
    rep.curvature_swapped_order = integrate(geom, std::span<const double>(buf));
  }
  return rep;
}

}  // namespace detail

/// Space-form integrand: the ambient curvature enters only through
/// c lambda ((n-r+1) s_{r-1} + mu0 s_{r-2}).
inline FirstVariationReport first_variation_analytic(const GeometryField& geom, const VariationSpec& var, int r,
                                                     const AnalyticOptions& opt = {}) {
  return detail::run_variation(geom, var, r, opt, detail::CurvatureRoute::ClosedTrace, "closed_trace");
}

/// General integrand: contractions of the ambient curvature tensor
/// (evaluated in closed form for the space form) with T_{r-1}.
inline FirstVariationReport first_variation_theorem1(const GeometryField& geom, const VariationSpec& var, int r,
                                                     const AnalyticOptions& opt = {}) {
  return detail::run_variation(geom, var, r, opt, detail::CurvatureRoute::CurvatureTensor, "curvature_tensor");
}

/// A natural magnitude for dF/dt: max|X| times the integral of
/// |s_r| + |s_{r+1}|. Used to express "zero" tolerances.
inline double variation_scale(const GeometryField& geom, const VariationSpec& var, int r) {
  std::vector<double> xmax(geom.size());
  parallel_for(geom.size(), [&](std::size_t i) { xmax[i] = var.deformation(geom[i]).norm(); });
  const double X = *std::max_element(xmax.begin(), xmax.end());
  const double mass = integrate(geom, [&](const GeometryPoint& p) {
    const auto s = sigmas_at(p, var.weight.value_at(p.position()), r + 1);
    return std::abs(at_index(s, r)) + std::abs(at_index(s, r + 1));
  });
  return X * mass;
}

// ---------------------------------------------------------------------------
// Finite-difference oracle
// ---------------------------------------------------------------------------

struct FdOptions {
  double step_factor = 1e-3;  // h0 = factor * diameter
  double tolerance = 1e-7;    // relative agreement of successive estimates
  int max_halvings = 8;
  double vector_step_factor = 4e-4;  // chart step for derivatives of X
};

struct FdResult {
  double value = 0.0;
  double step = 0.0;
  int halvings = 0;
  double f0 = 0.0;
};

namespace detail {

/// The deformation field X and its chart derivatives at every node.
struct DeformationJets {
  std::vector<Vec> v;
  std::vector<std::vector<Vec>> v1;  // [node][i]
  std::vector<std::vector<Vec>> v2;  // [node][i*n+j]
};

inline DeformationJets deformation_jets(const GeometryField& geom, const VariationSpec& var, double step_factor) {
  const auto& imm = geom.immersion();
  const std::size_t m = geom.size();
  DeformationJets out;
  out.v.resize(m);
  out.v1.resize(m);
  out.v2.resize(m);
  auto field = [&](const Vec& y) -> Vec { return var.deformation(geometry_at(imm, y)); };
  parallel_for(m, [&](std::size_t i) {
    const auto& p = geom[i];
    const auto d = chart_derivatives(field, p.chart, fd_steps(imm, p.chart, DiffOptions::fixed(step_factor)), true);
    out.v[i] = d.value;
    out.v1[i] = d.d1;
    out.v2[i] = d.d2;
  });
  return out;
}

/// Jet of psi + tX, radially renormalized in the sphere ambient.
inline Jet deformed_jet(const Jet& base, const DeformationJets& dx, std::size_t node, double t, bool sphere) {
  const int n = base.dim();
  Jet w(base.embedding_dim(), n, 2);
  w.value = base.value + t * dx.v[node];
  for (int i = 0; i < n; ++i) {
    w.d1.col(i) = base.d1.col(i) + t * dx.v1[node][static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j)
      w.d2[static_cast<std::size_t>(i)].col(j) = base.second(i, j) + t * dx.v2[node][static_cast<std::size_t>(i * n + j)];
  }
  if (!sphere) return w;

  // u = w / |w| and its first two derivatives.
  const double s = w.value.norm();
  Vec si(n);
  for (int i = 0; i < n; ++i) si(i) = w.value.dot(w.d1.col(i)) / s;
  Jet u(base.embedding_dim(), n, 2);
  u.value = w.value / s;
  for (int i = 0; i < n; ++i) u.d1.col(i) = w.d1.col(i) / s - w.value * si(i) / (s * s);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec wij = w.second(i, j);
      const double sij = (w.d1.col(i).dot(w.d1.col(j)) + w.value.dot(wij)) / s -
                         w.value.dot(w.d1.col(i)) * w.value.dot(w.d1.col(j)) / (s * s * s);
      u.d2[static_cast<std::size_t>(i)].col(j) =
          wij / s - (w.d1.col(i) * si(j) + w.d1.col(j) * si(i) + w.value * sij) / (s * s) +
          2.0 * w.value * si(i) * si(j) / (s * s * s);
    }
  return u;
}

inline double deformed_functional(const GeometryField& geom, const DeformationJets& dx, const WeightField& weight,
                                  int r, double t) {
  const auto& amb = geom.ambient();
  const int orientation = geom.immersion().orientation();
  std::vector<double> terms(geom.size());
  parallel_for(geom.size(), [&](std::size_t i) {
    const auto& base = geom[i];
    const GeometryPoint q =
        geometry_from_jet(amb, orientation, deformed_jet(base.jet, dx, i, t, amb.is_sphere()), base.chart);
    const double mu0 = weight.value_at(q.position());
    terms[i] = sigma_weighted_closed(q.spectrum(mu0), r) * q.sqrt_det * geom.chart_weight(i);
  });
  return pairwise_sum(terms);
}

}  // namespace detail

/// dF/dt at t = 0 along psi + tX (renormalized onto the sphere when the
/// ambient is S^{n+1}), by 4th-order central differences in t with
/// step halving until two successive estimates agree; the last pair is
/// Richardson-extrapolated.
inline FdResult first_variation_fd(const GeometryField& geom, const VariationSpec& var, int r,
                                   const FdOptions& opt = {}) {
  const auto dx = detail::deformation_jets(geom, var, opt.vector_step_factor);
  auto F = [&](double t) { return detail::deformed_functional(geom, dx, var.weight, r, t); };
  auto D = [&](double h) { return (F(-2.0 * h) - 8.0 * F(-h) + 8.0 * F(h) - F(2.0 * h)) / (12.0 * h); };

  FdResult res;
  res.f0 = F(0.0);
  const double diam = geom.immersion().diameter();
  // dF/dt is measured against (integral of |integrand|) / diameter when it
  // is itself ~0; F alone can vanish identically (Gauss-Bonnet).
  std::vector<double> mags(geom.size());
  for (std::size_t i = 0; i < geom.size(); ++i) {
    const auto& q = geom[i];
    mags[i] = std::abs(sigma_weighted_closed(q.spectrum(var.weight.value_at(q.position())), r)) * q.sqrt_det *
              geom.chart_weight(i);
  }
  const double floor = pairwise_sum(mags) / diam + std::numeric_limits<double>::min();
  double h = opt.step_factor * diam;
  double d1 = D(h);
  for (int k = 0; k < opt.max_halvings; ++k) {
    const double d2 = D(h / 2.0);
    if (std::abs(d2 - d1) <= opt.tolerance * std::max(std::abs(d2), floor)) {
      res.value = d2 + (d2 - d1) / 15.0;
      res.step = h / 2.0;
      res.halvings = k + 1;
      return res;
    }
    h /= 2.0;
    d1 = d2;
  }
  throw StepTooLarge("finite-difference derivative did not settle after " + std::to_string(opt.max_halvings) +
                     " halvings (last step " + std::to_string(h) + ")");
}

/// Both analytic routes plus the oracle in one report (closed-trace route).
inline FirstVariationReport compare_with_fd(const GeometryField& geom, const VariationSpec& var, int r,
                                            const AnalyticOptions& opt = {}, const FdOptions& fd = {}) {
  auto rep = first_variation_analytic(geom, var, r, opt);
  rep.attach_fd(first_variation_fd(geom, var, r, fd).value);
  return rep;
}

// ---------------------------------------------------------------------------
// Volume form
// ---------------------------------------------------------------------------

/// Max over nodes of |d/dt log sqrt(det g_t) - (-lambda (s_1 - mu0) + div tau)| / (1 + |rhs|)
/// (constant weight; s_1 - mu0 is the classical sigma_1).
inline double volume_derivative_check(const GeometryField& geom, const VariationSpec& var, double t_step = 1e-4) {
  if (!var.weight.is_constant()) throw std::invalid_argument("volume_derivative_check: constant weight only");
  const auto& amb = geom.ambient();
  const auto& imm = geom.immersion();
  const auto dx = detail::deformation_jets(geom, var, 4e-4);
  std::vector<double> worst(geom.size(), 0.0);
  parallel_for(geom.size(), [&](std::size_t i) {
    const auto& p = geom[i];
    auto vol = [&](double t) {
      return geometry_from_jet(amb, imm.orientation(), detail::deformed_jet(p.jet, dx, i, t, amb.is_sphere()), p.chart)
          .sqrt_det;
    };
    const double h = t_step * imm.diameter();
    const double dvol = (8.0 * (vol(h) - vol(-h)) - (vol(2.0 * h) - vol(-2.0 * h))) / (12.0 * h);
    const double lhs = dvol / p.sqrt_det;
    double div = 0.0;
    if (var.tangential) {
      div = covariant_divergence_vector_at([&](const Vec& y) { return var.tau(y); }, p,
                                           fd_steps(imm, p.chart, DiffOptions::fixed()));
    }
    const double mu0 = var.weight.constant_value();
    const double s1_weighted = at_index(sigmas_at(p, mu0, 1), 1);
    const double rhs = -var.lambda(p.chart) * (s1_weighted - mu0) + div;
    worst[i] = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
  });
  return *std::max_element(worst.begin(), worst.end());
}

}  // namespace wsigma
