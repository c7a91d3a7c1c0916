#pragma once

// Euler-Lagrange residuals of F = integral of s_r (s = weighted sigma) and
// the structural identities around them.

#include "wsigma/core.hpp"
#include "wsigma/fields.hpp"
#include "wsigma/fixtures.hpp"
#include "wsigma/geometry.hpp"
#include "wsigma/variation.hpp"
#include "wsigma/weighted_symfun.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace wsigma {

/// Per-node residual values with their norms. For vector-valued residuals
/// `values` holds the Euclidean norm per node and `vectors` the vectors.
struct ResidualField {
  std::vector<double> values;
  std::vector<Vec> vectors;
  double l2 = 0.0;   // sqrt(integral of value^2 dV)
  double max = 0.0;  // max |value|
};

inline ResidualField make_residual(const GeometryField& geom, std::vector<double> values,
                                   std::vector<Vec> vectors = {}) {
  ResidualField out;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    sq[i] = values[i] * values[i];
    out.max = std::max(out.max, std::abs(values[i]));
  }
  out.l2 = std::sqrt(std::max(0.0, integrate(geom, std::span<const double>(sq))));
  out.values = std::move(values);
  out.vectors = std::move(vectors);
  return out;
}

namespace detail {

inline void require_euclidean(const GeometryField& geom, const char* what) {
  if (geom.ambient().kind != AmbientKind::Euclidean) throw WrongAmbient(std::string(what) + ": Euclidean ambient only");
}

inline void require_sphere(const GeometryField& geom, const char* what) {
  if (geom.ambient().kind != AmbientKind::UnitSphere) throw WrongAmbient(std::string(what) + ": sphere ambient only");
}

/// (T)^{ij} psi_{,ij} with psi_{,ij} from the immersion's own derivatives.
inline Vec contract_position_hessian(const GeometryPoint& p, const Mat& t_upper) {
  const int n = p.dim();
  const auto hess = position_second_covariant_at(p);
  Vec out = Vec::Zero(p.position().size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out += t_upper(i, j) * hess[static_cast<std::size_t>(i * n + j)];
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Euclidean ambient
// ---------------------------------------------------------------------------

/// (r+1) s_{r+1} - mu0 s_r at a spectrum.
inline double euclidean_residual_value(const WeightedSpectrum& s, int r) {
  const auto v = sigma_weighted_all(s, r + 1);
  return (r + 1) * at_index(v, r + 1) - s.weight * at_index(v, r);
}

inline ResidualField euclidean_residual(const GeometryField& geom, double mu0, int r) {
  detail::require_euclidean(geom, "euclidean_residual");
  std::vector<double> v(geom.size());
  parallel_for(geom.size(), [&](std::size_t i) { v[i] = euclidean_residual_value(geom[i].spectrum(mu0), r); });
  return make_residual(geom, std::move(v));
}

/// (T_r)^{ij} psi_{,ij} - ((r+1) s_{r+1} - mu0 s_r) nu, relative to
/// 1 + |(r+1) s_{r+1} - mu0 s_r|. Holds on every hypersurface.
inline ResidualField euclidean_pde_residual(const GeometryField& geom, double mu0, int r) {
  detail::require_euclidean(geom, "euclidean_pde_residual");
  std::vector<double> v(geom.size());
  std::vector<Vec> vec(geom.size());
  parallel_for(geom.size(), [&](std::size_t i) {
    const auto& p = geom[i];
    const double res = euclidean_residual_value(p.spectrum(mu0), r);
    vec[i] = detail::contract_position_hessian(p, newton_tensor_upper(p, mu0, r)) - res * p.normal;
    v[i] = vec[i].norm() / (1.0 + std::abs(res));
  });
  return make_residual(geom, std::move(v), std::move(vec));
}

/// Which contraction of the support-function Hessian identity to check.
///  Tensor  - phi_{,ij} + phi (A g^-1 A)_ij + B^k A_{ik,j} (uncontracted)
///  Derived - contraction with T_r: phi_{,ij} T^{ij} + phi (s_1 s_{r+1} - (r+2) s_{r+2}) + B^k s_{r+1,k}
///  AsStated - same, with the gradient term written
///             (r+1) B^k s_{r+1,k} - mu0 B^k s_{r,k}; differs from Derived
///             for r >= 1 wherever the sigmas vary
enum class SupportForm { Tensor, Derived, AsStated };

inline std::string to_string(SupportForm f) {
  switch (f) {
    case SupportForm::Tensor: return "tensor";
    case SupportForm::Derived: return "derived";
    default: return "as_stated";
  }
}

/// Support function phi = <B, nu>; per-node residual relative to
/// 1 + (sum of the magnitudes of the terms).
inline ResidualField support_identity_residual(const GeometryField& geom, double mu0, int r, const Vec& B,
                                               SupportForm form = SupportForm::Derived,
                                               const DiffOptions& diff = {}) {
  detail::require_euclidean(geom, "support_identity_residual");
  const auto& imm = geom.immersion();
  auto phi = [&](const Vec& y) { return B.dot(geometry_at(imm, y).normal); };
  auto sigma = [&](int k) {
    return [&imm, mu0, k](const Vec& y) { return sigma_weighted_closed(geometry_at(imm, y).spectrum(mu0), k); };
  };
  std::vector<double> v(geom.size());
  parallel_for(geom.size(), [&](std::size_t i) {
    const auto& p = geom[i];
    const auto h = fd_steps(imm, p.chart, diff, &geom);
    const Mat hess = covariant_hessian_at(phi, p, h);
    const double ph = B.dot(p.normal);
    const Vec b_lower = p.jet.d1.transpose() * B;
    const Vec b_upper = p.metric_inv * b_lower;
    if (form == SupportForm::Tensor) {
      const auto dA = covariant_derivative_A_exact_at(geometry_at(imm, p.chart, 3));
      const Mat a2 = p.second_form * p.metric_inv * p.second_form;
      Mat grad_term = Mat::Zero(p.dim(), p.dim());
      for (int k = 0; k < p.dim(); ++k)
        for (int i2 = 0; i2 < p.dim(); ++i2)
          for (int j = 0; j < p.dim(); ++j) grad_term(i2, j) += b_upper(k) * dA[static_cast<std::size_t>(j)](i2, k);
      const Mat res = hess + ph * a2 + grad_term;
      v[i] = res.cwiseAbs().maxCoeff() / (1.0 + hess.norm() + std::abs(ph) * a2.norm() + grad_term.norm());
      return;
    }
    const auto s = sigmas_at(p, mu0, r + 2);
    const double lhs = hess.cwiseProduct(newton_tensor_upper(p, mu0, r)).sum();
    const double quad = ph * (at_index(s, 1) * at_index(s, r + 1) - (r + 2) * at_index(s, r + 2));
    const Vec g_next = chart_gradient(sigma(r + 1), p, h);
    double grad_term = 0.0;
    if (form == SupportForm::Derived) {
      grad_term = b_upper.dot(g_next);
    } else {
      const Vec g_cur = chart_gradient(sigma(r), p, h);
      grad_term = (r + 1) * b_upper.dot(g_next) - mu0 * b_upper.dot(g_cur);
    }
    v[i] = std::abs(lhs + quad + grad_term) / (1.0 + std::abs(lhs) + std::abs(quad) + std::abs(grad_term));
  });
  return make_residual(geom, std::move(v));
}

// ---------------------------------------------------------------------------
// Sphere ambient
// ---------------------------------------------------------------------------

/// Two candidate Euler-Lagrange expressions for the unit-sphere ambient.
///  FirstVariation - (r+1) s_{r+1} - mu0 s_r - (n-r+1) s_{r-1} - mu0 s_{r-2},
///                   the integrand of dF/dt for lambda = -1
///  GroupedWeight  - (r+1) s_{r+1} - (n-r+1) s_{r-1} - mu0 (s_r - s_{r-2})
/// They differ by 2 mu0 s_{r-2} and coincide for r = 1.
enum class EulerLagrangeForm { FirstVariation, GroupedWeight };

inline std::string to_string(EulerLagrangeForm f) {
  return f == EulerLagrangeForm::FirstVariation ? "first_variation" : "grouped_weight";
}

inline double sphere_residual_value(const WeightedSpectrum& s, int r, EulerLagrangeForm form) {
  const int n = s.dim();
  const auto v = sigma_weighted_all(s, r + 1);
  const double base = (r + 1) * at_index(v, r + 1) - (n - r + 1) * at_index(v, r - 1);
  if (form == EulerLagrangeForm::FirstVariation) return base - s.weight * at_index(v, r) - s.weight * at_index(v, r - 2);
  return base - s.weight * (at_index(v, r) - at_index(v, r - 2));
}

inline ResidualField sphere_residual(const GeometryField& geom, double mu0, int r,
                                     EulerLagrangeForm form = EulerLagrangeForm::FirstVariation) {
  detail::require_sphere(geom, "sphere_residual");
  if (r < 1) throw std::invalid_argument("sphere_residual: r >= 1");
  std::vector<double> v(geom.size());
  parallel_for(geom.size(), [&](std::size_t i) { v[i] = sphere_residual_value(geom[i].spectrum(mu0), r, form); });
  return make_residual(geom, std::move(v));
}

/// Sign between the two Newton tensors in
/// ((r-1) T_r + sign (n-r+1) T_{r-2})^{ij} psi_{,ij}.
enum class CombinationSign { Plus, Minus };

/// Decomposition of the combined-Newton-tensor contraction on a sphere
/// hypersurface. All residuals are relative to 1 + |reference|.
struct SpherePdeReport {
  CombinationSign sign = CombinationSign::Plus;
  /// psi coefficient vs -[(r-1) tr T_r - (n-r+1) tr T_{r-2}] in closed form
  ResidualField psi_component;
  /// nu coefficient vs (r-1) E + n mu0 s_{r-1}, E the given EL form
  ResidualField nu_vs_first_variation;
  ResidualField nu_vs_grouped_weight;
  /// nu coefficient vs (r-1) E_FirstVariation + n mu0 s_{r-2}
  ResidualField nu_vs_derived;
  /// component tangent to the hypersurface (should vanish)
  ResidualField tangential;
};

inline SpherePdeReport sphere_pde_residual(const GeometryField& geom, double mu0, int r,
                                           CombinationSign sign = CombinationSign::Plus) {
  detail::require_sphere(geom, "sphere_pde_residual");
  if (r < 2) throw std::invalid_argument("sphere_pde_residual: r >= 2");
  const std::size_t m = geom.size();
  std::vector<double> psi_c(m), nu_fv(m), nu_gw(m), nu_der(m), tan(m);
  const double sgn = sign == CombinationSign::Plus ? 1.0 : -1.0;
  parallel_for(m, [&](std::size_t i) {
    const auto& p = geom[i];
    const int n = p.dim();
    const auto spec = p.spectrum(mu0);
    const auto s = sigma_weighted_all(spec, r + 1);
    const Mat t = (r - 1) * newton_tensor_upper(p, mu0, r) + sgn * (n - r + 1) * newton_tensor_upper(p, mu0, r - 2);
    const Vec lhs = detail::contract_position_hessian(p, t);
    const double along_psi = lhs.dot(p.position());
    const double along_nu = lhs.dot(p.normal);
    tan[i] = (lhs - along_psi * p.position() - along_nu * p.normal).norm() / (1.0 + lhs.norm());

    const double stated_psi = -((r - 1) * ((n - r) * at_index(s, r) + mu0 * at_index(s, r - 1)) -
                                (n - r + 1) * ((n - r + 2) * at_index(s, r - 2) + mu0 * at_index(s, r - 3)));
    psi_c[i] = relative_residual(along_psi, stated_psi);

    const double e_fv = sphere_residual_value(spec, r, EulerLagrangeForm::FirstVariation);
    const double e_gw = sphere_residual_value(spec, r, EulerLagrangeForm::GroupedWeight);
    nu_fv[i] = relative_residual(along_nu, (r - 1) * e_fv + n * mu0 * at_index(s, r - 1));
    nu_gw[i] = relative_residual(along_nu, (r - 1) * e_gw + n * mu0 * at_index(s, r - 1));
    nu_der[i] = relative_residual(along_nu, (r - 1) * e_fv + n * mu0 * at_index(s, r - 2));
  });
  SpherePdeReport rep;
  rep.sign = sign;
  rep.psi_component = make_residual(geom, std::move(psi_c));
  rep.nu_vs_first_variation = make_residual(geom, std::move(nu_fv));
  rep.nu_vs_grouped_weight = make_residual(geom, std::move(nu_gw));
  rep.nu_vs_derived = make_residual(geom, std::move(nu_der));
  rep.tangential = make_residual(geom, std::move(tan));
  return rep;
}

/// r = 1 contraction T^{ij} psi_{,ij} against n nu - ((n-1) s_1 + mu0) psi,
/// with T the weighted T_1 or the classical T_1. The weighted contraction
/// always equals (2 s_2 - mu0 s_1) nu - ((n-1) s_1 + mu0) psi, so the
/// identity holds exactly where 2 s_2 - mu0 s_1 - n = 0.
struct RemarkReport {
  ResidualField weighted;
  ResidualField classical;
  ResidualField weighted_general;  // against (2 s_2 - mu0 s_1) nu - ((n-1) s_1 + mu0) psi
};

inline RemarkReport sphere_r1_contraction(const GeometryField& geom, double mu0) {
  detail::require_sphere(geom, "sphere_r1_contraction");
  const std::size_t m = geom.size();
  std::vector<double> w(m), c(m), g(m);
  parallel_for(m, [&](std::size_t i) {
    const auto& p = geom[i];
    const int n = p.dim();
    const auto s = sigmas_at(p, mu0, 2);
    const Vec stated = n * p.normal - ((n - 1) * s[1] + mu0) * p.position();
    const Vec general = (2.0 * s[2] - mu0 * s[1]) * p.normal - ((n - 1) * s[1] + mu0) * p.position();
    const Vec lw = detail::contract_position_hessian(p, newton_tensor_upper(p, mu0, 1));
    const Vec lc = detail::contract_position_hessian(p, newton_tensor_upper_classical(p, 1));
    w[i] = (lw - stated).norm() / (1.0 + stated.norm());
    c[i] = (lc - stated).norm() / (1.0 + stated.norm());
    g[i] = (lw - general).norm() / (1.0 + general.norm());
  });
  return {make_residual(geom, std::move(w)), make_residual(geom, std::move(c)), make_residual(geom, std::move(g))};
}

// ---------------------------------------------------------------------------
// Divergence of the weighted Newton tensor
// ---------------------------------------------------------------------------

struct DivergenceReport {
  std::vector<Vec> divergence;  // (div T_r)^i, chart components
  std::vector<Vec> rhs;         // sum_l mu0^l / l! T_{r-1-l}^{ij} mu0_{,j}
  ResidualField residual;       // |div - rhs|_g / (1 + |rhs|_g)
  ResidualField magnitude;      // |div|_g
};

/// Covariant divergence of (T_r^w)^{ij} by finite differences, against the
/// closed expression in terms of classical Newton tensors and grad mu0.
inline DivergenceReport div_newton_weighted(const GeometryField& geom, const WeightField& weight, int r,
                                            const DiffOptions& diff = {}) {
  const auto& imm = geom.immersion();
  const std::size_t m = geom.size();
  DivergenceReport rep;
  rep.divergence.resize(m);
  rep.rhs.resize(m);
  std::vector<double> res(m), mag(m);
  auto tensor = [&](const Vec& y) -> Mat {
    const GeometryPoint q = geometry_at(imm, y);
    return newton_tensor_upper(q, weight.value_at(q.position()), r);
  };
  parallel_for(m, [&](std::size_t i) {
    const auto& p = geom[i];
    const int n = p.dim();
    const double mu0 = weight.value_at(p.position());
    Vec div = Vec::Zero(n);
    if (r > 0) div = covariant_divergence_tensor_at(tensor, p, fd_steps(imm, p.chart, diff, &geom));
    const Vec dmu = p.jet.d1.transpose() * weight.gradient_at(p.position());  // mu0_{,j}
    Vec rhs = Vec::Zero(n);
    double coeff = 1.0;
    for (int l = 0; l <= r - 1; ++l) {
      if (l > 0) coeff *= mu0 / l;
      rhs += coeff * (newton_tensor_upper_classical(p, r - 1 - l) * dmu);
    }
    auto gnorm = [&](const Vec& v) { return std::sqrt(std::max(0.0, v.dot(p.metric * v))); };
    res[i] = gnorm(div - rhs) / (1.0 + gnorm(rhs));
    mag[i] = gnorm(div);
    rep.divergence[i] = div;
    rep.rhs[i] = rhs;
  });
  rep.residual = make_residual(geom, std::move(res));
  rep.magnitude = make_residual(geom, std::move(mag));
  return rep;
}

// ---------------------------------------------------------------------------
// Round spheres
// ---------------------------------------------------------------------------

/// (r+1) s_{r+1} - mu0 s_r on the round sphere of radius R in E^{n+1}.
inline double round_sphere_residual(int n, int r, double mu0, double R) {
  return euclidean_residual_value({mu0, std::vector<double>(static_cast<std::size_t>(n), 1.0 / R)}, r);
}

/// Smallest R > 0 with round_sphere_residual = 0, bracketed by a log-spaced
/// scan over (1e-4, 1e3) * max(1, 1/|mu0|) and refined by bisection.
inline std::optional<double> critical_sphere_radius(int n, int r, double mu0) {
  if (n < 1 || r < 0) throw std::invalid_argument("critical_sphere_radius: need n >= 1, r >= 0");
  const double unit = std::max(1.0, mu0 != 0.0 ? 1.0 / std::abs(mu0) : 1.0);
  const double lo = 1e-4 * unit;
  const double hi = 1e3 * unit;
  const int samples = 4000;
  auto f = [&](double R) { return round_sphere_residual(n, r, mu0, R); };
  double a = lo;
  double fa = f(a);
  if (fa == 0.0) return a;
  for (int k = 1; k <= samples; ++k) {
    const double b = lo * std::pow(hi / lo, static_cast<double>(k) / samples);
    const double fb = f(b);
    if (fb == 0.0) return b;
    if ((fa < 0.0) != (fb < 0.0)) {
      double x0 = a;
      double x1 = b;
      double f0 = fa;
      for (int it = 0; it < 200 && x1 - x0 > 1e-15 * x1; ++it) {
        const double mid = 0.5 * (x0 + x1);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (f0 < 0.0)) {
          x0 = mid;
          f0 = fm;
        } else {
          x1 = mid;
        }
      }
      return 0.5 * (x0 + x1);
    }
    a = b;
    fa = fb;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Adjudicating the two sphere Euler-Lagrange forms
// ---------------------------------------------------------------------------

/// On geodesic spheres of radius rho in S^3, dF/drho (finite differences
/// along the outward normal) is compared with both residual forms:
/// dF/drho = Area * E_FirstVariation exactly, so sign changes must line up.
struct AdjudicationSample {
  double rho = 0.0;
  double dF_drho = 0.0;
  double first_variation = 0.0;
  double grouped_weight = 0.0;
};

struct AdjudicationReport {
  int r = 2;
  double mu0 = 0.0;
  std::vector<AdjudicationSample> samples;
  std::vector<double> fd_zeros;              // sign changes of dF/drho, refined by bisection
  std::vector<double> first_variation_zeros;  // closed-form zeros in rho
  std::vector<double> grouped_weight_zeros;
  double resolution = 0.0;          // sampling step in rho
  bool first_variation_matches = false;
  bool grouped_weight_matches = false;
  bool sign_agreement_first_variation = false;  // sign(dF/drho) == sign(E) at every sample
  bool sign_agreement_grouped_weight = false;
  std::string verdict;
};

namespace detail {

inline double geodesic_sphere_residual(double rho, double mu0, int r, EulerLagrangeForm form) {
  const double k = std::cos(rho) / std::sin(rho);
  return sphere_residual_value({mu0, {k, k}}, r, form);
}

inline std::vector<double> zeros_on(const std::function<double(double)>& f, double a, double b, int samples) {
  std::vector<double> out;
  double x0 = a;
  double f0 = f(x0);
  for (int k = 1; k <= samples; ++k) {
    const double x1 = a + (b - a) * k / samples;
    const double f1 = f(x1);
    if ((f0 < 0.0) != (f1 < 0.0)) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      out.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return out;
}

}  // namespace detail

inline AdjudicationReport adjudicate_sphere_forms(double mu0, int r = 2, int samples = 40, int grid = 16,
                                                  double rho_lo = 0.15, double rho_hi = 3.0) {
  AdjudicationReport rep;
  rep.r = r;
  rep.mu0 = mu0;
  rep.resolution = (rho_hi - rho_lo) / samples;
  const WeightField weight = WeightField::constant(mu0);
  VariationSpec outward;
  outward.normal_speed = [](const Vec&) { return -1.0; };  // normal points toward the pole
  outward.weight = weight;
  auto dF = [&](double rho) {
    const auto geom = build_geometry(geodesic_sphere(rho), GridSpec::uniform(2, grid));
    return first_variation_fd(geom, outward, r).value;
  };
  std::vector<double> fd_values;
  for (int k = 0; k <= samples; ++k) {
    const double rho = rho_lo + rep.resolution * k;
    AdjudicationSample s;
    s.rho = rho;
    s.dF_drho = dF(rho);
    s.first_variation = detail::geodesic_sphere_residual(rho, mu0, r, EulerLagrangeForm::FirstVariation);
    s.grouped_weight = detail::geodesic_sphere_residual(rho, mu0, r, EulerLagrangeForm::GroupedWeight);
    rep.samples.push_back(s);
  }
  // FD zeros: bracket on the samples, bisect with further FD evaluations.
  for (std::size_t k = 1; k < rep.samples.size(); ++k) {
    const auto& a = rep.samples[k - 1];
    const auto& b = rep.samples[k];
    if ((a.dF_drho < 0.0) != (b.dF_drho < 0.0)) {
      double lo = a.rho, hi = b.rho, flo = a.dF_drho;
      for (int it = 0; it < 30; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = dF(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      rep.fd_zeros.push_back(0.5 * (lo + hi));
    }
  }
  auto zeros_of = [&](EulerLagrangeForm form) {
    return detail::zeros_on([&](double rho) { return detail::geodesic_sphere_residual(rho, mu0, r, form); }, rho_lo,
                            rho_hi, samples * 50);
  };
  rep.first_variation_zeros = zeros_of(EulerLagrangeForm::FirstVariation);
  rep.grouped_weight_zeros = zeros_of(EulerLagrangeForm::GroupedWeight);

  auto matches = [&](const std::vector<double>& zs) {
    if (zs.size() != rep.fd_zeros.size()) return false;
    for (std::size_t i = 0; i < zs.size(); ++i)
      if (std::abs(zs[i] - rep.fd_zeros[i]) > rep.resolution) return false;
    return true;
  };
  rep.first_variation_matches = matches(rep.first_variation_zeros);
  rep.grouped_weight_matches = matches(rep.grouped_weight_zeros);
  rep.sign_agreement_first_variation = true;
  rep.sign_agreement_grouped_weight = true;
  for (const auto& s : rep.samples) {
    if ((s.dF_drho < 0.0) != (s.first_variation < 0.0)) rep.sign_agreement_first_variation = false;
    if ((s.dF_drho < 0.0) != (s.grouped_weight < 0.0)) rep.sign_agreement_grouped_weight = false;
  }
  if (rep.first_variation_matches && !rep.grouped_weight_matches)
    rep.verdict = "first_variation form confirmed; grouped_weight form rejected";
  else if (rep.first_variation_matches && rep.grouped_weight_matches)
    rep.verdict = "inconclusive: both forms match (they coincide on this family)";
  else if (!rep.first_variation_matches && rep.grouped_weight_matches)
    rep.verdict = "grouped_weight form confirmed; first_variation form rejected";
  else
    rep.verdict = "neither form matches the finite-difference zeros";
  return rep;
}

}  // namespace wsigma
