#pragma once

// Chart finite differences and covariant derivatives of fields on a
// hypersurface.
//
// Fields are plain callables of the chart point; derivatives use 4th-order
// central stencils. Step sizes are either a fixed fraction of the axis
// length (accuracy ~1e-10 for analytic fields) or tied to the grid spacing,
// which is what a refinement study needs. On a polar axis the step is
// clipped so that every stencil point stays inside (0, pi).

#include "wsigma/core.hpp"
#include "wsigma/geometry.hpp"

#include <functional>
#include <type_traits>
#include <vector>

namespace wsigma {

using ScalarField = std::function<double(const Vec&)>;

struct DiffOptions {
  enum class Step { Fixed, GridSpacing };
  Step mode = Step::Fixed;
  double factor = 4e-4;

  static DiffOptions fixed(double factor = 4e-4) { return {Step::Fixed, factor}; }
  static DiffOptions grid_tied(double factor = 0.5) { return {Step::GridSpacing, factor}; }
};

namespace detail {

inline double clip_step(const ChartAxis& axis, double x, double h) {
  if (axis.periodic()) return h;
  return std::min(h, std::min(x - axis.lo, axis.hi - x) / 2.5);
}

template <class T>
T zero_like(const T& v) {
  if constexpr (std::is_arithmetic_v<T>)
    return 0.0;
  else
    return T::Zero(v.rows(), v.cols());
}

}  // namespace detail

/// Per-axis steps at x. GridSpacing needs a grid; without one the fixed
/// rule is used.
inline std::vector<double> fd_steps(const ParametricImmersion& imm, const Vec& x, const DiffOptions& opt,
                                    const GeometryField* grid = nullptr) {
  std::vector<double> h(static_cast<std::size_t>(imm.dim()));
  for (int a = 0; a < imm.dim(); ++a) {
    const double base = (opt.mode == DiffOptions::Step::GridSpacing && grid) ? grid->spacing(a) : imm.axis(a).length();
    h[static_cast<std::size_t>(a)] = detail::clip_step(imm.axis(a), x(a), opt.factor * base);
  }
  return h;
}

/// First (and optionally second) chart derivatives of f at x.
///   d1[k]         = d f / dx_k
///   d2[i * n + j] = d^2 f / dx_i dx_j
template <class T>
struct ChartDerivatives {
  T value;
  std::vector<T> d1;
  std::vector<T> d2;
};

template <class F>
auto chart_derivatives(const F& f, const Vec& x, const std::vector<double>& h, bool second) {
  using T = std::decay_t<decltype(f(x))>;
  const int n = static_cast<int>(x.size());
  ChartDerivatives<T> out;
  out.value = f(x);
  const T zero = detail::zero_like(out.value);
  out.d1.assign(static_cast<std::size_t>(n), zero);
  if (second) out.d2.assign(static_cast<std::size_t>(n * n), zero);

  auto at = [&](int i, double si, int j, double sj) {
    Vec y = x;
    y(i) += si;
    if (j >= 0) y(j) += sj;
    return f(y);
  };
  for (int i = 0; i < n; ++i) {
    const double hi = h[static_cast<std::size_t>(i)];
    const T p1 = at(i, hi, -1, 0.0);
    const T m1 = at(i, -hi, -1, 0.0);
    const T p2 = at(i, 2.0 * hi, -1, 0.0);
    const T m2 = at(i, -2.0 * hi, -1, 0.0);
    out.d1[static_cast<std::size_t>(i)] = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * hi);
    if (second)
      out.d2[static_cast<std::size_t>(i * n + i)] =
          (16.0 * (p1 + m1) - (p2 + m2) - 30.0 * out.value) / (12.0 * hi * hi);
  }
  if (second) {
    static constexpr double kOff[4] = {-2.0, -1.0, 1.0, 2.0};
    static constexpr double kW[4] = {1.0, -8.0, 8.0, -1.0};
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double hi = h[static_cast<std::size_t>(i)];
        const double hj = h[static_cast<std::size_t>(j)];
        T acc = zero;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) acc = acc + (kW[a] * kW[b]) * at(i, kOff[a] * hi, j, kOff[b] * hj);
        const T d = acc / (144.0 * hi * hj);
        out.d2[static_cast<std::size_t>(i * n + j)] = d;
        out.d2[static_cast<std::size_t>(j * n + i)] = d;
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pointwise covariant derivatives
// ---------------------------------------------------------------------------

/// Chart gradient (d_k f) of a scalar field.
inline Vec chart_gradient(const ScalarField& f, const GeometryPoint& p, const std::vector<double>& h) {
  const auto d = chart_derivatives(f, p.chart, h, false);
  Vec g(p.dim());
  for (int k = 0; k < p.dim(); ++k) g(k) = d.d1[static_cast<std::size_t>(k)];
  return g;
}

/// f_{,ij} = d_i d_j f - Gamma^k_ij d_k f.
inline Mat covariant_hessian_at(const ScalarField& f, const GeometryPoint& p, const std::vector<double>& h) {
  const int n = p.dim();
  const auto d = chart_derivatives(f, p.chart, h, true);
  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = d.d2[static_cast<std::size_t>(i * n + j)];
      for (int k = 0; k < n; ++k) v -= p.christoffel[static_cast<std::size_t>(k)](i, j) * d.d1[static_cast<std::size_t>(k)];
      out(i, j) = v;
    }
  return 0.5 * (out + out.transpose());
}

/// A_{ij,k} = d_k A_ij - Gamma^l_ki A_lj - Gamma^l_kj A_il, given d_k A_ij.
/// Result: out[k](i, j) = A_{ij,k}.
inline std::vector<Mat> covariant_from_partials(const GeometryPoint& p, const std::vector<Mat>& dA) {
  const int n = p.dim();
  std::vector<Mat> out(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = dA[static_cast<std::size_t>(k)](i, j);
        for (int l = 0; l < n; ++l) {
          v -= p.christoffel[static_cast<std::size_t>(l)](k, i) * p.second_form(l, j);
          v -= p.christoffel[static_cast<std::size_t>(l)](k, j) * p.second_form(i, l);
        }
        out[static_cast<std::size_t>(k)](i, j) = v;
      }
  return out;
}

/// A_{ij,k} with d_k A_ij by chart finite differences of the geometry.
inline std::vector<Mat> covariant_derivative_A_at(const ParametricImmersion& imm, const GeometryPoint& p,
                                                  const std::vector<double>& h) {
  const auto d = chart_derivatives([&](const Vec& y) { return geometry_at(imm, y).second_form; }, p.chart, h, false);
  return covariant_from_partials(p, d.d1);
}

/// A_{ij,k} from a third-order jet: d_k A_ij = <psi_ijk, nu> - A_km Gamma^m_ij.
inline std::vector<Mat> covariant_derivative_A_exact_at(const GeometryPoint& p) {
  if (p.jet.order < 3) throw std::invalid_argument("covariant_derivative_A_exact_at: needs a third-order jet");
  const int n = p.dim();
  std::vector<Mat> dA(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = p.jet.third(i, j, k).dot(p.normal);
        for (int m = 0; m < n; ++m) v -= p.second_form(k, m) * p.christoffel[static_cast<std::size_t>(m)](i, j);
        dA[static_cast<std::size_t>(k)](i, j) = v;
      }
  return covariant_from_partials(p, dA);
}

/// max_{i,j,k} |A_{ij,k} - A_{ik,j}|.
inline double codazzi_defect(const std::vector<Mat>& dA) {
  const int n = static_cast<int>(dA.size());
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        worst = std::max(worst, std::abs(dA[static_cast<std::size_t>(k)](i, j) - dA[static_cast<std::size_t>(j)](i, k)));
  return worst;
}

/// psi_{,ij} = psi_ij - Gamma^k_ij psi_k, as ambient vectors (index i*n+j).
inline std::vector<Vec> position_second_covariant_at(const GeometryPoint& p) {
  const int n = p.dim();
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec v = p.jet.second(i, j);
      for (int k = 0; k < n; ++k) v -= p.christoffel[static_cast<std::size_t>(k)](i, j) * p.jet.d1.col(k);
      out.push_back(v);
    }
  return out;
}

/// Closed form in a space form of curvature c: A_ij nu - c g_ij psi.
inline std::vector<Vec> position_second_covariant_closed(const GeometryPoint& p, double c) {
  const int n = p.dim();
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.push_back(p.second_form(i, j) * p.normal - c * p.metric(i, j) * p.position());
  return out;
}

/// Divergence of a vector field given by chart components tau^l(x):
/// d_l tau^l + Gamma^l_lk tau^k.
template <class VectorFieldFn>
double covariant_divergence_vector_at(const VectorFieldFn& tau, const GeometryPoint& p, const std::vector<double>& h) {
  const int n = p.dim();
  const auto d = chart_derivatives([&](const Vec& y) -> Vec { return tau(y); }, p.chart, h, false);
  double div = 0.0;
  for (int l = 0; l < n; ++l) {
    div += d.d1[static_cast<std::size_t>(l)](l);
    for (int k = 0; k < n; ++k) div += p.christoffel[static_cast<std::size_t>(l)](l, k) * d.value(k);
  }
  return div;
}

/// Divergence of a (2,0)-tensor field T^{ij}(x) on its second index:
/// (div T)^i = d_j T^{ij} + Gamma^i_jk T^{kj} + Gamma^j_jk T^{ik}.
template <class TensorFieldFn>
Vec covariant_divergence_tensor_at(const TensorFieldFn& t, const GeometryPoint& p, const std::vector<double>& h) {
  const int n = p.dim();
  const auto d = chart_derivatives([&](const Vec& y) -> Mat { return t(y); }, p.chart, h, false);
  const Mat& T = d.value;
  Vec out = Vec::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out(i) += d.d1[static_cast<std::size_t>(j)](i, j);
      for (int k = 0; k < n; ++k) {
        out(i) += p.christoffel[static_cast<std::size_t>(i)](j, k) * T(k, j);
        out(i) += p.christoffel[static_cast<std::size_t>(j)](j, k) * T(i, k);
      }
    }
  return out;
}

// ---------------------------------------------------------------------------
// Field-level wrappers (one result per node, computed in parallel)
// ---------------------------------------------------------------------------

inline std::vector<Mat> covariant_hessian(const GeometryField& geom, const ScalarField& f,
                                          const DiffOptions& opt = {}) {
  std::vector<Mat> out(geom.size());
  parallel_for(geom.size(), [&](std::size_t i) {
    const auto& p = geom[i];
    out[i] = covariant_hessian_at(f, p, fd_steps(geom.immersion(), p.chart, opt, &geom));
  });
  return out;
}

inline std::vector<std::vector<Mat>> covariant_derivative_A(const GeometryField& geom, const DiffOptions& opt = {}) {
  std::vector<std::vector<Mat>> out(geom.size());
  parallel_for(geom.size(), [&](std::size_t i) {
    const auto& p = geom[i];
    out[i] = covariant_derivative_A_at(geom.immersion(), p, fd_steps(geom.immersion(), p.chart, opt, &geom));
  });
  return out;
}

inline std::vector<std::vector<Mat>> covariant_derivative_A_exact(const GeometryField& geom) {
  std::vector<std::vector<Mat>> out(geom.size());
  parallel_for(geom.size(), [&](std::size_t i) {
    out[i] = covariant_derivative_A_exact_at(geometry_at(geom.immersion(), geom[i].chart, 3));
  });
  return out;
}

/// Max over nodes of the Codazzi defect.
inline double codazzi_residual(const std::vector<std::vector<Mat>>& dA) {
  double worst = 0.0;
  for (const auto& d : dA) worst = std::max(worst, codazzi_defect(d));
  return worst;
}

inline std::vector<std::vector<Vec>> position_second_covariant(const GeometryField& geom) {
  std::vector<std::vector<Vec>> out(geom.size());
  parallel_for(geom.size(), [&](std::size_t i) { out[i] = position_second_covariant_at(geom[i]); });
  return out;
}

/// Max over nodes and index pairs of |psi_{,ij} - closed form| / (1 + |closed form|).
inline double position_identity_residual(const GeometryField& geom) {
  geom.ambient().require_space_form();
  const double c = geom.ambient().curvature;
  std::vector<double> worst(geom.size(), 0.0);
  parallel_for(geom.size(), [&](std::size_t i) {
    const auto lhs = position_second_covariant_at(geom[i]);
    const auto rhs = position_second_covariant_closed(geom[i], c);
    for (std::size_t k = 0; k < lhs.size(); ++k)
      worst[i] = std::max(worst[i], (lhs[k] - rhs[k]).norm() / (1.0 + rhs[k].norm()));
  });
  return *std::max_element(worst.begin(), worst.end());
}

}  // namespace wsigma
