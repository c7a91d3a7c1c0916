#pragma once

// Pointwise hypersurface geometry and node grids with quadrature weights.

#include "wsigma/core.hpp"
#include "wsigma/immersion.hpp"
#include "wsigma/newton_transform.hpp"
#include "wsigma/quadrature.hpp"
#include "wsigma/weighted_symfun.hpp"

#include <cmath>
#include <concepts>
#include <numbers>
#include <string>
#include <vector>

namespace wsigma {

/// Generalized cross product of the frame: N_k = det[cols..., e_k]. For a
/// sphere ambient the position is appended to the tangent columns, so the
/// result is orthogonal to both.
inline Vec frame_cross_product(const Jet& jet, const AmbientSpace& ambient) {
  const int m = jet.embedding_dim();
  const int n = jet.dim();
  Mat cols(m, m);
  cols.leftCols(n) = jet.d1;
  if (ambient.is_sphere()) cols.col(n) = jet.value;
  Vec out(m);
  for (int k = 0; k < m; ++k) {
    cols.col(m - 1).setZero();
    cols(k, m - 1) = 1.0;
    out(k) = cols.determinant();
  }
  return out;
}

/// Everything known about the hypersurface at one chart point.
///   shape(i, j)              = A^i_j = g^{ik} A_kj
///   christoffel[k](i, j)     = Gamma^k_ij
///   frame                    = L^{-T} with g = L L^T; its columns are the
///                              chart components of an orthonormal frame
///   shape_orthonormal        = frame^T A frame (symmetric)
struct GeometryPoint {
  Vec chart;
  Jet jet;
  Vec normal;
  Mat metric;
  Mat metric_inv;
  Mat second_form;
  Mat shape;
  Mat frame;
  Mat shape_orthonormal;
  Vec principal;  // ascending
  std::vector<Mat> christoffel;
  double sqrt_det = 0.0;

  int dim() const { return static_cast<int>(metric.rows()); }
  const Vec& position() const { return jet.value; }

  /// Raise both indices of a tensor written in the orthonormal frame.
  Mat raise_orthonormal(const Mat& t) const { return frame * t * frame.transpose(); }

  SymmetricOperator shape_operator() const { return SymmetricOperator(shape_orthonormal); }
  WeightedSpectrum spectrum(double weight) const {
    return {weight, std::vector<double>(principal.data(), principal.data() + principal.size())};
  }
};

inline GeometryPoint geometry_from_jet(const AmbientSpace& ambient, int orientation, Jet jet, Vec chart) {
  const int n = jet.dim();
  GeometryPoint p;
  p.chart = std::move(chart);
  if (!jet.value.allFinite() || !jet.d1.allFinite()) throw DegenerateFrame("non-finite immersion jet");
  if (ambient.is_sphere() && std::abs(jet.value.norm() - 1.0) > 1e-10)
    throw AmbientViolation("immersion leaves the unit sphere: |psi| = " + std::to_string(jet.value.norm()));

  p.metric = jet.d1.transpose() * jet.d1;
  double diag_product = 1.0;
  for (int i = 0; i < n; ++i) diag_product *= p.metric(i, i);
  const double gram = p.metric.determinant();
  if (!(diag_product > 0.0) || !(gram > 1e-10 * diag_product))
    throw DegenerateFrame("tangent vectors are (nearly) dependent; normalized Gram determinant " +
                          std::to_string(diag_product > 0.0 ? gram / diag_product : 0.0));
  p.sqrt_det = std::sqrt(gram);
  p.metric_inv = p.metric.inverse();
  p.metric_inv = 0.5 * (p.metric_inv + p.metric_inv.transpose()).eval();

  Vec nrm = frame_cross_product(jet, ambient);
  const double len = nrm.norm();
  if (!(len > 0.0)) throw DegenerateFrame("zero normal");
  p.normal = (orientation >= 0 ? 1.0 : -1.0) * nrm / len;

  p.second_form.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p.second_form(i, j) = jet.second(i, j).dot(p.normal);
  p.second_form = 0.5 * (p.second_form + p.second_form.transpose()).eval();
  p.shape = p.metric_inv * p.second_form;

  const Eigen::LLT<Mat> llt(p.metric);
  const Mat l = llt.matrixL();
  p.frame = l.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
  Mat s = p.frame.transpose() * p.second_form * p.frame;
  p.shape_orthonormal = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(p.shape_orthonormal, Eigen::EigenvaluesOnly);
  p.principal = es.eigenvalues();

  // Gamma^k_ij = g^{kl} <psi_ij, psi_l>; the ambient-tangential projection
  // is the same in both ambients because psi_l is tangent.
  p.christoffel.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const Vec c = jet.d1.transpose() * jet.second(i, j);
      const Vec gamma = p.metric_inv * c;
      for (int k = 0; k < n; ++k) {
        p.christoffel[static_cast<std::size_t>(k)](i, j) = gamma(k);
        p.christoffel[static_cast<std::size_t>(k)](j, i) = gamma(k);
      }
    }
  p.jet = std::move(jet);
  return p;
}

inline GeometryPoint geometry_at(const ParametricImmersion& imm, const Vec& x, int order = 2) {
  return geometry_from_jet(imm.ambient(), imm.orientation(), imm.jet(x, order), x);
}

// ---------------------------------------------------------------------------
// Pointwise curvature quantities
// ---------------------------------------------------------------------------

/// s_0..s_{r_max} from the principal curvatures.
inline std::vector<double> sigmas_at(const GeometryPoint& p, double weight, int r_max) {
  return sigma_weighted_all(p.spectrum(weight), std::max(r_max, 0));
}

/// (T_r^w)^{ij}: the weighted Newton tensor with both indices raised.
inline Mat newton_tensor_upper(const GeometryPoint& p, double weight, int r) {
  return p.raise_orthonormal(newton_weighted(p.shape_operator(), weight, r));
}

/// (T_r)^{ij}: classical Newton tensor with both indices raised.
inline Mat newton_tensor_upper_classical(const GeometryPoint& p, int r) {
  return p.raise_orthonormal(newton_classical(p.shape_operator(), r));
}

// ---------------------------------------------------------------------------
// Node grids
// ---------------------------------------------------------------------------

/// Per-axis node counts, plus an optional per-axis shift of periodic nodes
/// given as a fraction of the spacing.
struct GridSpec {
  std::vector<int> counts;
  std::vector<double> phase;

  static GridSpec uniform(int n, int count) { return {std::vector<int>(static_cast<std::size_t>(n), count), {}}; }
};

class GeometryField {
 public:
  GeometryField(ParametricImmersion imm, GridSpec grid) : imm_(std::move(imm)), grid_(std::move(grid)) {}

  const ParametricImmersion& immersion() const { return imm_; }
  const AmbientSpace& ambient() const { return imm_.ambient(); }
  const GridSpec& grid() const { return grid_; }
  int dim() const { return imm_.dim(); }
  std::size_t size() const { return points_.size(); }
  const GeometryPoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<GeometryPoint>& points() const { return points_; }

  /// Quadrature weight in the chart (without the sqrt(det g) factor).
  double chart_weight(std::size_t i) const { return chart_weights_[i]; }
  /// sqrt(det g) times the chart weight: the dV weight of node i.
  double area_weight(std::size_t i) const { return area_weights_[i]; }
  const std::vector<double>& area_weights() const { return area_weights_; }

  /// Nominal node spacing along an axis (chart units).
  double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }

 private:
  friend GeometryField build_geometry(const ParametricImmersion&, const GridSpec&);

  ParametricImmersion imm_;
  GridSpec grid_;
  std::vector<GeometryPoint> points_;
  std::vector<double> chart_weights_;
  std::vector<double> area_weights_;
  std::vector<double> spacing_;
};

namespace detail {

struct AxisNodes {
  std::vector<double> x;
  std::vector<double> w;
  double spacing = 0.0;
};

inline AxisNodes axis_nodes(const ChartAxis& axis, int count, double phase) {
  AxisNodes out;
  const auto nc = static_cast<std::size_t>(count);
  if (axis.rule == AxisRule::Periodic) {
    const double h = axis.length() / count;
    for (std::size_t k = 0; k < nc; ++k) {
      out.x.push_back(axis.lo + (static_cast<double>(k) + phase) * h);
      out.w.push_back(h);
    }
    out.spacing = h;
  } else {
    // colatitude in (lo, hi) = (0, pi): theta = arccos(z)
    const auto rule = gauss_legendre(count);
    for (std::size_t k = 0; k < nc; ++k) {
      const std::size_t kk = nc - 1 - k;  // ascending theta
      const double z = rule.nodes[kk];
      const double theta = std::acos(z);
      out.x.push_back(theta);
      out.w.push_back(rule.weights[kk] / std::sin(theta));
    }
    out.spacing = axis.length() / count;
  }
  return out;
}

}  // namespace detail

/// Samples the immersion on a tensor-product grid (last axis fastest).
inline GeometryField build_geometry(const ParametricImmersion& imm, const GridSpec& grid) {
  const int n = imm.dim();
  if (static_cast<int>(grid.counts.size()) != n)
    throw std::invalid_argument("build_geometry: grid dimension does not match the chart");
  for (int c : grid.counts)
    if (c < 8) throw std::invalid_argument("build_geometry: need at least 8 nodes per axis");

  GeometryField field(imm, grid);
  std::vector<detail::AxisNodes> axes;
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) {
    const double phase = a < static_cast<int>(grid.phase.size()) ? grid.phase[static_cast<std::size_t>(a)] : 0.0;
    axes.push_back(detail::axis_nodes(imm.axis(a), grid.counts[static_cast<std::size_t>(a)], phase));
    field.spacing_.push_back(axes.back().spacing);
    total *= static_cast<std::size_t>(grid.counts[static_cast<std::size_t>(a)]);
  }

  field.points_.resize(total);
  field.chart_weights_.assign(total, 0.0);
  field.area_weights_.assign(total, 0.0);
  parallel_for(total, [&](std::size_t idx) {
    Vec x(n);
    double w = 1.0;
    std::size_t rest = idx;
    for (int a = n - 1; a >= 0; --a) {
      const auto& ax = axes[static_cast<std::size_t>(a)];
      const std::size_t k = rest % ax.x.size();
      rest /= ax.x.size();
      x(a) = ax.x[k];
      w *= ax.w[k];
    }
    field.points_[idx] = geometry_at(imm, x);
    field.chart_weights_[idx] = w;
    field.area_weights_[idx] = w * field.points_[idx].sqrt_det;
  });
  return field;
}

/// Sum of values times dV weights, in a fixed pairwise order.
inline double integrate(const GeometryField& geom, std::span<const double> values) {
  if (values.size() != geom.size()) throw std::invalid_argument("integrate: one value per node required");
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) terms[i] = values[i] * geom.area_weight(i);
  return pairwise_sum(terms);
}

/// Evaluates f at every node (in parallel), then integrates.
template <class F>
  requires std::invocable<F&, const GeometryPoint&>
double integrate(const GeometryField& geom, F&& f) {
  std::vector<double> values(geom.size());
  parallel_for(geom.size(), [&](std::size_t i) { values[i] = f(geom[i]); });
  return integrate(geom, std::span<const double>(values));
}

inline double area(const GeometryField& geom) {
  return pairwise_sum(geom.area_weights());
}

}  // namespace wsigma
