#pragma once

// Parametric hypersurfaces: ambient space, chart box, derivative jets.

#include "wsigma/core.hpp"

#include <boost/math/differentiation/autodiff.hpp>

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace wsigma {

enum class AmbientKind { Euclidean, UnitSphere };

/// Euclidean space E^{n+1} (c = 0) or the unit sphere S^{n+1} in E^{n+2}
/// (c = 1); n is the hypersurface dimension. The fields are public so that a
/// mismatched curvature can be represented; operations that need a space
/// form call require_space_form().
struct AmbientSpace {
  AmbientKind kind = AmbientKind::Euclidean;
  int n = 2;
  double curvature = 0.0;

  static AmbientSpace euclidean(int n) { return {AmbientKind::Euclidean, n, 0.0}; }
  static AmbientSpace unit_sphere(int n) { return {AmbientKind::UnitSphere, n, 1.0}; }

  int embedding_dim() const { return kind == AmbientKind::Euclidean ? n + 1 : n + 2; }
  bool is_sphere() const { return kind == AmbientKind::UnitSphere; }

  void require_space_form() const {
    const double expected = kind == AmbientKind::Euclidean ? 0.0 : 1.0;
    if (curvature != expected)
      throw UnsupportedAmbient("ambient curvature " + std::to_string(curvature) +
                               " is not that of a supported space form");
  }
};

inline std::string to_string(AmbientKind k) { return k == AmbientKind::Euclidean ? "euclidean" : "sphere"; }

/// How nodes are laid out along one chart axis.
///  Periodic   - equispaced, trapezoid weights (spectral for periodic data)
///  PolarAngle - axis is a colatitude in (0, pi); Gauss-Legendre nodes in
///               cos(theta), strictly interior, weight w / sin(theta)
enum class AxisRule { Periodic, PolarAngle };

struct ChartAxis {
  double lo = 0.0;
  double hi = 1.0;
  AxisRule rule = AxisRule::Periodic;

  double length() const { return hi - lo; }
  bool periodic() const { return rule == AxisRule::Periodic; }
};

/// psi and its chart derivatives at one point. m = embedding dimension.
///   d1.col(i)          = d psi / dx_i
///   d2[i].col(j)       = d^2 psi / dx_i dx_j
///   d3[i * n + j].col(k) = d^3 psi / dx_i dx_j dx_k   (order 3 only)
struct Jet {
  Vec value;
  Mat d1;
  std::vector<Mat> d2;
  std::vector<Mat> d3;
  int order = 2;

  Jet() = default;
  Jet(int m, int n, int order_) : value(Vec::Zero(m)), d1(Mat::Zero(m, n)), order(order_) {
    d2.assign(static_cast<std::size_t>(n), Mat::Zero(m, n));
    if (order >= 3) d3.assign(static_cast<std::size_t>(n * n), Mat::Zero(m, n));
  }

  int embedding_dim() const { return static_cast<int>(value.size()); }
  int dim() const { return static_cast<int>(d1.cols()); }
  Vec second(int i, int j) const { return d2[static_cast<std::size_t>(i)].col(j); }
  Vec third(int i, int j, int k) const { return d3[static_cast<std::size_t>(i * dim() + j)].col(k); }
};

/// Evaluates a jet of the requested order (2 or 3) at a chart point.
using JetEvaluator = std::function<Jet(const Vec& x, int order)>;

/// An analytic immersion of a chart box. Cheap to copy (the evaluator is
/// shared). orientation = +1 or -1 multiplies the generalized cross product
/// of the frame to give the unit normal.
class ParametricImmersion {
 public:
  ParametricImmersion(std::string name, AmbientSpace ambient, std::vector<ChartAxis> axes, JetEvaluator eval,
                      double diameter, int orientation = 1)
      : name_(std::move(name)),
        ambient_(ambient),
        axes_(std::move(axes)),
        eval_(std::make_shared<JetEvaluator>(std::move(eval))),
        diameter_(diameter),
        orientation_(orientation >= 0 ? 1 : -1) {
    if (static_cast<int>(axes_.size()) != ambient_.n)
      throw std::invalid_argument("ParametricImmersion: chart dimension does not match ambient");
  }

  const std::string& name() const { return name_; }
  const AmbientSpace& ambient() const { return ambient_; }
  const std::vector<ChartAxis>& axes() const { return axes_; }
  const ChartAxis& axis(int i) const { return axes_[static_cast<std::size_t>(i)]; }
  int dim() const { return ambient_.n; }
  double diameter() const { return diameter_; }
  int orientation() const { return orientation_; }

  Jet jet(const Vec& x, int order = 2) const { return (*eval_)(x, order); }
  Vec position(const Vec& x) const { return jet(x, 2).value; }

  ParametricImmersion flipped() const {
    ParametricImmersion out = *this;
    out.orientation_ = -orientation_;
    return out;
  }

  ParametricImmersion with_orientation(int orientation) const {
    ParametricImmersion out = *this;
    out.orientation_ = orientation >= 0 ? 1 : -1;
    return out;
  }

  ParametricImmersion renamed(std::string name) const {
    ParametricImmersion out = *this;
    out.name_ = std::move(name);
    return out;
  }

 private:
  std::string name_;
  AmbientSpace ambient_;
  std::vector<ChartAxis> axes_;
  std::shared_ptr<const JetEvaluator> eval_;
  double diameter_;
  int orientation_;
};

// ---------------------------------------------------------------------------
// Exact jets for 2-dimensional charts via forward-mode automatic
// differentiation. `f` is a generic callable (u, v) -> std::array<T, M>.
// ---------------------------------------------------------------------------

namespace detail {

template <std::size_t Order, class F>
Jet autodiff_jet_2d(const F& f, double u0, double v0) {
  namespace ad = boost::math::differentiation;
  auto vars = ad::make_ftuple<double, Order, Order>(u0, v0);
  using T = ad::promote<std::tuple_element_t<0, decltype(vars)>, std::tuple_element_t<1, decltype(vars)>>;
  const T u = std::get<0>(vars);
  const T v = std::get<1>(vars);
  const auto p = f(u, v);
  const int m = static_cast<int>(p.size());
  Jet jet(m, 2, static_cast<int>(Order));
  for (int c = 0; c < m; ++c) {
    const auto& pc = p[static_cast<std::size_t>(c)];
    jet.value(c) = pc.derivative(0, 0);
    jet.d1(c, 0) = pc.derivative(1, 0);
    jet.d1(c, 1) = pc.derivative(0, 1);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const int a = (i == 0) + (j == 0);
        jet.d2[static_cast<std::size_t>(i)](c, j) = pc.derivative(a, 2 - a);
      }
    if constexpr (Order >= 3) {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) {
            const int a = (i == 0) + (j == 0) + (k == 0);
            jet.d3[static_cast<std::size_t>(i * 2 + j)](c, k) = pc.derivative(a, 3 - a);
          }
    }
  }
  return jet;
}

}  // namespace detail

template <class F>
JetEvaluator autodiff_evaluator_2d(F f) {
  return [f](const Vec& x, int order) {
    return order >= 3 ? detail::autodiff_jet_2d<3>(f, x(0), x(1)) : detail::autodiff_jet_2d<2>(f, x(0), x(1));
  };
}

}  // namespace wsigma
