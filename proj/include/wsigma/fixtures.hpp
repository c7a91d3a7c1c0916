#pragma once

// Built-in analytic hypersurfaces and a by-name registry.
//
// Closed convex fixtures are oriented by the inward normal so that their
// principal curvatures are positive.

#include "wsigma/geometry.hpp"
#include "wsigma/immersion.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace wsigma {

namespace detail {

constexpr double kPi = std::numbers::pi;

inline std::vector<ChartAxis> sphere_chart() {
  return {ChartAxis{0.0, kPi, AxisRule::PolarAngle}, ChartAxis{0.0, 2.0 * kPi, AxisRule::Periodic}};
}

inline std::vector<ChartAxis> torus_chart() {
  return {ChartAxis{0.0, 2.0 * kPi, AxisRule::Periodic}, ChartAxis{0.0, 2.0 * kPi, AxisRule::Periodic}};
}

/// Orientation (+1/-1) under which the normal at x points along `desired`.
inline int orientation_toward(const JetEvaluator& eval, const AmbientSpace& ambient, const Vec& x,
                              const Vec& desired) {
  const Vec n = frame_cross_product(eval(x, 2), ambient);
  return n.dot(desired) >= 0.0 ? 1 : -1;
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace detail

/// Round sphere of radius R in E^3, (theta, phi) chart.
inline ParametricImmersion euclidean_sphere(double R) {
  if (!(R > 0.0)) throw std::invalid_argument("sphere: R must be positive");
  auto f = [R](const auto& th, const auto& ph) {
    using std::cos;
    using std::sin;
    using T = std::decay_t<decltype(th * ph)>;
    const T st = sin(th);
    return std::array<T, 3>{R * st * cos(ph), R * st * sin(ph), R * cos(th)};
  };
  JetEvaluator eval = autodiff_evaluator_2d(f);
  const auto amb = AmbientSpace::euclidean(2);
  const Vec x = detail::vec({1.0, 0.5});
  const int o = detail::orientation_toward(eval, amb, x, -eval(x, 2).value);
  std::ostringstream name;
  name << "sphere R=" << R;
  return {name.str(), amb, detail::sphere_chart(), eval, 2.0 * R, o};
}

inline ParametricImmersion ellipsoid(double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw std::invalid_argument("ellipsoid: semi-axes must be positive");
  auto f = [a, b, c](const auto& th, const auto& ph) {
    using std::cos;
    using std::sin;
    using T = std::decay_t<decltype(th * ph)>;
    const T st = sin(th);
    return std::array<T, 3>{a * st * cos(ph), b * st * sin(ph), c * cos(th)};
  };
  JetEvaluator eval = autodiff_evaluator_2d(f);
  const auto amb = AmbientSpace::euclidean(2);
  const Vec x = detail::vec({1.0, 0.5});
  const int o = detail::orientation_toward(eval, amb, x, -eval(x, 2).value);
  std::ostringstream name;
  name << "ellipsoid a=" << a << " b=" << b << " c=" << c;
  return {name.str(), amb, detail::sphere_chart(), eval, 2.0 * std::max({a, b, c}), o};
}

/// Torus of revolution: tube radius b around a circle of radius a, chart
/// (u, v) with v the tube angle (v = 0 is the outer equator).
inline ParametricImmersion torus(double a, double b) {
  if (!(a > b && b > 0.0)) throw std::invalid_argument("torus: need a > b > 0");
  auto f = [a, b](const auto& u, const auto& v) {
    using std::cos;
    using std::sin;
    using T = std::decay_t<decltype(u * v)>;
    const T rho = a + b * cos(v);
    return std::array<T, 3>{rho * cos(u), rho * sin(u), b * sin(v)};
  };
  JetEvaluator eval = autodiff_evaluator_2d(f);
  const auto amb = AmbientSpace::euclidean(2);
  const Vec x = detail::vec({0.3, 0.0});
  // toward the core circle
  const Vec p = eval(x, 2).value;
  const Vec core = detail::vec({a * std::cos(0.3), a * std::sin(0.3), 0.0});
  const int o = detail::orientation_toward(eval, amb, x, core - p);
  std::ostringstream name;
  name << "torus a=" << a << " b=" << b;
  return {name.str(), amb, detail::torus_chart(), eval, 2.0 * (a + b), o};
}

/// Graph x_{n+1} = h(x) over the box [0, 2 pi)^n with
///   h(x) = sum_i (slope_i x_i + amp_i sin x_i) + mix cos(x_1 - x_2).
/// With zero slopes it is a closed hypersurface of the flat quotient; with
/// zero amplitudes it is an affine (flat) piece. Normal points up.
struct GraphParams {
  int n = 2;
  std::vector<double> slope;
  std::vector<double> amp;
  double mix = 0.0;
};

inline ParametricImmersion periodic_graph(const GraphParams& prm) {
  const int n = prm.n;
  if (n < 1) throw std::invalid_argument("graph: n must be >= 1");
  auto get = [](const std::vector<double>& v, int i) {
    return i < static_cast<int>(v.size()) ? v[static_cast<std::size_t>(i)] : 0.0;
  };
  std::vector<double> slope(static_cast<std::size_t>(n)), amp(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    slope[static_cast<std::size_t>(i)] = get(prm.slope, i);
    amp[static_cast<std::size_t>(i)] = get(prm.amp, i);
  }
  const double mix = n >= 2 ? prm.mix : 0.0;

  JetEvaluator eval = [n, slope, amp, mix](const Vec& x, int order) {
    Jet jet(n + 1, n, order >= 3 ? 3 : 2);
    const auto N = static_cast<std::size_t>(n);
    double h = 0.0;
    Vec dh = Vec::Zero(n);
    Mat d2h = Mat::Zero(n, n);
    std::vector<Mat> d3h(N, Mat::Zero(n, n));
    for (int i = 0; i < n; ++i) {
      const double s = std::sin(x(i));
      const double c = std::cos(x(i));
      h += slope[static_cast<std::size_t>(i)] * x(i) + amp[static_cast<std::size_t>(i)] * s;
      dh(i) += slope[static_cast<std::size_t>(i)] + amp[static_cast<std::size_t>(i)] * c;
      d2h(i, i) += -amp[static_cast<std::size_t>(i)] * s;
      d3h[static_cast<std::size_t>(i)](i, i) += -amp[static_cast<std::size_t>(i)] * c;
    }
    if (mix != 0.0) {
      // mix cos(x0 - x1); derivative signs e = (+1, -1)
      const double d = x(0) - x(1);
      const double c = std::cos(d);
      const double s = std::sin(d);
      const double e[2] = {1.0, -1.0};
      h += mix * c;
      for (int i = 0; i < 2; ++i) {
        dh(i) += -mix * s * e[i];
        for (int j = 0; j < 2; ++j) {
          d2h(i, j) += -mix * c * e[i] * e[j];
          for (int k = 0; k < 2; ++k) d3h[static_cast<std::size_t>(i)](j, k) += mix * s * e[i] * e[j] * e[k];
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      jet.value(i) = x(i);
      jet.d1(i, i) = 1.0;
    }
    jet.value(n) = h;
    jet.d1.row(n) = dh.transpose();
    for (int i = 0; i < n; ++i) {
      jet.d2[static_cast<std::size_t>(i)].row(n) = d2h.row(i);
      if (jet.order >= 3)
        for (int j = 0; j < n; ++j) jet.d3[static_cast<std::size_t>(i * n + j)].row(n) = d3h[static_cast<std::size_t>(i)].row(j);
    }
    return jet;
  };
  const std::vector<ChartAxis> axes(static_cast<std::size_t>(n), ChartAxis{0.0, 2.0 * detail::kPi, AxisRule::Periodic});
  std::ostringstream name;
  name << "graph n=" << n;
  return {name.str(), AmbientSpace::euclidean(n), axes, eval, 2.0 * detail::kPi, 1};
}

/// Geodesic sphere of geodesic radius rho about the pole e_4 of S^3. The
/// inward normal points toward the pole; rho = pi/2 is a great sphere.
inline ParametricImmersion geodesic_sphere(double rho) {
  if (!(rho > 0.0 && rho < detail::kPi)) throw std::invalid_argument("geodesic_sphere: need 0 < rho < pi");
  const double sr = std::sin(rho);
  const double cr = std::cos(rho);
  auto f = [sr, cr](const auto& th, const auto& ph) {
    using std::cos;
    using std::sin;
    using T = std::decay_t<decltype(th * ph)>;
    const T st = sin(th);
    return std::array<T, 4>{sr * st * cos(ph), sr * st * sin(ph), sr * cos(th), T(cr)};
  };
  JetEvaluator eval = autodiff_evaluator_2d(f);
  const auto amb = AmbientSpace::unit_sphere(2);
  const Vec x = detail::vec({1.0, 0.5});
  const Vec p = eval(x, 2).value;
  // -d psi / d rho: decreasing the geodesic radius
  Vec toward_pole(4);
  toward_pole.head(3) = -cr * p.head(3) / sr;
  toward_pole(3) = sr;
  const int o = detail::orientation_toward(eval, amb, x, toward_pole);
  std::ostringstream name;
  name << "geodesic_sphere rho=" << rho;
  return {name.str(), amb, detail::sphere_chart(), eval, 2.0 * sr, o};
}

/// Product torus S^1(a) x S^1(b) in S^3 with a^2 + b^2 = 1. Oriented so the
/// normal is (b cos u, b sin u, -a cos v, -a sin v): curvatures -b/a and a/b.
inline ParametricImmersion clifford_torus(double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("clifford_torus: need 0 < a < 1");
  const double b = std::sqrt(1.0 - a * a);
  auto f = [a, b](const auto& u, const auto& v) {
    using std::cos;
    using std::sin;
    using T = std::decay_t<decltype(u * v)>;
    return std::array<T, 4>{a * cos(u), a * sin(u), b * cos(v), b * sin(v)};
  };
  JetEvaluator eval = autodiff_evaluator_2d(f);
  const auto amb = AmbientSpace::unit_sphere(2);
  const Vec x = detail::vec({0.4, 1.1});
  const Vec desired =
      detail::vec({b * std::cos(0.4), b * std::sin(0.4), -a * std::cos(1.1), -a * std::sin(1.1)});
  const int o = detail::orientation_toward(eval, amb, x, desired);
  std::ostringstream name;
  name << "clifford_torus a=" << a;
  return {name.str(), amb, detail::torus_chart(), eval, 2.0, o};
}

// ---------------------------------------------------------------------------
// Radial graphs over S^2: a profile rho(omega) given as a polynomial in the
// components of the unit direction omega = (x, y, z).
//   Euclidean:  psi = rho(omega) omega
//   Sphere:     psi = (sin rho(omega) omega, cos rho(omega))
// ---------------------------------------------------------------------------

struct RadialProfile {
  std::vector<std::array<int, 3>> exponents;
  std::vector<double> coeffs;

  /// All monomials x^a y^b z^c with a + b + c <= degree, zero coefficients.
  static RadialProfile of_degree(int degree) {
    RadialProfile p;
    for (int d = 0; d <= degree; ++d)
      for (int a = d; a >= 0; --a)
        for (int b = d - a; b >= 0; --b) p.exponents.push_back({a, b, d - a - b});
    p.coeffs.assign(p.exponents.size(), 0.0);
    return p;
  }

  static RadialProfile constant(double value, int degree = 0) {
    RadialProfile p = of_degree(degree);
    p.coeffs[0] = value;
    return p;
  }

  std::size_t size() const { return coeffs.size(); }

  /// Index of a monomial, or -1.
  int find(int a, int b, int c) const {
    for (std::size_t i = 0; i < exponents.size(); ++i)
      if (exponents[i] == std::array<int, 3>{a, b, c}) return static_cast<int>(i);
    return -1;
  }

  /// Value of monomial i at a direction.
  double monomial(std::size_t i, const Vec& w) const {
    const auto& e = exponents[i];
    return std::pow(w(0), e[0]) * std::pow(w(1), e[1]) * std::pow(w(2), e[2]);
  }

  double operator()(const Vec& w) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += coeffs[i] * monomial(i, w);
    return s;
  }

  template <class T>
  T evaluate(const T& x, const T& y, const T& z) const {
    T total = 0.0 * x;
    for (std::size_t i = 0; i < size(); ++i) {
      if (coeffs[i] == 0.0) continue;
      T term = 0.0 * x + coeffs[i];
      for (int k = 0; k < exponents[i][0]; ++k) term = term * x;
      for (int k = 0; k < exponents[i][1]; ++k) term = term * y;
      for (int k = 0; k < exponents[i][2]; ++k) term = term * z;
      total = total + term;
    }
    return total;
  }
};

inline Vec unit_direction(const Vec& chart) {
  const double st = std::sin(chart(0));
  return detail::vec({st * std::cos(chart(1)), st * std::sin(chart(1)), std::cos(chart(0))});
}

inline ParametricImmersion radial_graph(const RadialProfile& profile, AmbientKind kind) {
  JetEvaluator eval;
  double scale = 0.0;
  for (double c : profile.coeffs) scale += std::abs(c);
  if (kind == AmbientKind::Euclidean) {
    eval = autodiff_evaluator_2d([profile](const auto& th, const auto& ph) {
      using std::cos;
      using std::sin;
      using T = std::decay_t<decltype(th * ph)>;
      const T st = sin(th);
      const T x = st * cos(ph);
      const T y = st * sin(ph);
      const T z = cos(th);
      const T rho = profile.evaluate(x, y, z);
      return std::array<T, 3>{rho * x, rho * y, rho * z};
    });
  } else {
    eval = autodiff_evaluator_2d([profile](const auto& th, const auto& ph) {
      using std::cos;
      using std::sin;
      using T = std::decay_t<decltype(th * ph)>;
      const T st = sin(th);
      const T x = st * cos(ph);
      const T y = st * sin(ph);
      const T z = cos(th);
      const T rho = profile.evaluate(x, y, z);
      const T sr = sin(rho);
      return std::array<T, 4>{sr * x, sr * y, sr * z, cos(rho)};
    });
  }
  const auto amb = kind == AmbientKind::Euclidean ? AmbientSpace::euclidean(2) : AmbientSpace::unit_sphere(2);
  const Vec x = detail::vec({1.0, 0.5});
  const Vec w = unit_direction(x);
  const double rho = profile(w);
  Vec desired;
  if (kind == AmbientKind::Euclidean) {
    desired = -w;
  } else {
    desired = Vec::Zero(4);
    desired.head(3) = -std::cos(rho) * w;
    desired(3) = std::sin(rho);
  }
  const int o = detail::orientation_toward(eval, amb, x, desired);
  return {kind == AmbientKind::Euclidean ? "radial_graph" : "radial_graph_sphere", amb, detail::sphere_chart(), eval,
          kind == AmbientKind::Euclidean ? 2.0 * scale : 2.0, o};
}

// ---------------------------------------------------------------------------
// Registry: "sphere R=1.0", "torus a=2 b=1", ...
// ---------------------------------------------------------------------------

using FixtureParams = std::map<std::string, double>;

struct FixtureInfo {
  std::string name;
  std::string description;
  FixtureParams defaults;
};

inline const std::vector<FixtureInfo>& fixture_catalog() {
  static const std::vector<FixtureInfo> catalog = {
      {"sphere", "round sphere in E^3", {{"R", 1.0}}},
      {"ellipsoid", "ellipsoid in E^3", {{"a", 1.0}, {"b", 1.2}, {"c", 0.8}}},
      {"torus", "torus of revolution in E^3", {{"a", 2.0}, {"b", 1.0}}},
      {"graph", "periodic graph over [0,2pi)^n in E^{n+1}",
       {{"n", 2}, {"amp", 0.3}, {"mix", 0.0}, {"slope", 0.0}}},
      {"geodesic_sphere", "geodesic sphere in S^3", {{"rho", 1.0}}},
      {"great_sphere", "totally geodesic sphere in S^3", {}},
      {"clifford_torus", "product torus S^1(a) x S^1(sqrt(1-a^2)) in S^3", {{"a", std::sqrt(0.5)}}},
  };
  return catalog;
}

class FixtureError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline ParametricImmersion build_fixture(const std::string& name, FixtureParams p) {
  if (name == "sphere") return euclidean_sphere(p["R"]);
  if (name == "ellipsoid") return ellipsoid(p["a"], p["b"], p["c"]);
  if (name == "torus") return torus(p["a"], p["b"]);
  if (name == "graph") {
    const int n = static_cast<int>(p["n"]);
    if (n != p["n"] || n < 1) throw std::invalid_argument("graph: n must be a positive integer");
    GraphParams g;
    g.n = n;
    g.amp.assign(static_cast<std::size_t>(n), p["amp"]);
    g.slope.assign(static_cast<std::size_t>(n), p["slope"]);
    g.mix = p["mix"];
    return periodic_graph(g);
  }
  if (name == "geodesic_sphere") return geodesic_sphere(p["rho"]);
  if (name == "great_sphere") return geodesic_sphere(detail::kPi / 2.0).renamed("great_sphere");
  return clifford_torus(p["a"]);
}

}  // namespace detail

inline ParametricImmersion make_fixture(const std::string& name, const FixtureParams& given) {
  const FixtureInfo* info = nullptr;
  for (const auto& f : fixture_catalog())
    if (f.name == name) info = &f;
  if (!info) throw FixtureError("unknown fixture '" + name + "'");
  FixtureParams p = info->defaults;
  for (const auto& [k, v] : given) {
    if (!p.count(k)) throw FixtureError("fixture '" + name + "' has no parameter '" + k + "'");
    p[k] = v;
  }
  try {
    return detail::build_fixture(name, p);
  } catch (const std::invalid_argument& e) {
    throw FixtureError(e.what());
  }
}

/// Parses "name key=value key=value".
inline ParametricImmersion make_fixture(const std::string& spec) {
  std::istringstream in(spec);
  std::string name;
  if (!(in >> name)) throw FixtureError("empty fixture description");
  FixtureParams params;
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw FixtureError("expected key=value, got '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != val.size() || val.empty()) throw FixtureError("bad number '" + val + "' for " + key);
    params[key] = x;
  }
  return make_fixture(name, params);
}

}  // namespace wsigma
