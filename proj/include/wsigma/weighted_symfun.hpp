#pragma once

// Classical and weighted elementary symmetric polynomials.
//
// For a weight m and curvatures k = (k_1, ..., k_n) the weighted polynomials
// are the coefficients of the generating series
//
//     sum_r s_r(m, k) t^r = exp(m t) * prod_i (1 + k_i t),
//
// so s_r(m, k) = sum_{j=0}^{r} m^j / j! * sigma_{r-j}(k). Unlike the classical
// sigma_r they do not vanish for r > n.
//
// Every function here treats a negative index as an empty sum and returns 0.

#include "wsigma/core.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace wsigma {

/// The weight together with the curvature list it is applied to.
struct WeightedSpectrum {
  double weight = 0.0;
  std::vector<double> curvatures;

  int dim() const { return static_cast<int>(curvatures.size()); }

  /// Throws std::invalid_argument when n < 1 or an entry is not finite.
  void validate() const {
    if (curvatures.empty()) throw std::invalid_argument("WeightedSpectrum: need at least one curvature");
    if (!std::isfinite(weight)) throw std::invalid_argument("WeightedSpectrum: weight is not finite");
    for (double k : curvatures)
      if (!std::isfinite(k)) throw std::invalid_argument("WeightedSpectrum: curvature is not finite");
  }
};

/// (sigma_0, ..., sigma_{r_max}) of the curvature list, by expanding
/// prod_i (1 + k_i t) one factor at a time. Entries past n are 0.
inline std::vector<double> elementary_symmetric_all(std::span<const double> k, int r_max) {
  if (r_max < 0) return {};
  const int n = static_cast<int>(k.size());
  std::vector<double> e(static_cast<std::size_t>(std::max(r_max, n)) + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int r = i + 1; r >= 1; --r) e[static_cast<std::size_t>(r)] += k[static_cast<std::size_t>(i)] * e[static_cast<std::size_t>(r - 1)];
  e.resize(static_cast<std::size_t>(r_max) + 1);
  return e;
}

inline double elementary_symmetric(std::span<const double> k, int r) {
  if (r < 0 || r > static_cast<int>(k.size())) return 0.0;
  return elementary_symmetric_all(k, r)[static_cast<std::size_t>(r)];
}

/// Applies the exponential weight to a list of classical values:
/// out_r = sum_{j=0}^{r} m^j / j! * classical_{r-j}, classical_i = 0 past the list.
inline std::vector<double> weight_classical(double m, std::span<const double> classical, int r_max) {
  if (r_max < 0) return {};
  std::vector<double> out(static_cast<std::size_t>(r_max) + 1, 0.0);
  const int len = static_cast<int>(classical.size());
  for (int r = 0; r <= r_max; ++r) {
    double coeff = 1.0;  // m^j / j!
    double acc = 0.0;
    for (int j = 0; j <= r; ++j) {
      if (j > 0) coeff *= m / j;
      const int idx = r - j;
      if (idx < len) acc += coeff * classical[static_cast<std::size_t>(idx)];
    }
    out[static_cast<std::size_t>(r)] = acc;
  }
  return out;
}

/// Closed form s_r = sum_j m^j / j! sigma_{r-j}.
inline double sigma_weighted_closed(const WeightedSpectrum& s, int r) {
  if (r < 0) return 0.0;
  const auto classical = elementary_symmetric_all(s.curvatures, r);
  return weight_classical(s.weight, classical, r)[static_cast<std::size_t>(r)];
}

namespace detail {

// Double-double accumulator (error-free TwoSum / FMA-based TwoProd). Power
// sums grow like max|k|^r while the s_r they combine into stay small, so the
// power-sum recursion needs the extra 53 bits to stay at binary64 accuracy.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  static DoubleDouble two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
  }
  static DoubleDouble quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
  }

  friend DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
    DoubleDouble s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return quick_two_sum(s.hi, s.lo);
  }
  friend DoubleDouble operator-(DoubleDouble a) { return {-a.hi, -a.lo}; }
  friend DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
    const double p = a.hi * b.hi;
    const double e = std::fma(a.hi, b.hi, -p) + (a.hi * b.lo + a.lo * b.hi);
    return quick_two_sum(p, e);
  }
  friend DoubleDouble operator/(DoubleDouble a, double d) {
    const double q1 = a.hi / d;
    // remainder a - q1 * d, exactly via FMA
    const double r = std::fma(-q1, d, a.hi) + a.lo;
    return quick_two_sum(q1, r / d);
  }
  double value() const { return hi + lo; }
};

}  // namespace detail

/// Weighted Newton identity r s_r = m s_{r-1} + sum_{i=1}^{r} (-1)^{i-1} p_i s_{r-i},
/// with power sums p_i = sum_j k_j^i. Independent of the closed form; carried
/// out in double-double so the result is accurate to binary64.
inline std::vector<double> sigma_weighted_recursive_all(const WeightedSpectrum& s, int r_max) {
  using detail::DoubleDouble;
  if (r_max < 0) return {};
  const auto len = static_cast<std::size_t>(r_max) + 1;
  std::vector<DoubleDouble> p(len);
  for (double k : s.curvatures) {
    DoubleDouble pw{1.0, 0.0};
    for (std::size_t i = 1; i < len; ++i) {
      pw = pw * DoubleDouble{k, 0.0};
      p[i] = p[i] + pw;
    }
  }
  std::vector<DoubleDouble> acc(len);
  acc[0] = {1.0, 0.0};
  for (int r = 1; r <= r_max; ++r) {
    DoubleDouble sum = DoubleDouble{s.weight, 0.0} * acc[static_cast<std::size_t>(r - 1)];
    for (int i = 1; i <= r; ++i) {
      const DoubleDouble term = p[static_cast<std::size_t>(i)] * acc[static_cast<std::size_t>(r - i)];
      sum = sum + (i % 2 == 1 ? term : -term);
    }
    acc[static_cast<std::size_t>(r)] = sum / static_cast<double>(r);
  }
  std::vector<double> out(len);
  for (std::size_t r = 0; r < len; ++r) out[r] = acc[r].value();
  return out;
}

inline double sigma_weighted_recursive(const WeightedSpectrum& s, int r) {
  if (r < 0) return 0.0;
  return sigma_weighted_recursive_all(s, r)[static_cast<std::size_t>(r)];
}

/// (s_0, ..., s_{r_max}) in one pass.
inline std::vector<double> sigma_weighted_all(const WeightedSpectrum& s, int r_max) {
  if (r_max < 0) return {};
  return weight_classical(s.weight, elementary_symmetric_all(s.curvatures, r_max), r_max);
}

/// The inductive recursion without the weight term and without the 1/r
/// factor, kept only so reports can show where it departs from the closed
/// form (already at r = 1 whenever the weight is nonzero):
///   q_0 = 1,  q_r = q_{r-1} p_1 + sum_{i=1}^{r-1} (-1)^i q_{r-i-1} p_i.
inline double sigma_weighted_unnormalized_recursion(const WeightedSpectrum& s, int r) {
  if (r < 0) return 0.0;
  std::vector<double> p(static_cast<std::size_t>(r) + 1, 0.0);
  for (double k : s.curvatures) {
    double pw = 1.0;
    for (int i = 1; i <= r; ++i) {
      pw *= k;
      p[static_cast<std::size_t>(i)] += pw;
    }
  }
  std::vector<double> q(static_cast<std::size_t>(r) + 1, 0.0);
  q[0] = 1.0;
  for (int k = 1; k <= r; ++k) {
    double acc = q[static_cast<std::size_t>(k - 1)] * p[1];
    double sign = -1.0;
    for (int i = 1; i <= k - 1; ++i) {
      acc += sign * q[static_cast<std::size_t>(k - i - 1)] * p[static_cast<std::size_t>(i)];
      sign = -sign;
    }
    q[static_cast<std::size_t>(k)] = acc;
  }
  return q[static_cast<std::size_t>(r)];
}

/// Index-safe lookup into a list of s_r values (0 outside the list).
inline double at_index(std::span<const double> values, int r) {
  if (r < 0 || r >= static_cast<int>(values.size())) return 0.0;
  return values[static_cast<std::size_t>(r)];
}

}  // namespace wsigma
