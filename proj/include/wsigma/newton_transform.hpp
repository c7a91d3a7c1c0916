#pragma once

// Classical and weighted Newton transformations of a symmetric operator.
//
// Nothing here diagonalizes the operator. Classical sigma_k(A) come from the
// Faddeev-LeVerrier recurrence (k sigma_k = tr(A T_{k-1})), which keeps this
// module independent of the spectrum-based routines in weighted_symfun.

#include "wsigma/core.hpp"
#include "wsigma/weighted_symfun.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace wsigma {

/// An n x n operator written in an orthonormal frame. Construction checks
/// symmetry to 1e-12 relative and finiteness.
class SymmetricOperator {
 public:
  SymmetricOperator() = default;

  explicit SymmetricOperator(Mat m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
      throw std::invalid_argument("SymmetricOperator: matrix must be square and non-empty");
    if (!m_.allFinite()) throw std::invalid_argument("SymmetricOperator: non-finite entry");
    const double asym = (m_ - m_.transpose()).norm();
    if (asym > 1e-12 * (1.0 + m_.norm())) throw std::invalid_argument("SymmetricOperator: matrix is not symmetric");
  }

  static SymmetricOperator diagonal(const std::vector<double>& d) {
    return SymmetricOperator(Vec::Map(d.data(), static_cast<Eigen::Index>(d.size())).asDiagonal().toDenseMatrix());
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }

 private:
  Mat m_;
};

/// sigma_0..sigma_{r_max} of A via Faddeev-LeVerrier; entries past n are 0.
inline std::vector<double> classical_sigmas(const SymmetricOperator& op, int r_max) {
  if (r_max < 0) return {};
  const Mat& a = op.matrix();
  const int n = op.dim();
  std::vector<double> sigma(static_cast<std::size_t>(r_max) + 1, 0.0);
  sigma[0] = 1.0;
  Mat t = Mat::Identity(n, n);
  const int last = std::min(r_max, n);
  for (int k = 1; k <= last; ++k) {
    const Mat at = a * t;
    const double s = at.trace() / k;
    sigma[static_cast<std::size_t>(k)] = s;
    t = s * Mat::Identity(n, n) - at;
  }
  return sigma;
}

/// s_0..s_{r_max} of (weight, A), from the classical values above.
inline std::vector<double> weighted_sigmas(const SymmetricOperator& op, double weight, int r_max) {
  if (r_max < 0) return {};
  return weight_classical(weight, classical_sigmas(op, r_max), r_max);
}

/// T_r(A) by T_0 = I, T_k = sigma_k I - A T_{k-1}. Zero for r >= n and r < 0.
inline Mat newton_classical(const SymmetricOperator& op, int r) {
  const int n = op.dim();
  if (r < 0 || r >= n) return Mat::Zero(n, n);
  const Mat& a = op.matrix();
  Mat t = Mat::Identity(n, n);
  for (int k = 1; k <= r; ++k) {
    const Mat at = a * t;
    t = (at.trace() / k) * Mat::Identity(n, n) - at;
  }
  return t;
}

/// T_r^w(A) = sum_{j=0}^{r} (-1)^j s_{r-j} A^j, powers accumulated by
/// repeated multiplication. Zero for r < 0.
inline Mat newton_weighted(const SymmetricOperator& op, double weight, int r) {
  const int n = op.dim();
  if (r < 0) return Mat::Zero(n, n);
  const auto s = weighted_sigmas(op, weight, r);
  const Mat& a = op.matrix();
  Mat power = Mat::Identity(n, n);
  Mat out = s[static_cast<std::size_t>(r)] * power;
  double sign = 1.0;
  for (int j = 1; j <= r; ++j) {
    power = power * a;
    sign = -sign;
    out += (sign * s[static_cast<std::size_t>(r - j)]) * power;
  }
  return out;
}

/// Second route: sum_{l=0}^{r} weight^l / l! T_{r-l}(A).
inline Mat newton_weighted_expansion(const SymmetricOperator& op, double weight, int r) {
  const int n = op.dim();
  Mat out = Mat::Zero(n, n);
  if (r < 0) return out;
  double coeff = 1.0;
  for (int l = 0; l <= r; ++l) {
    if (l > 0) coeff *= weight / l;
    if (r - l < n) out += coeff * newton_classical(op, r - l);
  }
  return out;
}

/// Third route: T_0^w = I, T_k^w = s_k I - A T_{k-1}^w.
inline Mat newton_weighted_recurrence(const SymmetricOperator& op, double weight, int r) {
  const int n = op.dim();
  if (r < 0) return Mat::Zero(n, n);
  const auto s = weighted_sigmas(op, weight, r);
  Mat t = Mat::Identity(n, n);
  for (int k = 1; k <= r; ++k) t = s[static_cast<std::size_t>(k)] * Mat::Identity(n, n) - op.matrix() * t;
  return t;
}

/// A matrix trace next to the closed form it is supposed to equal.
struct TraceIdentity {
  double trace = 0.0;
  double closed_form = 0.0;
  double residual() const { return relative_residual(trace, closed_form); }
};

/// tr(A T_r^w) against (r+1) s_{r+1} - weight s_r.
inline TraceIdentity trace_A_T(const SymmetricOperator& op, double weight, int r) {
  const auto s = weighted_sigmas(op, weight, r + 1);
  TraceIdentity out;
  out.trace = (op.matrix() * newton_weighted(op, weight, r)).trace();
  out.closed_form = (r + 1) * at_index(s, r + 1) - weight * at_index(s, r);
  return out;
}

/// tr(T_r^w) against (n - r) s_r + weight s_{r-1}.
inline TraceIdentity trace_T_weighted(const SymmetricOperator& op, double weight, int r) {
  const auto s = weighted_sigmas(op, weight, std::max(r, 0));
  TraceIdentity out;
  out.trace = newton_weighted(op, weight, r).trace();
  out.closed_form = (op.dim() - r) * at_index(s, r) + weight * at_index(s, r - 1);
  return out;
}

/// tr(A^2 T_r^w) against s_1 s_{r+1} - (r+2) s_{r+2}.
inline TraceIdentity trace_A2_T(const SymmetricOperator& op, double weight, int r) {
  const auto s = weighted_sigmas(op, weight, std::max(r + 2, 1));
  const Mat& a = op.matrix();
  TraceIdentity out;
  out.trace = (a * a * newton_weighted(op, weight, r)).trace();
  out.closed_form = at_index(s, 1) * at_index(s, r + 1) - (r + 2) * at_index(s, r + 2);
  return out;
}

}  // namespace wsigma
