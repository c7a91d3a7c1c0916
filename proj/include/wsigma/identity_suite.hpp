#pragma once

// Randomized algebraic identity suites over weighted symmetric functions and
// weighted Newton transformations. Deterministic for a given seed.

#include "wsigma/newton_transform.hpp"
#include "wsigma/weighted_symfun.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace wsigma {

struct IdentitySuiteOptions {
  std::uint64_t seed = 20240611;
  int instances = 1000;
  int n_max = 8;
  double entry_bound = 2.0;   // eigenvalues / curvatures in [-bound, bound]
  double weight_bound = 1.5;  // mu0 in [-bound, bound]
  double tolerance = 1e-11;
  /// Test hook: perturb one closed-form sigma by 1e-6 (relative) in the
  /// first instance of the weighted-sigma suite.
  bool inject_fault = false;
};

struct IdentityResult {
  std::string name;
  std::string description;
  int instances = 0;
  int evaluations = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  int worst_instance = -1;
  bool passed() const { return max_residual <= tolerance; }
};

struct IdentityInstance {
  int index = 0;
  double weight = 0.0;
  SymmetricOperator op;
  std::vector<double> spectrum;
};

namespace detail {

/// Instance i of a suite: its own generator seeded from (seed, suite, i), so
/// suites and instances do not depend on each other's consumption.
inline IdentityInstance make_instance(const IdentitySuiteOptions& opt, std::uint64_t suite, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                    static_cast<std::uint32_t>(suite), static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> entry(-opt.entry_bound, opt.entry_bound);
  std::uniform_real_distribution<double> weight(-opt.weight_bound, opt.weight_bound);
  std::uniform_int_distribution<int> dim(1, opt.n_max);
  const int n = dim(rng);
  // A = Q diag(k) Q^T with Q orthogonal (QR of a Gaussian matrix).
  std::normal_distribution<double> gauss;
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gauss(rng);
  const Mat q = Eigen::HouseholderQR<Mat>(g).householderQ();
  Vec k(n);
  for (int i = 0; i < n; ++i) k(i) = entry(rng);
  Mat m = q * k.asDiagonal() * q.transpose();
  m = 0.5 * (m + m.transpose());
  IdentityInstance out{index, weight(rng), SymmetricOperator(m), {}};
  out.spectrum.resize(static_cast<std::size_t>(n));
  for (auto& x : out.spectrum) x = entry(rng);
  return out;
}

/// Runs `check` (returning the worst residual over r for one instance) on
/// every instance.
inline IdentityResult run_suite(const IdentitySuiteOptions& opt, std::uint64_t id, std::string name,
                                std::string description,
                                const std::function<double(const IdentityInstance&, int& evaluations)>& check) {
  IdentityResult res;
  res.name = std::move(name);
  res.description = std::move(description);
  res.tolerance = opt.tolerance;
  res.instances = opt.instances;
  for (int i = 0; i < opt.instances; ++i) {
    const double r = check(make_instance(opt, id, i), res.evaluations);
    if (!(r <= res.max_residual)) {  // NaN counts as worst
      res.max_residual = std::isnan(r) ? std::numeric_limits<double>::infinity() : r;
      res.worst_instance = i;
    }
  }
  return res;
}

}  // namespace detail

inline std::vector<IdentityResult> run_identity_suites(const IdentitySuiteOptions& opt) {
  if (opt.instances < 1 || opt.n_max < 1) throw std::invalid_argument("identity suites: need instances, n_max >= 1");
  std::vector<IdentityResult> out;

  out.push_back(detail::run_suite(
      opt, 1, "weighted_sigma_recursion",
      "closed form sum_j mu0^j/j! s_{r-j} vs the weighted Newton recursion, r = 0..n+2",
      [&](const IdentityInstance& in, int& evals) {
        const WeightedSpectrum s{in.weight, in.spectrum};
        const int n = s.dim();
        const auto rec = sigma_weighted_recursive_all(s, n + 2);
        double worst = 0.0;
        for (int r = 0; r <= n + 2; ++r) {
          double closed = sigma_weighted_closed(s, r);
          if (opt.inject_fault && in.index == 0 && r == 1) closed += 1e-6 * (1.0 + std::abs(closed));
          worst = std::max(worst, relative_residual(closed, rec[static_cast<std::size_t>(r)]));
          ++evals;
        }
        return worst;
      }));

  out.push_back(detail::run_suite(
      opt, 2, "newton_three_routes",
      "weighted Newton tensor: defining sum vs expansion in classical tensors vs recurrence, r = 0..n",
      [&](const IdentityInstance& in, int& evals) {
        double worst = 0.0;
        for (int r = 0; r <= in.op.dim(); ++r) {
          const Mat a = newton_weighted(in.op, in.weight, r);
          worst = std::max(worst, relative_residual(newton_weighted_expansion(in.op, in.weight, r), a));
          worst = std::max(worst, relative_residual(newton_weighted_recurrence(in.op, in.weight, r), a));
          ++evals;
        }
        return worst;
      }));

  auto trace_suite = [&](std::uint64_t id, const char* name, const char* desc,
                         TraceIdentity (*fn)(const SymmetricOperator&, double, int)) {
    out.push_back(detail::run_suite(opt, id, name, desc, [&, fn](const IdentityInstance& in, int& evals) {
      double worst = 0.0;
      for (int r = 0; r <= in.op.dim(); ++r) {
        worst = std::max(worst, fn(in.op, in.weight, r).residual());
        ++evals;
      }
      return worst;
    }));
  };
  trace_suite(3, "trace_A_T", "tr(A T_r) = (r+1) s_{r+1} - mu0 s_r", &trace_A_T);
  trace_suite(4, "trace_T", "tr(T_r) = (n-r) s_r + mu0 s_{r-1}", &trace_T_weighted);
  trace_suite(5, "trace_A2_T", "tr(A^2 T_r) = s_1 s_{r+1} - (r+2) s_{r+2}", &trace_A2_T);
  return out;
}

/// Worst relative gap at r = 1 between the recursion without weight term and
/// 1/r factor and the closed form, over the given weights; it is |mu0|/(1+|s_1|)
/// and so non-zero whenever mu0 != 0.
inline double unnormalized_recursion_gap(const std::vector<double>& weights, const std::vector<double>& curvatures) {
  double worst = 0.0;
  for (double w : weights) {
    const WeightedSpectrum s{w, curvatures};
    worst = std::max(worst, relative_residual(sigma_weighted_unnormalized_recursion(s, 1), sigma_weighted_closed(s, 1)));
  }
  return worst;
}

}  // namespace wsigma
