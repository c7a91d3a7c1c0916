#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wsigma {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tangent vectors fail to span an n-dimensional space at some point.
class DegenerateFrame : public Error {
 public:
  using Error::Error;
};

/// A sphere-ambient immersion left the unit sphere.
class AmbientViolation : public Error {
 public:
  using Error::Error;
};

/// The ambient is not a supported space form.
class UnsupportedAmbient : public Error {
 public:
  using Error::Error;
};

/// An operation restricted to one ambient kind was called on the other.
class WrongAmbient : public Error {
 public:
  using Error::Error;
};

class StepTooLarge : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Deterministic reduction and per-node parallelism
// ---------------------------------------------------------------------------

/// Pairwise (cascade) summation in a fixed order. The result depends only on
/// the input sequence, never on how it was produced.
inline double pairwise_sum(std::span<const double> xs) {
  constexpr std::size_t kBlock = 8;
  if (xs.size() <= kBlock) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

namespace detail {
inline std::atomic<int>& thread_setting() {
  static std::atomic<int> threads{1};
  return threads;
}
}  // namespace detail

/// Worker count used by per-node loops. Values < 1 are clamped to 1.
inline void set_thread_count(int n) { detail::thread_setting().store(std::max(1, n)); }
inline int thread_count() { return detail::thread_setting().load(); }

/// Runs fn(i) for i in [0, n). Each index is visited exactly once; fn must
/// only write to storage owned by index i. Results are therefore identical
/// for every thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::min<long>(thread_count(), static_cast<long>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// |a - b| / (1 + |b|): the relative residual used by all identity checks.
inline double relative_residual(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

inline double relative_residual(const Mat& a, const Mat& b) {
  return (a - b).norm() / (1.0 + b.norm());
}

}  // namespace wsigma
