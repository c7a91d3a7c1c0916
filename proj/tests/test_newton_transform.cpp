#include "wsigma/newton_transform.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wsigma;

namespace {

double rel_dist(const Mat& a, const Mat& b) { return (a - b).norm() / (1.0 + b.norm()); }

const SymmetricOperator kDiag12 = SymmetricOperator::diagonal({1.0, 2.0});

}  // namespace

TEST(SymmetricOperator, RejectsAsymmetricOrNonFinite) {
  Mat m(2, 2);
  m << 1, 2, 3, 4;
  EXPECT_THROW(SymmetricOperator{m}, std::invalid_argument);
  m << 1, NAN, NAN, 4;
  EXPECT_THROW(SymmetricOperator{m}, std::invalid_argument);
  EXPECT_THROW(SymmetricOperator{Mat(2, 3)}, std::invalid_argument);
}

TEST(NewtonClassical, Examples) {
  EXPECT_TRUE(newton_classical(kDiag12, 0).isApprox(Mat::Identity(2, 2)));
  Mat expected = Vec::Map(std::vector<double>{2.0, 1.0}.data(), 2).asDiagonal();
  EXPECT_TRUE(newton_classical(kDiag12, 1).isApprox(expected));
  EXPECT_EQ(newton_classical(kDiag12, 2), Mat::Zero(2, 2));
  EXPECT_EQ(newton_classical(kDiag12, 5), Mat::Zero(2, 2));
}

TEST(NewtonClassical, FaddeevSigmasMatchSubsets) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    const Mat a = oracle::random_symmetric(rng, n, 2.0);
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + n);
    const auto s = classical_sigmas(SymmetricOperator(a), n + 2);
    for (int r = 0; r <= n + 2; ++r) EXPECT_NEAR(s[r], oracle::sigma_by_subsets(lam, r), 1e-11);
  }
}

TEST(NewtonWeighted, Examples) {
  EXPECT_TRUE(newton_weighted(kDiag12, 0.0, 1).isApprox(newton_classical(kDiag12, 1)));
  Mat expected = Vec::Map(std::vector<double>{3.0, 2.0}.data(), 2).asDiagonal();
  EXPECT_TRUE(newton_weighted(kDiag12, 1.0, 1).isApprox(expected));
  EXPECT_TRUE(newton_weighted(kDiag12, -0.4, 0).isApprox(Mat::Identity(2, 2)));
  EXPECT_EQ(newton_weighted(kDiag12, 1.0, -1), Mat::Zero(2, 2));
}

TEST(NewtonWeighted, ZeroWeightReducesToClassical) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    const SymmetricOperator a(oracle::random_symmetric(rng, n, 1.0));
    for (int r = 0; r <= n + 1; ++r) EXPECT_LE(rel_dist(newton_weighted(a, 0.0, r), newton_classical(a, r)), 1e-12);
  }
}

TEST(NewtonWeighted, ThreeRoutesAgree) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 6;
    const SymmetricOperator a(oracle::random_symmetric(rng, n, 1.0));
    const double m = w(rng);
    for (int r = 0; r <= n + 2; ++r) {
      const Mat sum = newton_weighted(a, m, r);
      const Mat expansion = newton_weighted_expansion(a, m, r);
      const Mat recurrence = newton_weighted_recurrence(a, m, r);
      worst = std::max({worst, rel_dist(sum, expansion), rel_dist(sum, recurrence), rel_dist(expansion, recurrence)});
    }
  }
  EXPECT_LE(worst, 1e-11);
}

TEST(NewtonWeighted, MatchesEigenOracle) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 5;
    const Mat a = oracle::random_symmetric(rng, n, 1.0);
    const double m = w(rng);
    for (int r = 0; r <= n + 1; ++r)
      EXPECT_LE(rel_dist(newton_weighted(SymmetricOperator(a), m, r), oracle::newton_by_eigen(a, m, r)), 1e-11);
  }
}

TEST(NewtonWeighted, SymmetricCommutesAndFrameInvariant) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 5;
    const Mat a = oracle::random_symmetric(rng, n, 1.0);
    const Mat q = oracle::random_orthogonal(rng, n);
    const double m = 0.5 - 0.01 * trial;
    for (int r = 0; r <= n; ++r) {
      const Mat t = newton_weighted(SymmetricOperator(a), m, r);
      const double scale = 1.0 + t.norm() * (1.0 + a.norm());
      EXPECT_LE((t - t.transpose()).norm(), 1e-12 * scale);
      EXPECT_LE((a * t - t * a).norm(), 1e-11 * scale);
      const Mat qaq = q * a * q.transpose();
      const Mat rotated = newton_weighted(SymmetricOperator(0.5 * (qaq + qaq.transpose())), m, r);
      EXPECT_LE((rotated - q * t * q.transpose()).norm(), 1e-10 * scale);
    }
  }
}

TEST(TraceIdentities, Examples) {
  const auto at = trace_A_T(kDiag12, 1.0, 1);
  EXPECT_DOUBLE_EQ(at.trace, 7.0);
  EXPECT_DOUBLE_EQ(at.closed_form, 7.0);

  const auto tt = trace_T_weighted(kDiag12, 1.0, 1);
  EXPECT_DOUBLE_EQ(tt.trace, 5.0);
  EXPECT_DOUBLE_EQ(tt.closed_form, 5.0);
  EXPECT_DOUBLE_EQ(trace_T_weighted(kDiag12, 0.3, 0).trace, 2.0);

  const auto a2 = trace_A2_T(kDiag12, 0.0, 0);
  EXPECT_DOUBLE_EQ(a2.trace, 5.0);
  EXPECT_DOUBLE_EQ(a2.closed_form, 5.0);
  const auto b2 = trace_A2_T(SymmetricOperator::diagonal({1.0, 1.0}), 1.0, 0);
  EXPECT_DOUBLE_EQ(b2.trace, 2.0);
  EXPECT_DOUBLE_EQ(b2.closed_form, 2.0);
}

TEST(TraceIdentities, ClassicalLimits) {
  const SymmetricOperator a = SymmetricOperator::diagonal({0.5, -1.0, 2.0});
  // (r+1) sigma_{r+1} for zero weight; zero once r >= n.
  EXPECT_NEAR(trace_A_T(a, 0.0, 1).trace, 2.0 * oracle::sigma_by_subsets({0.5, -1.0, 2.0}, 2), 1e-14);
  EXPECT_NEAR(trace_A_T(a, 0.0, 3).trace, 0.0, 1e-14);
  EXPECT_NEAR(trace_T_weighted(a, 0.0, 2).trace, 1.0 * oracle::sigma_by_subsets({0.5, -1.0, 2.0}, 2), 1e-14);
  EXPECT_NEAR(trace_A2_T(a, 0.0, 4).trace, 0.0, 1e-14);
  EXPECT_NEAR(trace_A2_T(a, 0.0, 4).closed_form, 0.0, 1e-14);
}

TEST(TraceIdentities, HoldOnRandomOperators) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 6;
    const SymmetricOperator a(oracle::random_symmetric(rng, n, 1.0));
    const double m = w(rng);
    for (int r = 0; r <= n + 2; ++r)
      worst = std::max({worst, trace_A_T(a, m, r).residual(), trace_T_weighted(a, m, r).residual(),
                        trace_A2_T(a, m, r).residual()});
  }
  EXPECT_LE(worst, 1e-11);
}
