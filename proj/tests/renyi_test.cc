// Copyright 2026 The DDPPM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "ddppm/renyi.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "test_util.h"

namespace ddppm::privacy {
namespace {

GaussianDist Dist(Vector mean, Matrix cov) {
  return GaussianDist{std::move(mean), std::move(cov), std::nullopt};
}

GaussianDist Scalar(double mean, double var) {
  return Dist(Vector::Constant(1, mean), Matrix::Constant(1, 1, var));
}

Matrix RandomSpd(Index d, std::mt19937& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) a(i, j) = u(gen);
  }
  return a * a.transpose() + 0.5 * Matrix::Identity(d, d);
}

TEST(RenyiDivergence, IdenticalPairIsZero) {
  std::mt19937 gen(1);
  for (Index d = 1; d <= 4; ++d) {
    Matrix c = RandomSpd(d, gen);
    GaussianDist p = Dist(Vector::Ones(d), c);
    for (double order : {1.001, 1.5, 2.0, 10.0, 1e3}) {
      EXPECT_NEAR(RenyiDivergence(p, p, order), 0.0, 1e-12);
    }
  }
}

TEST(RenyiDivergence, UnitMeanShiftOrderTwo) {
  double closed = RenyiDivergence(Scalar(0, 1), Scalar(1, 1), 2.0);
  EXPECT_NEAR(closed, 1.0, 1e-14);
  double quad = testing::QuadratureRenyi(Vector::Zero(1), Matrix::Identity(1, 1),
                                         Vector::Ones(1), Matrix::Identity(1, 1),
                                         2.0);
  EXPECT_NEAR(quad, 1.0, 1e-9);
}

TEST(RenyiDivergence, SameVarianceIdentity) {
  for (double order : {1.3, 2.0, 4.5}) {
    for (double shift : {0.2, 1.0, 3.0}) {
      for (double var : {0.5, 2.0}) {
        EXPECT_NEAR(RenyiDivergence(Scalar(0, var), Scalar(shift, var), order),
                    order * shift * shift / (2 * var), 1e-12);
      }
    }
  }
}

TEST(RenyiDivergence, VarianceChangeMatchesQuadrature) {
  double closed = RenyiDivergence(Scalar(0, 1), Scalar(0, 2), 2.0);
  double quad = testing::QuadratureRenyi(Vector::Zero(1), Matrix::Identity(1, 1),
                                         Vector::Zero(1),
                                         Matrix::Constant(1, 1, 2.0), 2.0);
  EXPECT_NEAR(closed, quad, 1e-8);
  // ln(s) closed form: 0.5 ln(3/4) ... D = ln(2/sqrt(3)).
  EXPECT_NEAR(closed, std::log(2.0 / std::sqrt(3.0)), 1e-14);
}

TEST(RenyiDivergence, RandomPairsMatchQuadrature) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ord(1.2, 3.0);
  int checked = 0;
  while (checked < 10) {
    Index d = 1 + checked % 2;
    Matrix cp = RandomSpd(d, gen), cq = RandomSpd(d, gen);
    Vector mp(d), mq(d);
    for (Index k = 0; k < d; ++k) mp(k) = u(gen), mq(k) = u(gen);
    double order = ord(gen);
    GaussianDist p = Dist(mp, cp), q = Dist(mq, cq);
    double closed = RenyiDivergence(p, q, order);
    if (!std::isfinite(closed)) continue;
    double quad = testing::QuadratureRenyi(mp, cp, mq, cq, order);
    EXPECT_NEAR(closed, quad, 1e-8) << "pair " << checked;
    ++checked;
  }
}

TEST(RenyiDivergence, InfiniteOutsideFeasibleOrders) {
  // A_{b+1} = (b+1)/2 - b is negative for b > 1.
  EXPECT_TRUE(std::isinf(RenyiDivergence(Scalar(0, 2), Scalar(0, 1), 3.0)));
  EXPECT_TRUE(std::isfinite(RenyiDivergence(Scalar(0, 2), Scalar(0, 1), 1.9)));
}

TEST(RenyiDivergence, Errors) {
  GaussianDist p = Scalar(0, 1);
  GaussianDist q2 = Dist(Vector::Zero(2), Matrix::Identity(2, 2));
  EXPECT_THROW(RenyiDivergence(p, q2, 2.0), InvalidArgument);
  EXPECT_THROW(RenyiDivergence(p, p, 1.0), InvalidArgument);
  GaussianDist singular = Dist(Vector::Zero(2), Matrix::Zero(2, 2));
  EXPECT_THROW(RenyiDivergence(singular, q2, 2.0), NumericalError);
}

TEST(RenyiOrderMatrix, MatchesDefinition) {
  std::mt19937 gen(3);
  Matrix cp = RandomSpd(3, gen), cq = RandomSpd(3, gen);
  Matrix a = RenyiOrderMatrix(cp, cq, 0.7);
  Matrix oracle = 1.7 * cp.inverse() - 0.7 * cq.inverse();
  EXPECT_LE((a - oracle).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RenyiProfile, AgreesWithDirectFormBothWays) {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Index d = 1 + trial % 5;
    Matrix cp = RandomSpd(d, gen), cq = RandomSpd(d, gen);
    Vector mp(d), mq(d);
    for (Index k = 0; k < d; ++k) mp(k) = u(gen), mq(k) = u(gen);
    RenyiProfile prof(cp, cq);
    RenyiProfile swapped = prof.Swapped();
    Vector c = prof.Coordinates(mp - mq);
    Vector cs = prof.SwapCoordinates(prof.Coordinates(mq - mp));
    for (double beta : {0.01, 0.3, 1.0, 4.0}) {
      double direct = RenyiDivergence(Dist(mp, cp), Dist(mq, cq), beta + 1);
      double fast = prof.Divergence(beta, c);
      if (std::isinf(direct)) {
        EXPECT_TRUE(std::isinf(fast));
        EXPECT_FALSE(prof.Feasible(beta));
      } else {
        EXPECT_NEAR(fast, direct, 1e-9 * std::max(1.0, std::abs(direct)));
      }
      double back = RenyiDivergence(Dist(mq, cq), Dist(mp, cp), beta + 1);
      double back_fast = swapped.Divergence(beta, cs);
      if (std::isinf(back)) {
        EXPECT_TRUE(std::isinf(back_fast));
      } else {
        EXPECT_NEAR(back_fast, back, 1e-9 * std::max(1.0, std::abs(back)));
      }
    }
  }
}

TEST(RenyiProfile, BetaMaxIsFeasibilityBoundary) {
  std::mt19937 gen(12);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix cp = RandomSpd(3, gen), cq = RandomSpd(3, gen);
    RenyiProfile prof(cp, cq);
    double bm = prof.BetaMax(1e4);
    if (bm >= 1e4) {
      EXPECT_TRUE(prof.Feasible(1e4));
      continue;
    }
    EXPECT_TRUE(prof.Feasible(bm * (1 - 1e-9)));
    EXPECT_FALSE(prof.Feasible(bm * (1 + 1e-9)));
    // Cross-check with a bisection on the order matrix itself.
    double lo = 0.0, hi = 2 * bm;
    for (int k = 0; k < 100; ++k) {
      double mid = 0.5 * (lo + hi);
      Eigen::LLT<Matrix> llt(RenyiOrderMatrix(cp, cq, mid));
      (llt.info() == Eigen::Success ? lo : hi) = mid;
    }
    EXPECT_NEAR(lo, bm, 1e-7 * bm);
  }
}

TEST(DeltaBound, IdenticalPairHitsTrivialBound) {
  GaussianDist p = Dist(Vector::Zero(2), Matrix::Identity(2, 2));
  for (double eps : {1e-4, 1e-3, 0.5}) {
    DeltaResult r = DeltaBound(p, p, eps);
    EXPECT_FALSE(r.infinite);
    EXPECT_NEAR(r.beta_star, r.beta_max, 1e-9 * r.beta_max);
    EXPECT_LE(r.delta, std::exp(-r.beta_max * eps) * (1 + 1e-9));
  }
}

TEST(DeltaBound, MonotoneInEpsilonAndBounded) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Index d = 1 + trial % 4;
    Matrix cp = RandomSpd(d, gen), cq = RandomSpd(d, gen);
    Vector mp(d), mq(d);
    for (Index k = 0; k < d; ++k) mp(k) = u(gen), mq(k) = u(gen);
    double prev = 1.0;
    for (double eps : {0.1, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 100.0}) {
      DeltaResult r = DeltaBound(Dist(mp, cp), Dist(mq, cq), eps);
      EXPECT_GE(r.delta, 0.0);
      EXPECT_LE(r.delta, 1.0);
      EXPECT_LE(r.delta, prev * (1 + 1e-9));
      if (!r.infinite) {
        EXPECT_GE(r.beta_star, 1e-3 * (1 - 1e-12));
        EXPECT_LE(r.beta_star, r.beta_max);
      }
      prev = r.delta;
    }
  }
}

// Gaussian mechanism with shift 1 and sigma 2: D_{b+1} = (b+1)/8, so the
// Chernoff optimum is b* = 4 eps - 1/2 with log delta = -(4 eps - 1/2)^2 / 8.
double AnalyticMeanShiftBound(double eps) {
  double b = 4 * eps - 0.5;
  return std::exp(-b * b / 8);
}

TEST(DeltaBound, MeanShiftDominatesExactTail) {
  for (double eps = 0.5; eps <= 4.0 + 1e-12; eps += 0.25) {
    DeltaResult r = DeltaBound(Scalar(0, 4), Scalar(1, 4), eps);
    double exact = testing::ExactMeanShiftDelta(1.0, 2.0, eps);
    EXPECT_GE(r.delta, exact) << eps;
    EXPECT_NEAR(r.delta, AnalyticMeanShiftBound(eps),
                1e-9 * AnalyticMeanShiftBound(eps))
        << eps;
    EXPECT_NEAR(r.beta_star, 4 * eps - 0.5, 1e-4 * (4 * eps - 0.5)) << eps;
  }
}

TEST(DeltaBound, MeanShiftWithinTenfoldOfExactTail) {
  for (double eps = 0.5; eps <= 4.0 + 1e-12; eps += 0.25) {
    DeltaResult r = DeltaBound(Scalar(0, 4), Scalar(1, 4), eps);
    double exact = testing::ExactMeanShiftDelta(1.0, 2.0, eps);
    EXPECT_LE(r.delta, 10.0 * exact) << "eps " << eps << " ratio "
                                     << r.delta / exact;
  }
}

TEST(DeltaBound, InfiniteDivergenceEverywhere) {
  auto inf = [](double) { return std::numeric_limits<double>::infinity(); };
  DeltaResult r = MinimizeChernoff(inf, 10.0, false, 1.0);
  EXPECT_TRUE(r.infinite);
  EXPECT_EQ(r.delta, 1.0);
  EXPECT_FALSE(r.diagnostic.empty());
  DeltaResult below = MinimizeChernoff(inf, 1e-4, true, 1.0);
  EXPECT_TRUE(below.infinite);
  EXPECT_EQ(below.delta, 1.0);
}

TEST(DeltaBound, Errors) {
  GaussianDist p = Scalar(0, 1);
  EXPECT_THROW(DeltaBound(p, p, -1.0), InvalidArgument);
  GaussianDist q2 = Dist(Vector::Zero(2), Matrix::Identity(2, 2));
  EXPECT_THROW(DeltaBound(p, q2, 1.0), InvalidArgument);
}

}  // namespace
}  // namespace ddppm::privacy
