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


#include "ddppm/network.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "test_util.h"

namespace ddppm::network {
namespace {

Matrix PaperRing() { return RingMatrix(4, 0.5); }

bool Fails(const MixingDiagnostics& d, const std::string& name) {
  return std::find(d.failures.begin(), d.failures.end(), name) !=
         d.failures.end();
}

TEST(ValidateMixingMatrix, RingIsValidWithLambdaHalf) {
  Matrix w = PaperRing();
  EXPECT_DOUBLE_EQ(w(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(w(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(w(0, 3), 0.25);
  EXPECT_DOUBLE_EQ(w(0, 2), 0.0);
  MixingDiagnostics d = ValidateMixingMatrix(w);
  EXPECT_TRUE(d.valid());
  // Circulant oracle: eigenvalues 0.5 + 0.5 cos(2 pi k / 4).
  double oracle = 0.0;
  for (int k = 1; k < 4; ++k) {
    oracle = std::max(oracle, std::abs(0.5 + 0.5 * std::cos(2 * M_PI * k / 4)));
  }
  EXPECT_NEAR(d.lambda2, oracle, 1e-14);
  EXPECT_NEAR(d.lambda2, 0.5, 1e-14);
}

TEST(ValidateMixingMatrix, RingFileMatchesGenerator) {
  Matrix w = data::LoadCsv(std::string(DDPPM_DATA_DIR) + "/ring4.csv", false).rows;
  EXPECT_LE((w - PaperRing()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ValidateMixingMatrix, IdentityIsDisconnected) {
  MixingDiagnostics d = ValidateMixingMatrix(Matrix::Identity(2, 2));
  EXPECT_FALSE(d.valid());
  EXPECT_FALSE(d.connected);
  EXPECT_TRUE(Fails(d, "connected"));
  EXPECT_TRUE(d.row_stochastic);
}

TEST(ValidateMixingMatrix, RowButNotColumnStochastic) {
  Matrix w{{0.5, 0.5, 0.0}, {0.2, 0.3, 0.5}, {0.4, 0.4, 0.2}};
  MixingDiagnostics d = ValidateMixingMatrix(w);
  EXPECT_TRUE(d.row_stochastic);
  EXPECT_FALSE(d.column_stochastic);
  EXPECT_TRUE(Fails(d, "column_stochastic"));
}

TEST(ValidateMixingMatrix, NegativeEntry) {
  Matrix w{{1.2, -0.2}, {-0.2, 1.2}};
  MixingDiagnostics d = ValidateMixingMatrix(w);
  EXPECT_FALSE(d.nonnegative);
  EXPECT_FALSE(d.valid());
}

TEST(ValidateMixingMatrix, PeriodicGossipFailsLambda2) {
  // Bipartite swap: eigenvalues +1 and -1.
  Matrix w{{0.0, 1.0}, {1.0, 0.0}};
  MixingDiagnostics d = ValidateMixingMatrix(w);
  EXPECT_TRUE(d.connected);
  EXPECT_NEAR(d.lambda2, 1.0, 1e-14);
  EXPECT_TRUE(Fails(d, "lambda2_below_one"));
}

TEST(ValidateMixingMatrix, NonSquare) {
  MixingDiagnostics d = ValidateMixingMatrix(Matrix::Ones(2, 3));
  EXPECT_FALSE(d.square);
  EXPECT_TRUE(std::isnan(d.lambda2));
}

TEST(ValidateMixingMatrix, Generators) {
  for (Index m : {1, 2, 3, 5, 8}) {
    EXPECT_TRUE(ValidateMixingMatrix(RingMatrix(m, 0.4)).valid()) << m;
    EXPECT_TRUE(ValidateMixingMatrix(CompleteMatrix(m)).valid()) << m;
    EXPECT_TRUE(ValidateMixingMatrix(PathMatrix(m)).valid()) << m;
  }
  EXPECT_NEAR(ValidateMixingMatrix(CompleteMatrix(5)).lambda2, 0.0, 1e-14);
}

TEST(ValidateMixingMatrix, EigenvaluesInUnitInterval) {
  for (Index m : {3, 6}) {
    Matrix w = PathMatrix(m);
    Eigen::SelfAdjointEigenSolver<Matrix> s(w);
    EXPECT_GE(s.eigenvalues().minCoeff(), -1.0 - 1e-12);
    EXPECT_NEAR(s.eigenvalues().maxCoeff(), 1.0, 1e-12);
    EXPECT_LT(s.eigenvalues()(m - 2), 1.0 - 1e-9);
  }
}

TEST(Topology, RejectsInvalidMatrixAndRounds) {
  EXPECT_THROW(Topology(Matrix::Identity(2, 2), 1), InvalidArgument);
  EXPECT_THROW(Topology(PaperRing(), 0), InvalidArgument);
  Topology t(PaperRing(), 3);
  EXPECT_EQ(t.consensus_rounds(), 3);
  EXPECT_NEAR(t.lambda2(), 0.5, 1e-14);
  EXPECT_EQ(t.WithRounds(7).consensus_rounds(), 7);
}

TEST(Topology, AggregationUsesExactPower) {
  Topology t(PaperRing(), 5);
  Matrix wc = Matrix::Identity(4, 4);
  for (int k = 0; k < 5; ++k) wc *= PaperRing();
  EXPECT_LE((t.aggregation() - 4.0 * wc).cwiseAbs().maxCoeff(), 1e-14);
}

std::vector<Vector> RandomZ(Index m, Index d, std::uint32_t seed) {
  Matrix a = testing::RandomMatrix(m, d, seed);
  std::vector<Vector> z;
  for (Index i = 0; i < m; ++i) z.push_back(a.row(i).transpose());
  return z;
}

TEST(ConsensusApply, PerfectMixingGivesSum) {
  Topology t(CompleteMatrix(5), 1);
  auto z = RandomZ(5, 3, 1);
  Vector sum = Vector::Zero(3);
  for (const Vector& v : z) sum += v;
  for (const Vector& out : ConsensusApply(t, z)) {
    EXPECT_LE((out - sum).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(ConsensusApply, SingleAgentIsIdentity) {
  Topology t(Matrix::Ones(1, 1), 4);
  auto z = RandomZ(1, 4, 2);
  EXPECT_EQ(ConsensusApply(t, z)[0], z[0]);
}

TEST(ConsensusApply, ErrorWithinSpectralBound) {
  for (int c : {1, 2, 5, 10}) {
    Topology t(PaperRing(), c);
    for (std::uint32_t seed = 0; seed < 10; ++seed) {
      auto z = RandomZ(4, 3, 100 + seed);
      Vector sum = Vector::Zero(3);
      for (const Vector& v : z) sum += v;
      Vector mean = sum / 4.0;
      double dev = 0.0;
      for (const Vector& v : z) dev += (v - mean).squaredNorm();
      dev = std::sqrt(dev);
      double worst = 0.0;
      for (const Vector& out : ConsensusApply(t, z)) {
        worst = std::max(worst, (out - sum).norm());
      }
      EXPECT_LE(worst, 4.0 * std::pow(0.5, c) * dev * (1 + 1e-12));
    }
  }
}

TEST(ConsensusApply, DimensionErrors) {
  Topology t(PaperRing(), 1);
  auto z = RandomZ(3, 2, 3);
  EXPECT_THROW(ConsensusApply(t, z), InvalidArgument);
  auto z4 = RandomZ(4, 2, 4);
  z4[2] = Vector::Zero(3);
  EXPECT_THROW(ConsensusApply(t, z4), InvalidArgument);
}

TEST(BuildNetworkOperator, SingleAgentIsGram) {
  data::PartitionedDataset p = testing::RandomPartition({6}, 3, 5);
  NetworkOperator op = BuildNetworkOperator(p, Topology(Matrix::Ones(1, 1), 1));
  Matrix x = p.Stack();
  EXPECT_LE((op.xi - x * x.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE(op.consensus_gap, 1e-14);
}

TEST(BuildNetworkOperator, MatchesBruteForceAssembly) {
  data::PartitionedDataset p = testing::RandomPartition({3, 4, 2}, 3, 6);
  Matrix w = PathMatrix(3);
  for (int c : {1, 3, 8}) {
    NetworkOperator op = BuildNetworkOperator(p, Topology(w, c));
    Matrix oracle = testing::BruteForceXi(p.blocks(), w, c);
    EXPECT_LE((op.xi - oracle).cwiseAbs().maxCoeff(), 1e-13) << c;
    EXPECT_TRUE(testing::RelativeFrobenius(op.xi, op.xi.transpose()) < 1e-14);
  }
}

TEST(BuildNetworkOperator, SpectrumSortedAndConsistent) {
  data::PartitionedDataset p = testing::RandomPartition({3, 3, 3, 3}, 4, 7);
  NetworkOperator op = BuildNetworkOperator(p, Topology(PaperRing(), 4));
  for (Index k = 1; k < op.mu.size(); ++k) EXPECT_GE(op.mu(k - 1), op.mu(k));
  Matrix rebuilt =
      op.eigenvectors * op.mu.asDiagonal() * op.eigenvectors.transpose();
  EXPECT_LE((rebuilt - op.xi).cwiseAbs().maxCoeff(), 1e-12);
  Matrix x = p.Stack();
  Eigen::JacobiSVD<Matrix> svd(x);
  EXPECT_NEAR(op.lambda1, svd.singularValues()(0) * svd.singularValues()(0),
              1e-12);
  EXPECT_NEAR(op.lambda2, svd.singularValues()(1) * svd.singularValues()(1),
              1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> gap(op.xi - x * x.transpose());
  EXPECT_NEAR(op.consensus_gap, gap.eigenvalues().cwiseAbs().maxCoeff(), 1e-13);
}

TEST(BuildNetworkOperator, GapDecaysAtLambda2Rate) {
  data::PartitionedDataset p = testing::RandomPartition({5, 5, 5, 5}, 3, 8);
  std::vector<double> cs, logs;
  for (int c = 1; c <= 20; ++c) {
    NetworkOperator op = BuildNetworkOperator(p, Topology(PaperRing(), c));
    cs.push_back(c);
    logs.push_back(std::log(op.consensus_gap));
  }
  double cm = 0, lm = 0;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    cm += cs[k];
    lm += logs[k];
  }
  cm /= cs.size();
  lm /= cs.size();
  double num = 0, den = 0;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    num += (cs[k] - cm) * (logs[k] - lm);
    den += (cs[k] - cm) * (cs[k] - cm);
  }
  EXPECT_NEAR(num / den, std::log(0.5), 0.01 * std::abs(std::log(0.5)));
}

TEST(BuildNetworkOperator, NearlyPsdForLargeC) {
  data::PartitionedDataset p = testing::RandomPartition({4, 4, 4, 4}, 3, 9);
  NetworkOperator op = BuildNetworkOperator(p, Topology(PaperRing(), 60));
  EXPECT_FALSE(op.negative_eigenvalue_flag);
  EXPECT_TRUE(op.gap_within_eigengap);
  EXPECT_LE(op.consensus_gap, 1e-12);
}

TEST(BuildNetworkOperator, SmallCFlagsNegativeSpectrum) {
  // Self weight 0.2 gives W the eigenvalue -0.6; with full-rank blocks Xi
  // inherits a negative eigenvalue for odd c.
  data::PartitionedDataset p = testing::RandomPartition({4, 4, 4, 4}, 3, 10);
  NetworkOperator op = BuildNetworkOperator(p, Topology(RingMatrix(4, 0.2), 1));
  EXPECT_LT(op.min_eigenvalue, 0.0);
  EXPECT_TRUE(op.negative_eigenvalue_flag);
}

TEST(BuildNetworkOperator, AgentCountMismatch) {
  data::PartitionedDataset p = testing::RandomPartition({4, 4}, 3, 11);
  EXPECT_THROW(BuildNetworkOperator(p, Topology(PaperRing(), 1)),
               InvalidArgument);
}

}  // namespace
}  // namespace ddppm::network
