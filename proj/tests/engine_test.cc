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


#include "ddppm/engine.h"

#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "ddppm/linalg.h"
#include "test_util.h"

namespace ddppm::engine {
namespace {

using data::PartitionedDataset;
using network::Topology;

Topology Ring(int c) { return Topology(network::RingMatrix(4, 0.5), c); }

// n = 40, d = 5 with a clear spectral gap.
PartitionedDataset DeskData() {
  Matrix x = testing::SpectrumMatrix(40, {3.0, 1.5, 1.0, 0.6, 0.3}, 21);
  return data::PartitionRows(data::Dataset{x}, 4);
}

RunConfig Noiseless(int T, double alpha) {
  RunConfig cfg;
  cfg.iterations = T;
  cfg.alpha = alpha;
  cfg.sigma_q = 1.0;
  cfg.sigma_p = ConstantSchedule(T, 0.0);
  cfg.seed = 3;
  return cfg;
}

TEST(SinError, Basics) {
  Vector v = Vector::Unit(3, 0);
  EXPECT_NEAR(SinError(v, v), 0.0, 1e-15);
  EXPECT_NEAR(SinError(v, Vector::Unit(3, 2)), 1.0, 1e-15);
  Vector q(3);
  q << 0.3, -1.2, 0.7;
  EXPECT_DOUBLE_EQ(SinError(v, 2.0 * q), SinError(v, q));
  EXPECT_DOUBLE_EQ(SinError(v, -q), SinError(v, q));
  double cos2 = q(0) * q(0) / q.squaredNorm();
  EXPECT_NEAR(SinError(v, q), std::sqrt(1 - cos2), 1e-15);
}

TEST(SinError, Errors) {
  Vector v = Vector::Unit(3, 0);
  EXPECT_THROW(SinError(v, Vector::Zero(3)), InvalidArgument);
  EXPECT_THROW(SinError(2.0 * v, v), InvalidArgument);
  EXPECT_THROW(SinError(v, Vector::Ones(2)), InvalidArgument);
}

TEST(RunConfig, Validation) {
  RunConfig cfg = Noiseless(3, 1.0);
  EXPECT_NO_THROW(cfg.Validate());
  RunConfig bad = cfg;
  bad.sigma_p.pop_back();
  EXPECT_THROW(bad.Validate(), InvalidArgument);
  bad = cfg;
  bad.alpha = 0.0;
  EXPECT_THROW(bad.Validate(), InvalidArgument);
  bad = cfg;
  bad.sigma_q = 0.0;
  EXPECT_THROW(bad.Validate(), InvalidArgument);
  bad = cfg;
  bad.sigma_p[1] = -1.0;
  EXPECT_THROW(bad.Validate(), InvalidArgument);
  bad = cfg;
  bad.rank = 0;
  EXPECT_THROW(bad.Validate(), InvalidArgument);
}

TEST(Schedules, GeometricAndConstant) {
  auto g = GeometricSchedule(3, 2.0, 0.5);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[2], 0.25);
  EXPECT_EQ(ConstantSchedule(2, 0.7), std::vector<double>({0.7, 0.7}));
}

TEST(CentralizedPowerMethod, RateOnTwoValueSpectrum) {
  // Singular values (2, 1): eigenvalue ratio 1/4 on X X^T.
  Matrix x = Matrix::Zero(4, 2);
  x(0, 0) = 2.0;
  x(1, 1) = 1.0;
  Matrix init(4, 1);
  init << 1.0, 1.0, 0.5, -0.5;
  // Components along e3, e4 vanish after one step; the e2/e1 ratio is
  // then tan = (1/4)^T.
  for (int T = 1; T <= 10; ++T) {
    Matrix q = CentralizedPowerMethodFrom(x, T, init);
    double s = SinError(Vector::Unit(4, 0), q.col(0));
    double tan = std::pow(0.25, T);
    EXPECT_NEAR(s, tan / std::sqrt(1 + tan * tan), 1e-15);
    EXPECT_LE(s, std::pow(0.25, T));
  }
}

TEST(CentralizedPowerMethod, RankOneExactAfterOneStep) {
  Vector u = testing::RandomMatrix(6, 1, 2).col(0).normalized();
  Vector w = testing::RandomMatrix(3, 1, 3).col(0);
  Matrix x = u * w.transpose();
  Matrix q = CentralizedPowerMethod(x, 1, 1, 9);
  EXPECT_LE(SinError(u, q.col(0)), 1e-14);
}

TEST(CentralizedPowerMethod, AgreesWithEigensolver) {
  Matrix x = testing::RandomMatrix(10, 4, 4);
  Matrix q = CentralizedPowerMethod(x, 200, 2, 5);
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU);
  for (int l = 0; l < 2; ++l) {
    EXPECT_LE(SinError(svd.matrixU().col(l), q.col(l)), 1e-8) << l;
  }
}

TEST(CentralizedPowerMethod, Errors) {
  Matrix x = testing::RandomMatrix(5, 2, 6);
  EXPECT_THROW(CentralizedPowerMethod(x, 0, 1, 0), InvalidArgument);
  EXPECT_THROW(CentralizedPowerMethod(x, 5, 6, 0), InvalidArgument);
  Matrix zero = Matrix::Zero(5, 2);
  EXPECT_THROW(CentralizedPowerMethod(zero, 3, 1, 0), NumericalError);
}

TEST(RunDdppm, NoiselessDeskBound) {
  PartitionedDataset p = DeskData();
  Topology top = Ring(60);
  network::NetworkOperator op = network::BuildNetworkOperator(p, top);
  const double mu1 = op.mu(0), mu2 = op.mu(1);
  RunConfig cfg = Noiseless(30, 2.0 / (mu1 + mu2));
  RunResult r = RunDdppm(p, top, cfg);
  Vector v = ExactEigenvectors(p.Stack(), 1).col(0);
  double consensus = 2.0 * p.max_block_size() * 4 * std::pow(top.lambda2(), 60) /
                     (op.lambda1 - op.lambda2);
  // 1e-14 absorbs rounding once the bound itself underflows.
  EXPECT_LE(SinError(v, r.u_hat.col(0)),
            10.0 * std::pow(mu2 / mu1, 30) + consensus + 1e-14);
}

TEST(RunDdppm, ExactConsensusMatchesCentralizedAtEveryStep) {
  PartitionedDataset p = testing::RandomPartition({3, 4, 2}, 3, 12);
  Topology top(network::CompleteMatrix(3), 1);
  for (int T = 1; T <= 12; ++T) {
    RunConfig cfg = Noiseless(T, 0.7);
    cfg.record_noise = true;
    RunResult r = RunDdppm(p, top, cfg);
    Matrix init = r.noise[0].q0;
    Matrix central = CentralizedPowerMethodFrom(p.Stack(), T, init);
    double sign = central.col(0).dot(r.u_hat.col(0)) < 0 ? -1.0 : 1.0;
    EXPECT_LE((sign * central.col(0) - r.u_hat.col(0)).norm(), 1e-10) << T;
  }
}

TEST(RunDdppm, ZeroIterationsNormalizesStart) {
  PartitionedDataset p = testing::RandomPartition({2, 2}, 2, 13);
  Topology top(network::RingMatrix(2, 0.5), 1);
  RunConfig cfg = Noiseless(0, 1.0);
  cfg.record_noise = true;
  RunResult r = RunDdppm(p, top, cfg);
  Vector q0 = r.noise[0].q0;
  EXPECT_LE((r.u_hat.col(0) - q0 / q0.norm()).norm(), 1e-15);
  EXPECT_NEAR(r.u_hat.col(0).norm(), 1.0, 1e-12);
}

TEST(RunDdppm, ZeroIterationsUniformOnSphere) {
  // n = 3 via a single agent. Under rotation invariance the polar
  // coordinate is uniform on [-1, 1] and the azimuth on [-pi, pi).
  PartitionedDataset p = testing::RandomPartition({3}, 2, 14);
  Topology top(Matrix::Ones(1, 1), 1);
  constexpr int kBins = 8;
  constexpr int kDraws = 8000;
  std::array<int, kBins> polar{}, azimuth{};
  for (int s = 0; s < kDraws; ++s) {
    RunConfig cfg = Noiseless(0, 1.0);
    cfg.seed = static_cast<std::uint64_t>(s);
    Vector u = RunDdppm(p, top, cfg).u_hat.col(0);
    int pb = std::min(kBins - 1, static_cast<int>((u(2) + 1.0) / 2.0 * kBins));
    double phi = std::atan2(u(1), u(0));
    int ab = std::min(kBins - 1,
                      static_cast<int>((phi + M_PI) / (2 * M_PI) * kBins));
    ++polar[pb];
    ++azimuth[ab];
  }
  // Chi-square with 7 degrees of freedom; 24.32 is the 0.999 quantile.
  auto chi2 = [](const std::array<int, kBins>& h) {
    double e = static_cast<double>(kDraws) / kBins, s = 0.0;
    for (int c : h) s += (c - e) * (c - e) / e;
    return s;
  };
  EXPECT_LT(chi2(polar), 24.32);
  EXPECT_LT(chi2(azimuth), 24.32);
}

TEST(RunDdppm, DeterministicGivenSeed) {
  PartitionedDataset p = DeskData();
  Topology top = Ring(5);
  RunConfig cfg = Noiseless(6, 0.3);
  cfg.sigma_p = GeometricSchedule(6, 1.0, 0.5);
  cfg.rank = 2;
  cfg.record_trace = true;
  RunResult a = RunDdppm(p, top, cfg);
  RunResult b = RunDdppm(p, top, cfg);
  EXPECT_EQ(a.u_hat, b.u_hat);
  EXPECT_EQ(a.final_norms, b.final_norms);
  EXPECT_EQ(a.iterate_norms, b.iterate_norms);
  ASSERT_EQ(a.trace.size(), 2u);
  EXPECT_EQ(StackedRelease(a.trace[1]), StackedRelease(b.trace[1]));
  cfg.seed += 1;
  EXPECT_NE(RunDdppm(p, top, cfg).u_hat, a.u_hat);
}

TEST(RunDdppm, UnitColumnsAndTraceShape) {
  PartitionedDataset p = DeskData();
  Topology top = Ring(10);
  RunConfig cfg = Noiseless(4, 0.3);
  cfg.sigma_p = ConstantSchedule(4, 0.05);
  cfg.rank = 3;
  cfg.record_trace = true;
  RunResult r = RunDdppm(p, top, cfg);
  ASSERT_EQ(r.u_hat.cols(), 3);
  for (Index l = 0; l < 3; ++l) EXPECT_NEAR(r.u_hat.col(l).norm(), 1.0, 1e-12);
  ASSERT_EQ(r.trace.size(), 3u);
  for (const RankTrace& t : r.trace) {
    ASSERT_EQ(t.iterations.size(), 4u);
    for (const IterationTrace& it : t.iterations) {
      ASSERT_EQ(it.z.size(), 4u);
      for (const Vector& z : it.z) EXPECT_EQ(z.size(), 5);
    }
    // m d T + n scalars per rank index.
    EXPECT_EQ(StackedRelease(t).size(), 4 * 5 * 4 + 40);
  }
  EXPECT_EQ(r.iterate_norms[0].size(), 5u);
  EXPECT_EQ(r.deflation_norms[0], 0.0);
  EXPECT_GT(r.deflation_norms[1], 0.0);
}

TEST(RunDdppm, NoiselessRankTwoRecoversSecondEigenvector) {
  PartitionedDataset p = DeskData();
  Topology top = Ring(60);
  network::NetworkOperator op = network::BuildNetworkOperator(p, top);
  RunConfig cfg = Noiseless(80, 2.0 / (op.mu(0) + op.mu(1)));
  cfg.rank = 2;
  RunResult r = RunDdppm(p, top, cfg);
  Matrix v = ExactEigenvectors(p.Stack(), 2);
  EXPECT_LE(SinError(v.col(0), r.u_hat.col(0)), 1e-8);
  EXPECT_LE(SinError(v.col(1), r.u_hat.col(1)), 1e-6);
}

TEST(RunDdppm, Errors) {
  PartitionedDataset p = testing::RandomPartition({2, 2}, 2, 15);
  RunConfig cfg = Noiseless(2, 1.0);
  EXPECT_THROW(RunDdppm(p, Ring(1), cfg), InvalidArgument);
  Topology two(network::RingMatrix(2, 0.5), 1);
  cfg.rank = 5;
  EXPECT_THROW(RunDdppm(p, two, cfg), InvalidArgument);
  PartitionedDataset zero({Matrix::Zero(2, 2), Matrix::Zero(2, 2)});
  cfg.rank = 1;
  try {
    RunDdppm(zero, two, cfg);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("rank index 1"), std::string::npos);
  }
}

TEST(Deflate, ExactRegimeProjectsOutDirection) {
  PartitionedDataset p = testing::RandomPartition({3, 4, 3}, 4, 16);
  Matrix x = p.Stack();
  Vector v = ExactEigenvectors(x, 1).col(0);
  Vector q_tilde = 2.5 * v;
  std::vector<Vector> z(3, x.transpose() * q_tilde);
  PartitionedDataset work = p;
  Deflate(work, v, z, q_tilde.norm());
  Matrix oracle = (Matrix::Identity(10, 10) - v * v.transpose()) * x;
  EXPECT_LE((work.Stack() - oracle).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Deflate, ZeroZLeavesDataUnchanged) {
  PartitionedDataset p = testing::RandomPartition({3, 3}, 2, 17);
  PartitionedDataset work = p;
  std::vector<Vector> z(2, Vector::Zero(2));
  Deflate(work, Vector::Unit(6, 1), z, 1.0);
  EXPECT_EQ(work.Stack(), p.Stack());
}

TEST(Deflate, RankOneDataVanishes) {
  Vector u = testing::RandomMatrix(8, 1, 18).col(0).normalized();
  Vector w = testing::RandomMatrix(3, 1, 19).col(0);
  Matrix x = u * w.transpose();
  PartitionedDataset p = data::PartitionRows(data::Dataset{x}, 2);
  std::vector<Vector> z(2, x.transpose() * u);
  Deflate(p, u, z, 1.0);
  EXPECT_LE(p.Stack().norm(), 1e-8);
}

TEST(Deflate, Errors) {
  PartitionedDataset p = testing::RandomPartition({3, 3}, 2, 20);
  std::vector<Vector> z(2, Vector::Zero(2));
  EXPECT_THROW(Deflate(p, Vector::Unit(6, 0), z, 0.0), InvalidArgument);
  EXPECT_THROW(Deflate(p, Vector::Unit(5, 0), z, 1.0), InvalidArgument);
  std::vector<Vector> one(1, Vector::Zero(2));
  EXPECT_THROW(Deflate(p, Vector::Unit(6, 0), one, 1.0), InvalidArgument);
}

}  // namespace
}  // namespace ddppm::engine
