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

#ifndef DDPPM_CORE_ENGINE_H_
#define DDPPM_CORE_ENGINE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ddppm/common.h"
#include "ddppm/data.h"
#include "ddppm/network.h"

namespace ddppm::engine {

// Algorithm knobs. The consensus depth lives on the Topology.
struct RunConfig {
  int iterations = 10;  // T, power iterations per eigenvector
  int rank = 1;         // r
  double alpha = 1.0;   // fixed rescaling replacing per-step normalization
  double sigma_q = 1.0;
  // sigma_p[t-1] is the noise standard deviation added after iteration t.
  // Must hold at least `iterations` entries.
  std::vector<double> sigma_p;
  std::uint64_t seed = 0;
  bool record_trace = false;
  // Keeps the realized q^(0) and p^(t). Private to the simulation; used by
  // tests and the release-model cross-checks.
  bool record_noise = false;

  double SigmaP(int t) const { return sigma_p[t - 1]; }
  // Throws InvalidArgument when a field is out of range or inconsistent.
  void Validate() const;
};

// sigma_p(t) = scale for all t.
std::vector<double> ConstantSchedule(int iterations, double scale);
// sigma_p(t) = eta * ratio^t.
std::vector<double> GeometricSchedule(int iterations, double eta, double ratio);

// Values put on the network during one power iteration.
struct IterationTrace {
  std::vector<Vector> z;       // z_i^(t) = X_i^T q_i^(t-1)
  std::vector<Vector> z_half;  // z_i^(t+1/2) after consensus
};

struct RankTrace {
  std::vector<IterationTrace> iterations;
  Vector q_final;  // stacked, unnormalized q^(T) as shared in the last step
};

struct RankNoise {
  Vector q0;               // stacked q^(0)
  std::vector<Vector> p;   // p[t-1] = stacked p^(t)
};

struct RunResult {
  Matrix u_hat;                    // n x r, unit columns
  std::vector<double> final_norms;  // ||q^(T)|| before normalization
  // ||q^(t)||, t = 0..T, per rank index. Diagnostic only; a run never
  // renormalizes mid-flight.
  std::vector<std::vector<double>> iterate_norms;
  // Frobenius norm of the deflation update applied before each rank index
  // l > 1 (index 0 is always 0).
  std::vector<double> deflation_norms;
  std::vector<RankTrace> trace;
  std::vector<RankNoise> noise;
};

// Stacks one rank's trace into y = [z_1^(1) .. z_m^(1), .., z_m^(T), q^(T)].
Vector StackedRelease(const RankTrace& trace);

// Decentralized differentially private power method. Each agent only reads
// its own block, its own q_i, its own noise and the consensus outputs.
RunResult RunDdppm(const data::PartitionedDataset& data,
                   const network::Topology& top, const RunConfig& cfg);

// X_i <- X_i - q_i (z_i / norm_prev)^T with q_i the agent's segment of the
// unit vector q_prev and z_i the agent's estimate of X^T q~.
void Deflate(data::PartitionedDataset& working, const Vector& q_prev,
             std::span<const Vector> z_final, double norm_prev);

// Normalized power iteration on X X^T with Gaussian start, deflating
// X X^T <- X X^T - lambda q q^T between rank indices.
Matrix CentralizedPowerMethod(const Matrix& x, int iterations, int rank,
                              std::uint64_t seed);
// Same with explicit starting vectors (n x rank).
Matrix CentralizedPowerMethodFrom(const Matrix& x, int iterations,
                                  const Matrix& initial);

// ||(I - v v^T) q|| / ||q||.
double SinError(const Vector& v, const Vector& q);

// Exact top-r eigenvectors of X X^T.
Matrix ExactEigenvectors(const Matrix& x, Index r);

}  // namespace ddppm::engine

#endif  // DDPPM_CORE_ENGINE_H_
