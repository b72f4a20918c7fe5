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

#ifndef DDPPM_CORE_NETWORK_H_
#define DDPPM_CORE_NETWORK_H_

#include <span>
#include <string>
#include <vector>

#include "ddppm/common.h"
#include "ddppm/data.h"

namespace ddppm::network {

// Per-condition outcome of checking a mixing matrix against the consensus
// assumptions: (i) non-negative weights on the support graph, (ii) undirected
// (symmetric), (iii) doubly stochastic, (iv) connected, plus lambda2 < 1.
struct MixingDiagnostics {
  bool square = false;
  bool nonnegative = false;
  bool symmetric = false;
  bool row_stochastic = false;
  bool column_stochastic = false;
  bool connected = false;
  bool lambda2_below_one = false;
  // Second-largest eigenvalue modulus; NaN when W is not square.
  double lambda2 = 0.0;
  std::vector<std::string> failures;

  bool valid() const { return failures.empty(); }
};

MixingDiagnostics ValidateMixingMatrix(const Matrix& w);

// A validated mixing matrix together with the number of consensus rounds
// run per power iteration.
class Topology {
 public:
  // Throws InvalidArgument naming the failed conditions.
  Topology(Matrix w, int consensus_rounds);

  const Matrix& w() const { return w_; }
  Index agents() const { return w_.rows(); }
  int consensus_rounds() const { return rounds_; }
  double lambda2() const { return lambda2_; }
  // m * W^c, the effective aggregation weights of one consensus phase.
  const Matrix& aggregation() const { return aggregation_; }

  Topology WithRounds(int consensus_rounds) const {
    return Topology(w_, consensus_rounds);
  }

 private:
  Matrix w_;
  int rounds_;
  double lambda2_;
  Matrix aggregation_;
};

// Ring with the given self weight, neighbours sharing the rest equally.
Matrix RingMatrix(Index m, double self_weight);
// Metropolis weights on the complete graph.
Matrix CompleteMatrix(Index m);
// Metropolis weights on the path 0 - 1 - ... - (m-1).
Matrix PathMatrix(Index m);

// output_i = m * sum_j (W^c)_{ij} z_j.
std::vector<Vector> ConsensusApply(const Topology& top,
                                   std::span<const Vector> z);

// Consensus surrogate of X X^T together with its spectrum.
struct NetworkOperator {
  Matrix xi;            // n x n
  Vector mu;            // eigenvalues, descending
  Matrix eigenvectors;  // matching columns
  double consensus_gap = 0.0;  // ||Xi - X X^T||_2
  double min_eigenvalue = 0.0;
  // Set when the smallest eigenvalue is below -10 * eps_machine * mu_1.
  bool negative_eigenvalue_flag = false;
  // lambda_1, lambda_2 of X X^T and whether gap <= lambda_1 - lambda_2.
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  bool gap_within_eigengap = false;
};

NetworkOperator BuildNetworkOperator(const data::PartitionedDataset& data,
                                     const Topology& top);

// Xi without the spectral post-processing.
Matrix AssembleXi(const data::PartitionedDataset& data, const Topology& top);

}  // namespace ddppm::network

#endif  // DDPPM_CORE_NETWORK_H_
