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

#ifndef DDPPM_CORE_ANALYSIS_H_
#define DDPPM_CORE_ANALYSIS_H_

#include <string>
#include <vector>

#include "ddppm/common.h"
#include "ddppm/data.h"
#include "ddppm/engine.h"
#include "ddppm/network.h"

namespace ddppm::analysis {

// Covariance of the unnormalized final iterate q^(T) of one rank round.
struct OmegaModel {
  Matrix omega;
  // Var[Gamma_i] along each eigenvector of Xi, aligned with op.mu.
  Vector variances;
  Matrix basis;  // eigenvectors of Xi
};

OmegaModel BuildOmega(const network::NetworkOperator& op,
                      const engine::RunConfig& cfg);

// Ratio of the noise-to-signal weights along mu_2 and mu_1. Throws
// InvalidArgument when alpha * mu2 <= 0 or the denominator vanishes.
double Rho(const engine::RunConfig& cfg, double mu1, double mu2);

// 1 + 1 / (sigma_q^2 (1 - (alpha mu1)^-2)). Requires alpha * mu1 > 1.
double RhoUpperBound(double sigma_q, double alpha, double mu1);

struct HansonWrightOptions {
  int max_iterations = 200;
  double relative_tol = 1e-8;
  double damping = 0.5;
};

struct HansonWrightResult {
  double delta = 0.0;
  double theta = 0.0;
  int iterations = 0;
};

// Right-hand side of the Delta condition evaluated at a given Delta.
double HansonWrightRhs(const Matrix& omega, const Vector& v, double gamma,
                       double delta);

// Smallest Delta meeting the condition with equality, found by damped
// fixed-point iteration from Delta = 0. Throws NumericalError when the
// iteration does not settle.
HansonWrightResult HansonWrightDelta(const Matrix& omega, const Vector& v,
                                     double gamma,
                                     const HansonWrightOptions& options = {});

struct BoundReport {
  double theta = 0.0;
  double delta_hw = 0.0;
  double rho = 0.0;
  double consensus_term = 0.0;
  double decay_term = 0.0;
  double total = 0.0;
  double gamma = 0.0;
  // Exact expected sin^2 of the Gaussian iterate: 1 - v^T Omega v / Tr Omega.
  double expected_sin2 = 0.0;
  bool hw_converged = false;
  // total >= 1, or the Delta iteration diverged (total = +inf).
  bool vacuous = false;

  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double consensus_gap = 0.0;  // ||Xi - X X^T||_2
  double lambda2_w = 0.0;
  Index observer_size = 0;
  Index rows = 0;

  bool eigengap_positive = false;         // lambda_1 > lambda_2
  bool mixing_valid = false;              // W passes every mixing check
  bool consensus_within_eigengap = false; // ||Xi - X X^T||_2 <= eigengap
  // The bound covers the principal eigenvector; deflated rounds of a
  // rank > 1 run reuse it heuristically.
  bool deflated_rounds_heuristic = false;
  std::vector<std::string> warnings;
};

// observer_size <= 0 selects the largest agent block. Throws InvalidArgument
// when lambda_1 == lambda_2.
BoundReport ConvergenceBound(const data::PartitionedDataset& data,
                             const network::Topology& top,
                             const network::NetworkOperator& op,
                             const engine::RunConfig& cfg, double gamma,
                             Index observer_size = 0);

struct SuggestedParameters {
  double alpha = 0.0;
  double sigma_q = 0.0;
  std::vector<double> sigma_p;
  bool alpha_fallback = false;
  std::string warning;
};

// alpha at the midpoint 2 / (mu1 + mu2), sigma_q = 1 / sqrt(n) and
// sigma_p(t) = eta (mu2 / mu1)^t.
SuggestedParameters SuggestParameters(double mu1, double mu2, Index n,
                                      int iterations, double eta = 1.0);

}  // namespace ddppm::analysis

#endif  // DDPPM_CORE_ANALYSIS_H_
