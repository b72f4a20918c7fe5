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

#ifndef DDPPM_TOOLS_CLI_EXPERIMENT_H_
#define DDPPM_TOOLS_CLI_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "cli/config.h"
#include "ddppm/data.h"
#include "ddppm/engine.h"
#include "ddppm/network.h"
#include "ddppm/privacy.h"

namespace ddppm::cli {

struct Instance {
  data::PartitionedDataset data;
  network::Topology top;
  network::NetworkOperator op;
  Matrix exact;  // reference eigenvectors, n x rank
};

Matrix LoadMatrixCsv(const std::string& path);
network::Topology BuildTopology(const TopologySpec& spec);
Matrix TopologyMatrix(const TopologySpec& spec);
Instance BuildInstance(const ExperimentConfig& cfg);

// Parameters of one configuration: the suggested values unless the config
// pins them, with sigma_p scaled by eta and alpha by alpha_factor.
engine::RunConfig ResolveRunConfig(const ExperimentConfig& cfg,
                                   const Instance& inst, int iterations,
                                   double eta, double alpha_factor);

struct ErrorStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for one trial
  int trials = 0;
};

ErrorStats Summarize(const std::vector<double>& errors);

// Mean over columns of sin(exact_l, u_hat_l).
double TrialError(const Matrix& u_hat, const Matrix& exact);

// `point` separates the substreams of different configurations.
ErrorStats MonteCarloDdppm(const Instance& inst, engine::RunConfig run,
                           int trials, std::uint64_t seed,
                           std::uint64_t point, int jobs);
ErrorStats MonteCarloLdp(const Instance& inst, double variance, int rank,
                         int trials, std::uint64_t seed, std::uint64_t point,
                         int jobs);

// Smallest T >= 1 whose noiseless iterate on Xi is within `target` sin error
// of the principal eigenvector, capped at t_max.
int NoiselessIterations(const Instance& inst, double target, int t_max,
                        std::uint64_t seed);

std::vector<privacy::Perturbation> PerturbationSet(const ExperimentConfig& cfg,
                                                   const Instance& inst,
                                                   Index rows_per_agent);
privacy::AuditOptions MakeAuditOptions(const ExperimentConfig& cfg);

struct SweepRow {
  std::string method;
  double epsilon = 0.0;
  double delta_cap = 0.0;
  ErrorStats stats;
  double delta = 0.0;  // audited (D-DP-PM) or calibrated (LDP)
  double eta = 0.0;
  double alpha = 0.0;
  int iterations = 0;
  bool feasible = true;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int t_star = 0;
  int grid_points = 0;
  int audited_points = 0;
};

SweepResult RunSweep(const ExperimentConfig& cfg, const Instance& inst);

struct DepthRow {
  int iterations = 0;
  ErrorStats stats;
  double delta = 0.0;
};

// Fixed parameters, T = 1..fig.t_max, delta audited at fig.epsilon.
std::vector<DepthRow> RunDepthProfile(const ExperimentConfig& cfg,
                                      const Instance& inst);

std::string FormatNumber(double x);
std::string SweepCsv(const SweepResult& result, const std::string& header);
std::string DepthCsv(const std::vector<DepthRow>& rows,
                     const std::string& header);

}  // namespace ddppm::cli

#endif  // DDPPM_TOOLS_CLI_EXPERIMENT_H_
