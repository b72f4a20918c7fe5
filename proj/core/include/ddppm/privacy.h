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

#ifndef DDPPM_CORE_PRIVACY_H_
#define DDPPM_CORE_PRIVACY_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ddppm/common.h"
#include "ddppm/data.h"
#include "ddppm/engine.h"
#include "ddppm/network.h"
#include "ddppm/renyi.h"

namespace ddppm::privacy {

// Linear map from the hidden randomness to everything put on the network
// during one rank-1 round: y = M q^(0) + L P with
// y = [z^(1); ...; z^(T); q^(T)] (z^(t) stacked over agents) and
// P = [p^(1); ...; p^(T)].
struct ReleaseModel {
  Matrix m;  // (mdT + n) x n
  Matrix l;  // (mdT + n) x nT
  double sigma_q = 1.0;
  std::vector<double> sigma_p;  // length T
  Index agents = 0;
  Index dim = 0;
  Index rows = 0;
  int iterations = 0;
  std::vector<Index> starts;
  std::vector<Index> sizes;

  Index release_dim() const { return agents * dim * iterations + rows; }

  Vector Release(const Vector& q0, const Vector& p_stacked) const {
    return m * q0 + l * p_stacked;
  }
  // M Sigma_q M^T + L Sigma_P L^T.
  Matrix Covariance() const;
  // Rows of y that agent i puts on the network: its z_i^(t) for every t and
  // its own segment of q^(T).
  std::vector<Index> SelectedRows(Index agent) const;
  // Dense selector S_i = [T_i 0; 0 R_i].
  Matrix Selector(Index agent) const;
};

ReleaseModel BuildReleaseModel(const data::PartitionedDataset& data,
                               const network::NetworkOperator& op,
                               const engine::RunConfig& cfg);

// S_i M and S_i L for one agent.
struct ObserverRows {
  Matrix m;  // (dT + n_i) x n
  Matrix l;  // (dT + n_i) x nT
};

ObserverRows ObserverRowsFromModel(const ReleaseModel& model, Index agent);
// Same rows built directly by propagating R_i (alpha Xi)^s through the
// consensus structure; never forms Xi, M or L.
ObserverRows BuildObserverRows(const data::PartitionedDataset& data,
                               const network::Topology& top,
                               const engine::RunConfig& cfg, Index agent);

// Law of agent i's releases given its own q_i^(0) and p_i^(1..T).
class ObserverConditional {
 public:
  ObserverConditional(ObserverRows rows, const data::PartitionedDataset& data,
                      Index agent, double sigma_q,
                      std::span<const double> sigma_p);

  Index agent() const { return agent_; }
  Index dim() const { return rows_.m.rows(); }
  // M_i^u, L_i^u: columns driven by the agent's own randomness.
  const Matrix& own_m() const { return own_m_; }
  const Matrix& own_l() const { return own_l_; }
  // M_i^{-u}, L_i^{-u}.
  const Matrix& other_m() const { return other_m_; }
  const Matrix& other_l() const { return other_l_; }
  const Matrix& covariance() const { return cov_; }

  // Mean M_i^u q_own + L_i^u p_own where p_own stacks p_i^(1..T).
  Vector Mean(const Vector& q_own, const Vector& p_own) const;
  GaussianDist Evaluate(const Vector& q_own, const Vector& p_own) const;

 private:
  Index agent_;
  ObserverRows rows_;
  Matrix own_m_, own_l_, other_m_, other_l_;
  Matrix cov_;
};

ObserverConditional ConditionalFromModel(const ReleaseModel& model,
                                         const data::PartitionedDataset& data,
                                         Index agent);
ObserverConditional BuildObserverConditional(
    const data::PartitionedDataset& data, const network::Topology& top,
    const engine::RunConfig& cfg, Index agent);

// Smallest rank capturing `energy_tol` of the covariance trace, further
// truncated to strictly positive eigenvalues. Throws InvalidArgument for a
// zero covariance or energy_tol outside (0, 1].
GaussianDist ReduceRank(const GaussianDist& g, double energy_tol);

// Orthonormal basis (columns) of the top eigenvectors of cov_p + cov_q
// selected by the same rule.
Matrix JointBasis(const Matrix& cov_p, const Matrix& cov_q, double energy_tol);
GaussianDist Project(const GaussianDist& g, const Matrix& basis);

// One adjacent dataset: agent `agent`'s local row `row` moves by
// magnitude * direction.
struct Perturbation {
  Index agent = 0;
  Index row = 0;
  Vector direction;
  double magnitude = 1.0;
  std::string id;
};

// Per row: +-row direction, +-each of the top-2 right singular vectors of X,
// and `random_directions` uniform unit directions. max_rows_per_agent > 0
// restricts each agent to a seeded sample of its rows.
std::vector<Perturbation> DefaultPerturbations(
    const data::PartitionedDataset& data, std::uint64_t seed,
    Index max_rows_per_agent = 0, int random_directions = 4);

// Text format, one perturbation per line:
//   agent,row,v_1,...,v_d,magnitude
// '#' starts a comment. Indices are 0-based, row is local to the agent.
std::vector<Perturbation> ParsePerturbations(const std::string& text,
                                             Index dim);
std::vector<Perturbation> LoadPerturbations(const std::string& path,
                                            Index dim);

// Throws InvalidArgument when the change norm exceeds 1.
data::PartitionedDataset ApplyPerturbation(const data::PartitionedDataset& x,
                                           const Perturbation& p);

enum class Composition { kAuto, kStacked, kNaiveSum };

struct AuditOptions {
  double energy_tol = 0.99;
  int random_realizations = 8;
  std::uint64_t seed = 0;
  bool both_directions = true;
  Composition compose = Composition::kAuto;
  DeltaOptions delta;
  int jobs = 1;
};

struct ObserverResult {
  Index agent = 0;
  double delta = 0.0;
  double beta_star = 0.0;
  std::string perturbation_id;
  Index reduced_rank = 0;
  bool infinite = false;
};

struct PrivacyReport {
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<ObserverResult> per_observer;
  Index worst_observer = 0;
  std::string perturbation_id;
  Index perturbations = 0;
  std::string composition;
  std::vector<std::string> diagnostics;
};

// For every observer i and every perturbation of an agent j != i, compares
// the observer conditionals under X and X'. One report per epsilon. The
// result is a lower-bound certificate over the supplied perturbation set.
std::vector<PrivacyReport> AuditPrivacy(const data::PartitionedDataset& data,
                                        const network::Topology& top,
                                        const engine::RunConfig& cfg,
                                        std::span<const double> epsilons,
                                        std::span<const Perturbation> perts,
                                        const AuditOptions& options = {});

}  // namespace ddppm::privacy

#endif  // DDPPM_CORE_PRIVACY_H_
