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

#ifndef DDPPM_CORE_RENYI_H_
#define DDPPM_CORE_RENYI_H_

#include <functional>
#include <optional>
#include <string>

#include "ddppm/common.h"

namespace ddppm::privacy {

struct GaussianDist {
  Vector mean;
  Matrix cov;
  // Retained rank after a reduction, when one was applied.
  std::optional<Index> rank_hint;

  Index dim() const { return mean.size(); }
};

// A_{b+1} = (b+1) cov_p^{-1} - b cov_q^{-1}.
Matrix RenyiOrderMatrix(const Matrix& cov_p, const Matrix& cov_q, double beta);

// Closed-form Renyi divergence D_order(P || Q) between Gaussians, order > 1.
// Returns +infinity when A_order is not positive definite. Throws
// InvalidArgument on a dimension mismatch and NumericalError when either
// covariance is not positive definite.
double RenyiDivergence(const GaussianDist& p, const GaussianDist& q,
                       double order);

// Simultaneous diagonalization of a positive definite covariance pair:
// cov_q w_k = ratio_k cov_p w_k with w_k^T cov_p w_k = 1. In that basis the
// divergence for every order and every mean difference is O(dim).
class RenyiProfile {
 public:
  RenyiProfile(const Matrix& cov_p, const Matrix& cov_q);

  Index dim() const { return ratios_.size(); }
  const Vector& ratios() const { return ratios_; }

  // Mean difference (p - q) expressed in the diagonalizing basis.
  Vector Coordinates(const Vector& mean_difference) const;

  // A_{b+1} positive definite.
  bool Feasible(double beta) const;
  // Supremum of the feasible orders, min over ratios < 1 of r / (1 - r),
  // or `cap` when every ratio is >= 1.
  double BetaMax(double cap) const;

  // D_{b+1}(P || Q) given Coordinates(mean_p - mean_q); +inf if infeasible.
  double Divergence(double beta, const Vector& coordinates) const;

  // Profile of (Q, P); coordinates of the swapped pair are
  // SwapCoordinates(c) for the same mean difference sign-flipped.
  RenyiProfile Swapped() const;
  Vector SwapCoordinates(const Vector& coordinates) const;

 private:
  RenyiProfile() = default;
  Vector ratios_;
  Matrix transform_;  // rows are w_k^T
  double log_ratio_sum_ = 0.0;
};

struct DeltaOptions {
  double beta_floor = 1e-3;
  // Upper end of the search when A_{b+1} stays positive definite for every b.
  double beta_cap = 1e4;
  int grid_points = 32;
  double relative_tol = 1e-6;
};

struct DeltaResult {
  double delta = 1.0;
  double beta_star = 0.0;
  double beta_max = 0.0;
  bool infinite = false;  // no feasible order above the floor
  std::string diagnostic;
};

// inf over b in [beta_floor, beta_max) of exp(-b eps + b D(b)), clamped to
// [0, 1]. Searches a log grid, then refines the best bracket by
// golden-section on log b. `open_end` excludes beta_max itself, where the
// divergence blows up.
DeltaResult MinimizeChernoff(const std::function<double(double)>& divergence,
                             double beta_max, bool open_end, double epsilon,
                             const DeltaOptions& options = {});

// Chernoff bound on Pr(ln p/q > eps) for a pair of Gaussians.
DeltaResult DeltaBound(const GaussianDist& p, const GaussianDist& q,
                       double epsilon, const DeltaOptions& options = {});

}  // namespace ddppm::privacy

#endif  // DDPPM_CORE_RENYI_H_
