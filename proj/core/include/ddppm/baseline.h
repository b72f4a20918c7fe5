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

#ifndef DDPPM_CORE_BASELINE_H_
#define DDPPM_CORE_BASELINE_H_

#include <cstdint>

#include "ddppm/common.h"
#include "ddppm/data.h"

namespace ddppm::baseline {

struct LdpConfig {
  double epsilon = 1.0;
  double delta = 1e-5;
  std::uint64_t seed = 0;

  void Validate() const;
  double Variance() const;
};

// 2 ln(1.25 / delta) / epsilon^2.
double LdpVariance(double epsilon, double delta);

// Pooled X + G, G_ij ~ N(0, sigma^2). Agent i draws its block from its own
// substream.
data::Dataset LdpPerturb(const data::PartitionedDataset& data,
                         const LdpConfig& cfg);
// Same with an explicit variance; 0 returns X unchanged.
data::Dataset LdpPerturbWithVariance(const data::PartitionedDataset& data,
                                     double variance, std::uint64_t seed);

// Top-r left singular vectors, sign-canonicalized.
Matrix LdpEstimate(const data::Dataset& x_tilde, Index r);

}  // namespace ddppm::baseline

#endif  // DDPPM_CORE_BASELINE_H_
