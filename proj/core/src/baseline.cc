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

#include "ddppm/baseline.h"

#include <cmath>

#include "ddppm/linalg.h"
#include "ddppm/random.h"

namespace ddppm::baseline {

double LdpVariance(double epsilon, double delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("epsilon must be positive and finite");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
  return 2.0 * std::log(1.25 / delta) / (epsilon * epsilon);
}

void LdpConfig::Validate() const { (void)LdpVariance(epsilon, delta); }

double LdpConfig::Variance() const { return LdpVariance(epsilon, delta); }

data::Dataset LdpPerturbWithVariance(const data::PartitionedDataset& data,
                                     double variance, std::uint64_t seed) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw InvalidArgument("noise variance must be finite and >= 0");
  }
  data::Dataset out{data.Stack()};
  if (variance == 0.0) return out;
  const double sigma = std::sqrt(variance);
  for (Index i = 0; i < data.agents(); ++i) {
    RandomStream rng(seed, StreamPurpose::kLdpNoise,
                     {static_cast<std::uint64_t>(i)});
    out.x.middleRows(data.start(i), data.size(i)) +=
        rng.NormalMatrix(data.size(i), data.dim(), sigma);
  }
  return out;
}

data::Dataset LdpPerturb(const data::PartitionedDataset& data,
                         const LdpConfig& cfg) {
  return LdpPerturbWithVariance(data, cfg.Variance(), cfg.seed);
}

Matrix LdpEstimate(const data::Dataset& x_tilde, Index r) {
  return TopLeftSingularVectors(x_tilde.x, r);
}

}  // namespace ddppm::baseline
