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

#ifndef DDPPM_CORE_RANDOM_H_
#define DDPPM_CORE_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

#include "ddppm/common.h"

namespace ddppm {

// Purpose tags keep substreams for different consumers disjoint.
enum class StreamPurpose : std::uint64_t {
  kInitialIterate = 1,
  kIterationNoise = 2,
  kLdpNoise = 3,
  kTrial = 4,
  kPerturbation = 5,
  kRealization = 6,
  kGeneric = 7,
};

// Derives a child seed from a root seed and a path of counters. The mapping
// goes through std::seed_seq, so changing one counter (for example the number
// of agents) never shifts the draws of a stream addressed by another path.
std::uint64_t DeriveSeed(std::uint64_t root, StreamPurpose purpose,
                         std::initializer_list<std::uint64_t> path);

// Gaussian and uniform draws from one addressed substream.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t root, StreamPurpose purpose,
               std::initializer_list<std::uint64_t> path)
      : engine_(DeriveSeed(root, purpose, path)) {}

  double Normal() { return normal_(engine_); }
  double Uniform() { return uniform_(engine_); }

  // n i.i.d. N(0, sigma^2) entries.
  Vector NormalVector(Index n, double sigma = 1.0);
  Matrix NormalMatrix(Index rows, Index cols, double sigma = 1.0);
  // Uniformly distributed direction on the unit sphere in R^n.
  Vector UnitVector(Index n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace ddppm

#endif  // DDPPM_CORE_RANDOM_H_
