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

#include "ddppm/random.h"

#include <cmath>
#include <vector>

namespace ddppm {

std::uint64_t DeriveSeed(std::uint64_t root, StreamPurpose purpose,
                         std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(4 + 2 * path.size());
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(root);
  push(static_cast<std::uint64_t>(purpose));
  for (std::uint64_t p : path) push(p);
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

Vector RandomStream::NormalVector(Index n, double sigma) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = sigma * normal_(engine_);
  return v;
}

Matrix RandomStream::NormalMatrix(Index rows, Index cols, double sigma) {
  // Row-major fill so that row blocks of a matrix match per-row draws.
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) a(i, j) = sigma * normal_(engine_);
  }
  return a;
}

Vector RandomStream::UnitVector(Index n) {
  Vector v;
  double norm = 0.0;
  do {
    v = NormalVector(n);
    norm = v.norm();
  } while (norm < 1e-300);
  return v / norm;
}

}  // namespace ddppm
