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

#ifndef DDPPM_CORE_PARALLEL_H_
#define DDPPM_CORE_PARALLEL_H_

#include <functional>

#include "ddppm/common.h"

namespace ddppm {

// Calls fn(k) for k in [0, count) on up to `jobs` threads. Each index runs
// exactly once; callers write results into per-index slots. The first
// exception thrown by any worker is rethrown after all workers join.
void ParallelFor(Index count, int jobs, const std::function<void(Index)>& fn);

}  // namespace ddppm

#endif  // DDPPM_CORE_PARALLEL_H_
