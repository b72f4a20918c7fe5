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

#ifndef DDPPM_CORE_SERIALIZATION_H_
#define DDPPM_CORE_SERIALIZATION_H_

#include <nlohmann/json.hpp>

#include <span>

#include "ddppm/analysis.h"
#include "ddppm/engine.h"
#include "ddppm/network.h"
#include "ddppm/privacy.h"

namespace ddppm {

// Non-finite doubles become null.
nlohmann::ordered_json JsonNumber(double x);

nlohmann::ordered_json ToJson(const network::MixingDiagnostics& d);
nlohmann::ordered_json ToJson(const engine::RunConfig& cfg);
// Includes sin errors against `exact` when it has at least one column.
nlohmann::ordered_json ToJson(const engine::RunResult& result,
                              const Matrix& exact);
nlohmann::ordered_json ToJson(const privacy::PrivacyReport& report);
nlohmann::ordered_json ToJson(const analysis::BoundReport& report);

}  // namespace ddppm

#endif  // DDPPM_CORE_SERIALIZATION_H_
