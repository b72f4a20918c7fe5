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

#ifndef DDPPM_TOOLS_CLI_CONFIG_H_
#define DDPPM_TOOLS_CLI_CONFIG_H_

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddppm/common.h"
#include "ddppm/privacy.h"

namespace ddppm::cli {

struct DatasetSpec {
  std::string path;
  bool header = true;
  std::vector<int> columns;
  bool center = false;
};

// Either a CSV file or a generator (ring, complete, path).
struct TopologySpec {
  std::string file;
  std::string generator;
  Index agents = 4;
  double self_weight = 0.5;
  int consensus_rounds = 60;
};

// Unset values are filled from the suggested parameters of the instance.
struct ParamSpec {
  int iterations = 10;
  int rank = 1;
  std::optional<double> alpha;
  std::optional<double> sigma_q;
  std::optional<std::vector<double>> sigma_p;
  // A scalar sigma_p: the same value at every iteration, whatever T is.
  std::optional<double> sigma_p_constant;
  double eta = 1.0;
};

struct AuditSpec {
  double energy_tol = 0.99;
  int realizations = 8;
  Index rows_per_agent = 0;  // 0 audits every row
  int random_directions = 4;
  std::string perturbations;  // optional file
  privacy::Composition compose = privacy::Composition::kAuto;
  bool both_directions = true;
};

struct SweepSpec {
  std::vector<double> etas{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> alpha_factors{0.9, 1.0, 1.1};
  std::vector<int> t_offsets{-4, -2, 0, 2, 4};
  double target_error = 1e-3;
  int t_max = 100;
  Index audit_rows_per_agent = 2;
};

struct FigSpec {
  double epsilon = 5.0;
  int t_max = 15;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  TopologySpec topology;
  std::optional<std::vector<Index>> partition;
  ParamSpec params;
  std::uint64_t seed = 0;
  std::vector<double> epsilons{1, 2, 5, 10, 20, 40, 100};
  std::vector<double> delta_caps;
  int trials = 100;
  double gamma = 0.1;
  AuditSpec audit;
  SweepSpec sweep;
  FigSpec fig;
  std::string out = "out";
  int jobs = 1;

  // Range and consistency checks; throws InvalidArgument.
  void Validate() const;
  // Canonical echo; the digest is computed over its compact dump.
  nlohmann::ordered_json ToJson() const;
};

// Parses a JSON config. Relative paths resolve against `base_dir`. Unknown
// keys and wrong types raise ParseError.
ExperimentConfig ParseConfig(const std::string& text,
                             const std::string& base_dir);
ExperimentConfig LoadConfig(const std::string& path);

privacy::Composition ParseComposition(const std::string& name);
std::string CompositionName(privacy::Composition c);

// Hex SHA-256 of the canonical config echo.
std::string ConfigDigest(const ExperimentConfig& cfg);

}  // namespace ddppm::cli

#endif  // DDPPM_TOOLS_CLI_CONFIG_H_
