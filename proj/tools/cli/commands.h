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

#ifndef DDPPM_TOOLS_CLI_COMMANDS_H_
#define DDPPM_TOOLS_CLI_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.h"

namespace ddppm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUsage = 2;

// Command-line values; set fields override the config file.
struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
  bool center = false;
  std::optional<std::string> compose;
  std::optional<double> energy_tol;
  std::vector<double> epsilons;
  std::optional<double> gamma;
  std::string topology_file;  // validate
  bool trace = false;         // run
};

ExperimentConfig ResolveConfig(const Overrides& o);

// Each command writes its artifacts under the output directory and returns
// an exit code. Errors propagate as ddppm::Error.
int CmdValidate(const Overrides& o, std::ostream& out);
int CmdRun(const Overrides& o, std::ostream& out);
int CmdSweep(const Overrides& o, std::ostream& out);
int CmdAudit(const Overrides& o, std::ostream& out);
int CmdBound(const Overrides& o, std::ostream& out);
int CmdFigData(const Overrides& o, std::ostream& out);

// Dispatches by name and maps exceptions to exit codes, reporting them on
// `err`.
int Dispatch(const std::string& command, const Overrides& o, std::ostream& out,
             std::ostream& err);

// Applies DDPPM_LOG (trace, debug, info, warn, error, off).
void ConfigureLogging();

}  // namespace ddppm::cli

#endif  // DDPPM_TOOLS_CLI_COMMANDS_H_
