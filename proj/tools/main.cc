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

#include <CLI11.hpp>

#include <iostream>

#include "cli/commands.h"

int main(int argc, char** argv) {
  using ddppm::cli::Overrides;
  CLI::App app{"Decentralized differentially private power method toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(ddppm::kVersion));

  Overrides o;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out, compose;
  double energy_tol = 0.0, gamma = 0.0;
  app.add_option("--config", o.config, "JSON experiment config")
      ->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "root RNG seed");
  auto* jobs_opt =
      app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out, "output directory");
  app.add_flag("--center", o.center, "mean-center columns before scaling");
  auto* compose_opt =
      app.add_option("--compose", compose, "multi-rank privacy composition")
          ->check(CLI::IsMember({"stacked", "naive-sum"}));
  auto* tol_opt = app.add_option("--energy-tol", energy_tol,
                                 "trace fraction kept by the audit reduction")
                      ->check(CLI::Range(0.0, 1.0));

  auto* validate = app.add_subcommand("validate", "check a mixing matrix");
  validate->add_option("topology", o.topology_file, "mixing matrix CSV");
  auto* run = app.add_subcommand("run", "one D-DP-PM run");
  run->add_flag("--trace", o.trace, "include the shared values");
  app.add_subcommand("sweep", "privacy-utility sweep against the LDP baseline");
  auto* audit = app.add_subcommand("audit", "per-observer privacy audit");
  audit->add_option("--epsilons", o.epsilons, "epsilon list");
  auto* bound = app.add_subcommand("bound", "convergence bound report");
  auto* gamma_opt = bound->add_option("--gamma", gamma, "failure probability");
  app.add_subcommand("figdata", "plot-ready CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ddppm::cli::kExitUsage;
  }
  if (seed_opt->count()) o.seed = seed;
  if (jobs_opt->count()) o.jobs = jobs;
  if (out_opt->count()) o.out = out;
  if (compose_opt->count()) o.compose = compose;
  if (tol_opt->count()) o.energy_tol = energy_tol;
  if (gamma_opt->count()) o.gamma = gamma;

  ddppm::cli::ConfigureLogging();
  std::string command = app.get_subcommands().front()->get_name();
  return ddppm::cli::Dispatch(command, o, std::cout, std::cerr);
}
