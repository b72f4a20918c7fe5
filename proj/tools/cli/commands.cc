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

#include "cli/commands.h"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "cli/experiment.h"
#include "ddppm/analysis.h"
#include "ddppm/serialization.h"

namespace ddppm::cli {
namespace {

using nlohmann::ordered_json;

ordered_json Envelope(const std::string& command, const ExperimentConfig& cfg) {
  ordered_json j;
  j["tool"] = "ddppm";
  j["version"] = kVersion;
  j["command"] = command;
  j["config_digest"] = ConfigDigest(cfg);
  j["config"] = cfg.ToJson();
  return j;
}

std::string CsvHeader(const std::string& command, const ExperimentConfig& cfg) {
  return "# tool=ddppm version=" + std::string(kVersion) + " command=" +
         command + " config_digest=" + ConfigDigest(cfg) + "\n";
}

std::filesystem::path WriteArtifact(const std::string& dir,
                                    const std::string& name,
                                    const std::string& content) {
  std::filesystem::create_directories(dir);
  std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f << content;
  if (!f) throw Error("write failure on " + path.string());
  return path;
}

ordered_json NetworkJson(const Instance& inst) {
  ordered_json j;
  j["agents"] = inst.data.agents();
  j["rows"] = inst.data.rows();
  j["dim"] = inst.data.dim();
  j["consensus_rounds"] = inst.top.consensus_rounds();
  j["lambda2_w"] = JsonNumber(inst.top.lambda2());
  j["mu1"] = JsonNumber(inst.op.mu(0));
  j["mu2"] = JsonNumber(inst.op.mu.size() > 1 ? inst.op.mu(1) : 0.0);
  j["lambda1"] = JsonNumber(inst.op.lambda1);
  j["lambda2"] = JsonNumber(inst.op.lambda2);
  j["consensus_gap"] = JsonNumber(inst.op.consensus_gap);
  j["min_eigenvalue"] = JsonNumber(inst.op.min_eigenvalue);
  j["negative_eigenvalue_flag"] = inst.op.negative_eigenvalue_flag;
  return j;
}

}  // namespace

void ConfigureLogging() {
  auto logger = spdlog::stderr_logger_mt("ddppm");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("DDPPM_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

ExperimentConfig ResolveConfig(const Overrides& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{}
                                          : LoadConfig(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.out) cfg.out = *o.out;
  if (o.center) cfg.dataset.center = true;
  if (o.compose) cfg.audit.compose = ParseComposition(*o.compose);
  if (o.energy_tol) cfg.audit.energy_tol = *o.energy_tol;
  if (!o.epsilons.empty()) cfg.epsilons = o.epsilons;
  if (o.gamma) cfg.gamma = *o.gamma;
  cfg.Validate();
  return cfg;
}

int CmdValidate(const Overrides& o, std::ostream& out) {
  Matrix w;
  ExperimentConfig cfg;
  if (!o.topology_file.empty()) {
    w = LoadMatrixCsv(o.topology_file);
    cfg.topology.file = o.topology_file;
  } else {
    if (o.config.empty()) throw ParseError("validate needs a topology file");
    cfg = ResolveConfig(o);
    w = TopologyMatrix(cfg.topology);
  }
  network::MixingDiagnostics d = network::ValidateMixingMatrix(w);
  if (!d.square) {
    out << "square: FAIL (" << w.rows() << "x" << w.cols() << ")\n";
    throw ParseError("mixing matrix is not square");
  }
  auto line = [&out](const char* name, bool ok) {
    out << name << ": " << (ok ? "pass" : "FAIL") << "\n";
  };
  line("square", d.square);
  line("nonnegative", d.nonnegative);
  line("symmetric", d.symmetric);
  line("row_stochastic", d.row_stochastic);
  line("column_stochastic", d.column_stochastic);
  line("connected", d.connected);
  line("lambda2_below_one", d.lambda2_below_one);
  out << "lambda2: " << FormatNumber(d.lambda2) << "\n";
  out << "valid: " << (d.valid() ? "yes" : "no") << "\n";
  if (o.out) {
    cfg.out = *o.out;
    ordered_json j = Envelope("validate", cfg);
    j["diagnostics"] = ToJson(d);
    WriteArtifact(cfg.out, "validate.json", j.dump(2) + "\n");
  }
  return d.valid() ? kExitOk : kExitInvalid;
}

int CmdRun(const Overrides& o, std::ostream& out) {
  ExperimentConfig cfg = ResolveConfig(o);
  Instance inst = BuildInstance(cfg);
  engine::RunConfig run = ResolveRunConfig(cfg, inst, cfg.params.iterations,
                                           cfg.params.eta, 1.0);
  run.record_trace = o.trace;
  engine::RunResult result = engine::RunDdppm(inst.data, inst.top, run);
  ordered_json j = Envelope("run", cfg);
  j["network"] = NetworkJson(inst);
  j["run_config"] = ToJson(run);
  j["result"] = ToJson(result, inst.exact);
  auto path = WriteArtifact(cfg.out, "run.json", j.dump(2) + "\n");
  for (std::size_t l = 0; l < j["result"]["sin_errors"].size(); ++l) {
    out << "rank " << l + 1 << " sin error: "
        << FormatNumber(j["result"]["sin_errors"][l].get<double>()) << "\n";
  }
  out << "wrote " << path.string() << "\n";
  return kExitOk;
}

int CmdAudit(const Overrides& o, std::ostream& out) {
  ExperimentConfig cfg = ResolveConfig(o);
  Instance inst = BuildInstance(cfg);
  engine::RunConfig run = ResolveRunConfig(cfg, inst, cfg.params.iterations,
                                           cfg.params.eta, 1.0);
  std::vector<privacy::Perturbation> perts =
      PerturbationSet(cfg, inst, cfg.audit.rows_per_agent);
  std::vector<privacy::PrivacyReport> reports = privacy::AuditPrivacy(
      inst.data, inst.top, run, cfg.epsilons, perts, MakeAuditOptions(cfg));
  ordered_json j = Envelope("audit", cfg);
  j["run_config"] = ToJson(run);
  ordered_json reps = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json rj = ToJson(r);
    rj["config_digest"] = j["config_digest"];
    reps.push_back(rj);
    out << "epsilon " << FormatNumber(r.epsilon)
        << " delta " << FormatNumber(r.delta) << "\n";
  }
  j["reports"] = reps;
  auto path = WriteArtifact(cfg.out, "audit.json", j.dump(2) + "\n");
  out << "wrote " << path.string() << "\n";
  return kExitOk;
}

int CmdBound(const Overrides& o, std::ostream& out) {
  ExperimentConfig cfg = ResolveConfig(o);
  Instance inst = BuildInstance(cfg);
  engine::RunConfig run = ResolveRunConfig(cfg, inst, cfg.params.iterations,
                                           cfg.params.eta, 1.0);
  analysis::BoundReport rep = analysis::ConvergenceBound(
      inst.data, inst.top, inst.op, run, cfg.gamma);
  for (const auto& w : rep.warnings) spdlog::warn("{}", w);
  ordered_json j = Envelope("bound", cfg);
  j["run_config"] = ToJson(run);
  j["bound"] = ToJson(rep);
  auto path = WriteArtifact(cfg.out, "bound.json", j.dump(2) + "\n");
  out << "total " << FormatNumber(rep.total)
      << (rep.vacuous ? " (vacuous)" : "") << "\n";
  out << "wrote " << path.string() << "\n";
  return kExitOk;
}

int CmdSweep(const Overrides& o, std::ostream& out) {
  ExperimentConfig cfg = ResolveConfig(o);
  Instance inst = BuildInstance(cfg);
  SweepResult result = RunSweep(cfg, inst);
  auto path = WriteArtifact(cfg.out, "sweep.csv",
                            SweepCsv(result, CsvHeader("sweep", cfg)));
  bool feasible = true;
  for (const SweepRow& r : result.rows) {
    out << r.method << " epsilon " << FormatNumber(r.epsilon) << " error "
        << FormatNumber(r.stats.mean) << " delta " << FormatNumber(r.delta)
        << (r.feasible ? "" : " INFEASIBLE") << "\n";
    feasible = feasible && r.feasible;
  }
  out << "wrote " << path.string() << "\n";
  return feasible ? kExitOk : kExitInvalid;
}

int CmdFigData(const Overrides& o, std::ostream& out) {
  ExperimentConfig cfg = ResolveConfig(o);
  Instance inst = BuildInstance(cfg);
  SweepResult sweep = RunSweep(cfg, inst);
  auto p1 = WriteArtifact(cfg.out, "fig_error_vs_epsilon.csv",
                          SweepCsv(sweep, CsvHeader("figdata", cfg)));
  std::vector<DepthRow> depth = RunDepthProfile(cfg, inst);
  auto p2 = WriteArtifact(cfg.out, "fig_error_vs_iterations.csv",
                          DepthCsv(depth, CsvHeader("figdata", cfg)));
  out << "wrote " << p1.string() << "\n" << "wrote " << p2.string() << "\n";
  return kExitOk;
}

int Dispatch(const std::string& command, const Overrides& o, std::ostream& out,
             std::ostream& err) {
  try {
    if (command == "validate") return CmdValidate(o, out);
    if (command == "run") return CmdRun(o, out);
    if (command == "sweep") return CmdSweep(o, out);
    if (command == "audit") return CmdAudit(o, out);
    if (command == "bound") return CmdBound(o, out);
    if (command == "figdata") return CmdFigData(o, out);
    err << "error: unknown command '" << command << "'\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace ddppm::cli
