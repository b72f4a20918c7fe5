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

#include "cli/config.h"

#include <openssl/evp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace ddppm::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void CheckKeys(const json& obj, const std::string& where,
               const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ParseError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ParseError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

template <typename T>
void Read(const json& obj, const std::string& key, const std::string& where,
          T& out) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + "." + key + ": " + e.what());
  }
}

std::string Resolve(const std::string& path, const std::string& base) {
  if (path.empty() || base.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base) / p).lexically_normal().string();
}

}  // namespace

privacy::Composition ParseComposition(const std::string& name) {
  if (name == "auto") return privacy::Composition::kAuto;
  if (name == "stacked") return privacy::Composition::kStacked;
  if (name == "naive-sum") return privacy::Composition::kNaiveSum;
  throw ParseError("unknown composition '" + name + "'");
}

std::string CompositionName(privacy::Composition c) {
  switch (c) {
    case privacy::Composition::kStacked:
      return "stacked";
    case privacy::Composition::kNaiveSum:
      return "naive-sum";
    default:
      return "auto";
  }
}

ExperimentConfig ParseConfig(const std::string& text,
                             const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  CheckKeys(root, "config",
            {"dataset", "topology", "partition", "params", "seed", "epsilons",
             "delta_caps", "trials", "gamma", "audit", "sweep", "figdata",
             "out", "jobs"});
  ExperimentConfig cfg;
  if (root.contains("dataset")) {
    const json& d = root["dataset"];
    CheckKeys(d, "dataset", {"path", "header", "columns", "center"});
    Read(d, "path", "dataset", cfg.dataset.path);
    Read(d, "header", "dataset", cfg.dataset.header);
    Read(d, "columns", "dataset", cfg.dataset.columns);
    Read(d, "center", "dataset", cfg.dataset.center);
    cfg.dataset.path = Resolve(cfg.dataset.path, base_dir);
  }
  if (root.contains("topology")) {
    const json& t = root["topology"];
    CheckKeys(t, "topology", {"file", "generator", "agents", "self_weight",
                              "consensus_rounds"});
    Read(t, "file", "topology", cfg.topology.file);
    Read(t, "generator", "topology", cfg.topology.generator);
    Read(t, "agents", "topology", cfg.topology.agents);
    Read(t, "self_weight", "topology", cfg.topology.self_weight);
    Read(t, "consensus_rounds", "topology", cfg.topology.consensus_rounds);
    cfg.topology.file = Resolve(cfg.topology.file, base_dir);
  }
  if (root.contains("partition") && !root["partition"].is_null()) {
    std::vector<Index> sizes;
    Read(root, "partition", "config", sizes);
    cfg.partition = sizes;
  }
  if (root.contains("params")) {
    const json& p = root["params"];
    CheckKeys(p, "params",
              {"iterations", "rank", "alpha", "sigma_q", "sigma_p", "eta"});
    Read(p, "iterations", "params", cfg.params.iterations);
    Read(p, "rank", "params", cfg.params.rank);
    Read(p, "eta", "params", cfg.params.eta);
    if (p.contains("alpha") && !p["alpha"].is_null()) {
      double a = 0;
      Read(p, "alpha", "params", a);
      cfg.params.alpha = a;
    }
    if (p.contains("sigma_q") && !p["sigma_q"].is_null()) {
      double s = 0;
      Read(p, "sigma_q", "params", s);
      cfg.params.sigma_q = s;
    }
    if (p.contains("sigma_p") && !p["sigma_p"].is_null()) {
      if (p["sigma_p"].is_number()) {
        double c = 0;
        Read(p, "sigma_p", "params", c);
        cfg.params.sigma_p_constant = c;
      } else {
        std::vector<double> s;
        Read(p, "sigma_p", "params", s);
        cfg.params.sigma_p = s;
      }
    }
  }
  Read(root, "seed", "config", cfg.seed);
  Read(root, "epsilons", "config", cfg.epsilons);
  Read(root, "delta_caps", "config", cfg.delta_caps);
  Read(root, "trials", "config", cfg.trials);
  Read(root, "gamma", "config", cfg.gamma);
  Read(root, "out", "config", cfg.out);
  Read(root, "jobs", "config", cfg.jobs);
  cfg.out = Resolve(cfg.out, base_dir);
  if (root.contains("audit")) {
    const json& a = root["audit"];
    CheckKeys(a, "audit",
              {"energy_tol", "realizations", "rows_per_agent",
               "random_directions", "perturbations", "compose",
               "both_directions"});
    Read(a, "energy_tol", "audit", cfg.audit.energy_tol);
    Read(a, "realizations", "audit", cfg.audit.realizations);
    Read(a, "rows_per_agent", "audit", cfg.audit.rows_per_agent);
    Read(a, "random_directions", "audit", cfg.audit.random_directions);
    Read(a, "perturbations", "audit", cfg.audit.perturbations);
    Read(a, "both_directions", "audit", cfg.audit.both_directions);
    std::string compose;
    Read(a, "compose", "audit", compose);
    if (!compose.empty()) cfg.audit.compose = ParseComposition(compose);
    cfg.audit.perturbations = Resolve(cfg.audit.perturbations, base_dir);
  }
  if (root.contains("sweep")) {
    const json& s = root["sweep"];
    CheckKeys(s, "sweep", {"etas", "alpha_factors", "t_offsets",
                           "target_error", "t_max", "audit_rows_per_agent"});
    Read(s, "etas", "sweep", cfg.sweep.etas);
    Read(s, "alpha_factors", "sweep", cfg.sweep.alpha_factors);
    Read(s, "t_offsets", "sweep", cfg.sweep.t_offsets);
    Read(s, "target_error", "sweep", cfg.sweep.target_error);
    Read(s, "t_max", "sweep", cfg.sweep.t_max);
    Read(s, "audit_rows_per_agent", "sweep", cfg.sweep.audit_rows_per_agent);
  }
  if (root.contains("figdata")) {
    const json& f = root["figdata"];
    CheckKeys(f, "figdata", {"epsilon", "t_max"});
    Read(f, "epsilon", "figdata", cfg.fig.epsilon);
    Read(f, "t_max", "figdata", cfg.fig.t_max);
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string base = std::filesystem::path(path).parent_path().string();
  return ParseConfig(buf.str(), base);
}

void ExperimentConfig::Validate() const {
  auto fail = [](const std::string& m) { throw InvalidArgument(m); };
  if (epsilons.empty()) fail("epsilon schedule is empty");
  for (double e : epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) fail("epsilons must be positive");
  }
  if (!delta_caps.empty() && delta_caps.size() != epsilons.size()) {
    fail("delta_caps must match the epsilon schedule in length");
  }
  for (double d : delta_caps) {
    if (!(d > 0.0 && d < 1.0)) fail("delta caps must lie in (0, 1)");
  }
  if (trials < 1) fail("trials must be >= 1");
  if (jobs < 1) fail("jobs must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0, 1)");
  if (params.iterations < 0) fail("iterations must be >= 0");
  if (params.rank < 1) fail("rank must be >= 1");
  if (topology.consensus_rounds < 1) fail("consensus_rounds must be >= 1");
  if (!(audit.energy_tol > 0.0 && audit.energy_tol <= 1.0)) {
    fail("energy_tol must lie in (0, 1]");
  }
  if (audit.realizations < 0) fail("realizations must be >= 0");
  if (sweep.etas.empty() || sweep.alpha_factors.empty() ||
      sweep.t_offsets.empty()) {
    fail("sweep grids must be non-empty");
  }
  if (fig.t_max < 1) fail("figdata.t_max must be >= 1");
  auto exists = [](const std::string& p, const std::string& what) {
    if (!p.empty() && !std::filesystem::exists(p)) {
      throw ParseError(what + " not found: " + p);
    }
  };
  exists(dataset.path, "dataset");
  exists(topology.file, "topology file");
  exists(audit.perturbations, "perturbation file");
}

ordered_json ExperimentConfig::ToJson() const {
  ordered_json j;
  j["dataset"] = {{"path", dataset.path},
                  {"header", dataset.header},
                  {"columns", dataset.columns},
                  {"center", dataset.center}};
  j["topology"] = {{"file", topology.file},
                   {"generator", topology.generator},
                   {"agents", topology.agents},
                   {"self_weight", topology.self_weight},
                   {"consensus_rounds", topology.consensus_rounds}};
  j["partition"] = partition ? ordered_json(*partition) : ordered_json(nullptr);
  ordered_json p;
  p["iterations"] = params.iterations;
  p["rank"] = params.rank;
  p["alpha"] = params.alpha ? ordered_json(*params.alpha) : ordered_json(nullptr);
  p["sigma_q"] =
      params.sigma_q ? ordered_json(*params.sigma_q) : ordered_json(nullptr);
  if (params.sigma_p_constant) {
    p["sigma_p"] = *params.sigma_p_constant;
  } else {
    p["sigma_p"] =
        params.sigma_p ? ordered_json(*params.sigma_p) : ordered_json(nullptr);
  }
  p["eta"] = params.eta;
  j["params"] = p;
  j["seed"] = seed;
  j["epsilons"] = epsilons;
  j["delta_caps"] = delta_caps;
  j["trials"] = trials;
  j["gamma"] = gamma;
  j["audit"] = {{"energy_tol", audit.energy_tol},
                {"realizations", audit.realizations},
                {"rows_per_agent", audit.rows_per_agent},
                {"random_directions", audit.random_directions},
                {"perturbations", audit.perturbations},
                {"compose", CompositionName(audit.compose)},
                {"both_directions", audit.both_directions}};
  j["sweep"] = {{"etas", sweep.etas},
                {"alpha_factors", sweep.alpha_factors},
                {"t_offsets", sweep.t_offsets},
                {"target_error", sweep.target_error},
                {"t_max", sweep.t_max},
                {"audit_rows_per_agent", sweep.audit_rows_per_agent}};
  j["figdata"] = {{"epsilon", fig.epsilon}, {"t_max", fig.t_max}};
  // Output location and worker count do not affect results.
  return j;
}

std::string ConfigDigest(const ExperimentConfig& cfg) {
  std::string text = cfg.ToJson().dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) !=
      1) {
    throw Error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(hex[md[k] >> 4]);
    out.push_back(hex[md[k] & 15]);
  }
  return out;
}

}  // namespace ddppm::cli
