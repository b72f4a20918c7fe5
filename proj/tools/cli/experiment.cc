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

#include "cli/experiment.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "ddppm/analysis.h"
#include "ddppm/baseline.h"
#include "ddppm/parallel.h"
#include "ddppm/random.h"

namespace ddppm::cli {
namespace {

constexpr std::uint64_t kDdppmTag = 1;
constexpr std::uint64_t kLdpTag = 2;

}  // namespace

Matrix LoadMatrixCsv(const std::string& path) {
  return data::LoadCsv(path, false).rows;
}

Matrix TopologyMatrix(const TopologySpec& spec) {
  if (!spec.file.empty()) return LoadMatrixCsv(spec.file);
  const std::string& g = spec.generator.empty() ? "ring" : spec.generator;
  if (g == "ring") return network::RingMatrix(spec.agents, spec.self_weight);
  if (g == "complete") return network::CompleteMatrix(spec.agents);
  if (g == "path") return network::PathMatrix(spec.agents);
  throw ParseError("unknown topology generator '" + g + "'");
}

network::Topology BuildTopology(const TopologySpec& spec) {
  return network::Topology(TopologyMatrix(spec), spec.consensus_rounds);
}

Instance BuildInstance(const ExperimentConfig& cfg) {
  if (cfg.dataset.path.empty()) throw ParseError("config names no dataset");
  data::RawDataset raw =
      data::LoadCsv(cfg.dataset.path, cfg.dataset.header, cfg.dataset.columns);
  if (cfg.dataset.center) raw = data::CenterColumns(raw);
  data::Dataset x = data::NormalizeUnitBall(raw);
  network::Topology top = BuildTopology(cfg.topology);
  data::PartitionedDataset parts =
      data::PartitionRows(x, top.agents(), cfg.partition);
  network::NetworkOperator op = network::BuildNetworkOperator(parts, top);
  Index r = std::min<Index>(cfg.params.rank, std::min(x.x.rows(), x.x.cols()));
  Matrix exact = engine::ExactEigenvectors(x.x, r);
  spdlog::info("instance: n={} d={} m={} mu1={} mu2={} gap={}", x.x.rows(),
               x.x.cols(), top.agents(), op.mu(0),
               op.mu.size() > 1 ? op.mu(1) : 0.0, op.consensus_gap);
  return Instance{std::move(parts), std::move(top), std::move(op),
                  std::move(exact)};
}

engine::RunConfig ResolveRunConfig(const ExperimentConfig& cfg,
                                   const Instance& inst, int iterations,
                                   double eta, double alpha_factor) {
  const double mu1 = inst.op.mu(0);
  const double mu2 = inst.op.mu.size() > 1 ? inst.op.mu(1) : 0.0;
  analysis::SuggestedParameters s = analysis::SuggestParameters(
      mu1, mu2, inst.data.rows(), iterations, eta);
  if (s.alpha_fallback) spdlog::warn("{}", s.warning);
  engine::RunConfig run;
  run.iterations = iterations;
  run.rank = cfg.params.rank;
  run.alpha = cfg.params.alpha.value_or(s.alpha) * alpha_factor;
  run.sigma_q = cfg.params.sigma_q.value_or(s.sigma_q);
  if (cfg.params.sigma_p_constant) {
    run.sigma_p.assign(iterations,
                       *cfg.params.sigma_p_constant * eta / cfg.params.eta);
  } else if (cfg.params.sigma_p) {
    if (static_cast<int>(cfg.params.sigma_p->size()) < iterations) {
      throw InvalidArgument("params.sigma_p is shorter than the iteration count");
    }
    double scale = eta / cfg.params.eta;
    run.sigma_p.assign(cfg.params.sigma_p->begin(),
                       cfg.params.sigma_p->begin() + iterations);
    for (double& v : run.sigma_p) v *= scale;
  } else {
    run.sigma_p = s.sigma_p;
  }
  run.seed = cfg.seed;
  return run;
}

ErrorStats Summarize(const std::vector<double>& errors) {
  ErrorStats s;
  s.trials = static_cast<int>(errors.size());
  if (errors.empty()) return s;
  s.mean = std::accumulate(errors.begin(), errors.end(), 0.0) / errors.size();
  if (errors.size() > 1) {
    double ss = 0.0;
    for (double e : errors) ss += (e - s.mean) * (e - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(errors.size() - 1));
  }
  return s;
}

double TrialError(const Matrix& u_hat, const Matrix& exact) {
  Index r = std::min(u_hat.cols(), exact.cols());
  double total = 0.0;
  for (Index l = 0; l < r; ++l) {
    total += engine::SinError(exact.col(l), u_hat.col(l));
  }
  return total / static_cast<double>(r);
}

ErrorStats MonteCarloDdppm(const Instance& inst, engine::RunConfig run,
                           int trials, std::uint64_t seed, std::uint64_t point,
                           int jobs) {
  std::vector<double> errors(trials);
  ParallelFor(trials, jobs, [&](Index k) {
    engine::RunConfig local = run;
    local.seed = DeriveSeed(seed, StreamPurpose::kTrial,
                            {kDdppmTag, point, static_cast<std::uint64_t>(k)});
    engine::RunResult r = engine::RunDdppm(inst.data, inst.top, local);
    errors[k] = TrialError(r.u_hat, inst.exact);
  });
  return Summarize(errors);
}

ErrorStats MonteCarloLdp(const Instance& inst, double variance, int rank,
                         int trials, std::uint64_t seed, std::uint64_t point,
                         int jobs) {
  std::vector<double> errors(trials);
  ParallelFor(trials, jobs, [&](Index k) {
    std::uint64_t s = DeriveSeed(
        seed, StreamPurpose::kTrial,
        {kLdpTag, point, static_cast<std::uint64_t>(k)});
    data::Dataset noisy = baseline::LdpPerturbWithVariance(inst.data, variance, s);
    Matrix u = baseline::LdpEstimate(noisy, rank);
    errors[k] = TrialError(u, inst.exact);
  });
  return Summarize(errors);
}

int NoiselessIterations(const Instance& inst, double target, int t_max,
                        std::uint64_t seed) {
  RandomStream rng(seed, StreamPurpose::kGeneric, {0});
  Vector q = rng.NormalVector(inst.data.rows());
  const Vector v = inst.exact.col(0);
  for (int t = 1; t <= t_max; ++t) {
    q = inst.op.xi * q;
    q /= q.norm();
    if (engine::SinError(v, q) <= target) return t;
  }
  return t_max;
}

std::vector<privacy::Perturbation> PerturbationSet(const ExperimentConfig& cfg,
                                                   const Instance& inst,
                                                   Index rows_per_agent) {
  if (!cfg.audit.perturbations.empty()) {
    return privacy::LoadPerturbations(cfg.audit.perturbations,
                                      inst.data.dim());
  }
  return privacy::DefaultPerturbations(inst.data, cfg.seed, rows_per_agent,
                                       cfg.audit.random_directions);
}

privacy::AuditOptions MakeAuditOptions(const ExperimentConfig& cfg) {
  privacy::AuditOptions o;
  o.energy_tol = cfg.audit.energy_tol;
  o.random_realizations = cfg.audit.realizations;
  o.seed = cfg.seed;
  o.both_directions = cfg.audit.both_directions;
  o.compose = cfg.audit.compose;
  o.jobs = cfg.jobs;
  return o;
}

namespace {

struct GridPoint {
  double eta;
  double alpha_factor;
  int iterations;
  engine::RunConfig run;
  ErrorStats stats;
};

}  // namespace

SweepResult RunSweep(const ExperimentConfig& cfg, const Instance& inst) {
  if (cfg.delta_caps.size() != cfg.epsilons.size()) {
    throw InvalidArgument("sweep needs one delta cap per epsilon");
  }
  SweepResult out;
  out.t_star = NoiselessIterations(inst, cfg.sweep.target_error,
                                   cfg.sweep.t_max, cfg.seed);
  std::vector<int> depths;
  for (int off : cfg.sweep.t_offsets) {
    int t = std::max(1, out.t_star + off);
    if (std::find(depths.begin(), depths.end(), t) == depths.end()) {
      depths.push_back(t);
    }
  }
  std::sort(depths.begin(), depths.end());
  spdlog::info("sweep: T* = {}", out.t_star);

  std::vector<GridPoint> grid;
  for (double eta : cfg.sweep.etas) {
    for (double af : cfg.sweep.alpha_factors) {
      for (int t : depths) {
        grid.push_back({eta, af, t, ResolveRunConfig(cfg, inst, t, eta, af), {}});
      }
    }
  }
  out.grid_points = static_cast<int>(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    grid[g].stats = MonteCarloDdppm(inst, grid[g].run, cfg.trials, cfg.seed,
                                    g, cfg.jobs);
  }
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return grid[a].stats.mean < grid[b].stats.mean;
  });

  std::vector<privacy::Perturbation> perts =
      PerturbationSet(cfg, inst, cfg.sweep.audit_rows_per_agent);
  privacy::AuditOptions options = MakeAuditOptions(cfg);
  std::map<std::size_t, std::vector<double>> audits;
  auto audit = [&](std::size_t g) -> const std::vector<double>& {
    auto it = audits.find(g);
    if (it != audits.end()) return it->second;
    std::vector<privacy::PrivacyReport> reps = privacy::AuditPrivacy(
        inst.data, inst.top, grid[g].run, cfg.epsilons, perts, options);
    std::vector<double> deltas;
    for (const auto& r : reps) deltas.push_back(r.delta);
    spdlog::info("sweep: audited eta={} alpha={} T={}", grid[g].eta,
                 grid[g].run.alpha, grid[g].iterations);
    return audits.emplace(g, std::move(deltas)).first->second;
  };

  for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
    const double eps = cfg.epsilons[e], cap = cfg.delta_caps[e];
    SweepRow row;
    row.method = "ddppm";
    row.epsilon = eps;
    row.delta_cap = cap;
    std::size_t chosen = order.size();
    for (std::size_t g : order) {
      if (audit(g)[e] <= cap) {
        chosen = g;
        break;
      }
    }
    if (chosen == order.size()) {
      // Every point exceeds the cap; report the least leaky one.
      row.feasible = false;
      chosen = order.front();
      for (std::size_t g : order) {
        if (audit(g)[e] < audit(chosen)[e]) chosen = g;
      }
    }
    const GridPoint& gp = grid[chosen];
    row.stats = gp.stats;
    row.delta = audit(chosen)[e];
    row.eta = gp.eta;
    row.alpha = gp.run.alpha;
    row.iterations = gp.iterations;
    out.rows.push_back(row);

    SweepRow ldp;
    ldp.method = "ldp";
    ldp.epsilon = eps;
    ldp.delta_cap = cap;
    ldp.delta = cap;
    ldp.stats = MonteCarloLdp(inst, baseline::LdpVariance(eps, cap),
                              cfg.params.rank, cfg.trials, cfg.seed, e,
                              cfg.jobs);
    out.rows.push_back(ldp);
  }
  out.audited_points = static_cast<int>(audits.size());
  return out;
}

std::vector<DepthRow> RunDepthProfile(const ExperimentConfig& cfg,
                                      const Instance& inst) {
  std::vector<privacy::Perturbation> perts =
      PerturbationSet(cfg, inst, cfg.sweep.audit_rows_per_agent);
  privacy::AuditOptions options = MakeAuditOptions(cfg);
  const double eps[] = {cfg.fig.epsilon};
  std::vector<DepthRow> rows;
  for (int t = 1; t <= cfg.fig.t_max; ++t) {
    engine::RunConfig run = ResolveRunConfig(cfg, inst, t, cfg.params.eta, 1.0);
    DepthRow row;
    row.iterations = t;
    row.stats = MonteCarloDdppm(inst, run, cfg.trials, cfg.seed,
                                1000000 + static_cast<std::uint64_t>(t),
                                cfg.jobs);
    row.delta = privacy::AuditPrivacy(inst.data, inst.top, run, eps, perts,
                                      options)[0]
                    .delta;
    rows.push_back(row);
  }
  return rows;
}

std::string FormatNumber(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

std::string SweepCsv(const SweepResult& result, const std::string& header) {
  std::ostringstream out;
  out << header;
  out << "method,epsilon,delta_cap,mean_sin_error,std_sin_error,trials,"
         "delta,eta,alpha,iterations,feasible\n";
  for (const SweepRow& r : result.rows) {
    out << r.method << ',' << FormatNumber(r.epsilon) << ','
        << FormatNumber(r.delta_cap) << ',' << FormatNumber(r.stats.mean)
        << ',' << FormatNumber(r.stats.std) << ',' << r.stats.trials << ','
        << FormatNumber(r.delta) << ',';
    if (r.method == "ddppm") {
      out << FormatNumber(r.eta) << ',' << FormatNumber(r.alpha) << ','
          << r.iterations;
    } else {
      out << ",,";
    }
    out << ',' << (r.feasible ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string DepthCsv(const std::vector<DepthRow>& rows,
                     const std::string& header) {
  std::ostringstream out;
  out << header;
  out << "iterations,mean_sin_error,std_sin_error,trials,delta\n";
  for (const DepthRow& r : rows) {
    out << r.iterations << ',' << FormatNumber(r.stats.mean) << ','
        << FormatNumber(r.stats.std) << ',' << r.stats.trials << ','
        << FormatNumber(r.delta) << '\n';
  }
  return out.str();
}

}  // namespace ddppm::cli
