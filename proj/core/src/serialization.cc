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

#include "ddppm/serialization.h"

#include <cmath>

namespace ddppm {

using nlohmann::ordered_json;

ordered_json JsonNumber(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

namespace {

ordered_json Doubles(const std::vector<double>& v) {
  ordered_json out = ordered_json::array();
  for (double x : v) out.push_back(JsonNumber(x));
  return out;
}

ordered_json Doubles(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(JsonNumber(v(k)));
  return out;
}

}  // namespace

ordered_json ToJson(const network::MixingDiagnostics& d) {
  ordered_json j;
  j["square"] = d.square;
  j["nonnegative"] = d.nonnegative;
  j["symmetric"] = d.symmetric;
  j["row_stochastic"] = d.row_stochastic;
  j["column_stochastic"] = d.column_stochastic;
  j["connected"] = d.connected;
  j["lambda2_below_one"] = d.lambda2_below_one;
  j["lambda2"] = JsonNumber(d.lambda2);
  j["failures"] = d.failures;
  j["valid"] = d.valid();
  return j;
}

ordered_json ToJson(const engine::RunConfig& cfg) {
  ordered_json j;
  j["iterations"] = cfg.iterations;
  j["rank"] = cfg.rank;
  j["alpha"] = JsonNumber(cfg.alpha);
  j["sigma_q"] = JsonNumber(cfg.sigma_q);
  j["sigma_p"] = Doubles(std::vector<double>(
      cfg.sigma_p.begin(), cfg.sigma_p.begin() + cfg.iterations));
  j["seed"] = cfg.seed;
  return j;
}

ordered_json ToJson(const engine::RunResult& result, const Matrix& exact) {
  ordered_json j;
  ordered_json cols = ordered_json::array();
  for (Index l = 0; l < result.u_hat.cols(); ++l) {
    cols.push_back(Doubles(Vector(result.u_hat.col(l))));
  }
  j["u_hat"] = cols;
  if (exact.cols() > 0) {
    std::vector<double> errs;
    for (Index l = 0; l < std::min(exact.cols(), result.u_hat.cols()); ++l) {
      errs.push_back(
          engine::SinError(exact.col(l), result.u_hat.col(l)));
    }
    j["sin_errors"] = Doubles(errs);
  }
  j["final_norms"] = Doubles(result.final_norms);
  ordered_json norms = ordered_json::array();
  for (const auto& v : result.iterate_norms) norms.push_back(Doubles(v));
  j["iterate_norms"] = norms;
  j["deflation_norms"] = Doubles(result.deflation_norms);
  if (!result.trace.empty()) {
    ordered_json trace = ordered_json::array();
    for (const auto& rank : result.trace) {
      ordered_json r;
      ordered_json its = ordered_json::array();
      for (const auto& it : rank.iterations) {
        ordered_json z = ordered_json::array(), zh = ordered_json::array();
        for (const Vector& v : it.z) z.push_back(Doubles(v));
        for (const Vector& v : it.z_half) zh.push_back(Doubles(v));
        its.push_back({{"z", z}, {"z_half", zh}});
      }
      r["iterations"] = its;
      r["q_final"] = Doubles(rank.q_final);
      trace.push_back(r);
    }
    j["trace"] = trace;
  }
  return j;
}

ordered_json ToJson(const privacy::PrivacyReport& report) {
  ordered_json j;
  j["epsilon"] = JsonNumber(report.epsilon);
  j["delta"] = JsonNumber(report.delta);
  j["worst_observer"] = report.worst_observer;
  j["perturbation_id"] = report.perturbation_id;
  j["perturbations"] = report.perturbations;
  j["composition"] = report.composition;
  ordered_json obs = ordered_json::array();
  for (const auto& o : report.per_observer) {
    ordered_json e;
    e["agent"] = o.agent;
    e["delta"] = JsonNumber(o.delta);
    e["beta_star"] = JsonNumber(o.beta_star);
    e["perturbation_id"] = o.perturbation_id;
    e["reduced_rank"] = o.reduced_rank;
    e["infinite_divergence"] = o.infinite;
    obs.push_back(e);
  }
  j["per_observer"] = obs;
  j["certificate"] =
      "lower bound over the supplied perturbation set, conditional on the "
      "rank reduction";
  j["diagnostics"] = report.diagnostics;
  return j;
}

ordered_json ToJson(const analysis::BoundReport& r) {
  ordered_json j;
  j["gamma"] = JsonNumber(r.gamma);
  j["theta"] = JsonNumber(r.theta);
  j["delta_hw"] = JsonNumber(r.delta_hw);
  j["rho"] = JsonNumber(r.rho);
  j["consensus_term"] = JsonNumber(r.consensus_term);
  j["decay_term"] = JsonNumber(r.decay_term);
  j["total"] = JsonNumber(r.total);
  j["vacuous"] = r.vacuous;
  j["hw_converged"] = r.hw_converged;
  j["expected_sin2"] = JsonNumber(r.expected_sin2);
  j["lambda1"] = JsonNumber(r.lambda1);
  j["lambda2"] = JsonNumber(r.lambda2);
  j["mu1"] = JsonNumber(r.mu1);
  j["mu2"] = JsonNumber(r.mu2);
  j["consensus_gap"] = JsonNumber(r.consensus_gap);
  j["lambda2_w"] = JsonNumber(r.lambda2_w);
  j["observer_size"] = r.observer_size;
  j["rows"] = r.rows;
  j["checks"] = {{"eigengap_positive", r.eigengap_positive},
                 {"mixing_valid", r.mixing_valid},
                 {"consensus_within_eigengap", r.consensus_within_eigengap}};
  j["deflated_rounds_heuristic"] = r.deflated_rounds_heuristic;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace ddppm
