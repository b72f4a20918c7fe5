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

#include "ddppm/analysis.h"

#include <cmath>
#include <limits>

#include "ddppm/linalg.h"

namespace ddppm::analysis {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sum_k (a)^{-2k} s_k^2 evaluated in log space; zero-noise terms drop out.
double WeightedNoise(const std::vector<double>& sigma_p, int iterations,
                     double a) {
  double total = 0.0;
  const double log_a = std::log(a);
  for (int k = 1; k <= iterations; ++k) {
    double s = sigma_p[k - 1];
    if (s == 0.0) continue;
    total += std::exp(2.0 * (std::log(s) - k * log_a));
  }
  return total;
}

}  // namespace

OmegaModel BuildOmega(const network::NetworkOperator& op,
                      const engine::RunConfig& cfg) {
  cfg.Validate();
  if (!IsSymmetric(op.xi, 1e-10)) {
    throw InvalidArgument("network operator is not symmetric");
  }
  const int T = cfg.iterations;
  OmegaModel out;
  out.basis = op.eigenvectors;
  out.variances.resize(op.mu.size());
  for (Index i = 0; i < op.mu.size(); ++i) {
    double g = cfg.alpha * op.mu(i);
    double var = std::pow(g, 2 * T) * cfg.sigma_q * cfg.sigma_q;
    for (int k = 1; k <= T; ++k) {
      var += std::pow(g, 2 * (T - k)) * cfg.SigmaP(k) * cfg.SigmaP(k);
    }
    out.variances(i) = var;
  }
  out.omega = out.basis * out.variances.asDiagonal() * out.basis.transpose();
  out.omega = 0.5 * (out.omega + out.omega.transpose());
  return out;
}

double Rho(const engine::RunConfig& cfg, double mu1, double mu2) {
  if (!(cfg.alpha * mu2 > 0.0)) {
    throw InvalidArgument("rho needs alpha * mu2 > 0");
  }
  if (mu2 > mu1) throw InvalidArgument("rho needs mu1 >= mu2");
  const double s2 = cfg.sigma_q * cfg.sigma_q;
  double num = s2 + WeightedNoise(cfg.sigma_p, cfg.iterations, cfg.alpha * mu2);
  double den = s2 + WeightedNoise(cfg.sigma_p, cfg.iterations, cfg.alpha * mu1);
  if (!(den > 0.0)) throw InvalidArgument("rho denominator vanishes");
  return num / den;
}

double RhoUpperBound(double sigma_q, double alpha, double mu1) {
  double g = alpha * mu1;
  if (!(g > 1.0)) throw InvalidArgument("bound needs alpha * mu1 > 1");
  if (!(sigma_q > 0.0)) throw InvalidArgument("sigma_q must be positive");
  return 1.0 + 1.0 / (sigma_q * sigma_q * (1.0 - 1.0 / (g * g)));
}

namespace {

struct HwTerms {
  Matrix q;
  Matrix omega;
  double trace = 0.0;
  double base = 0.0;  // 1 - v^T Omega v / Tr Omega
  double log_inv_gamma = 0.0;
};

HwTerms PrepareHw(const Matrix& omega, const Vector& v, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw InvalidArgument("gamma must lie in (0, 1)");
  }
  if (omega.rows() != omega.cols() || omega.rows() != v.size()) {
    throw InvalidArgument("Omega and v dimensions disagree");
  }
  if (std::abs(v.norm() - 1.0) > 1e-8) {
    throw InvalidArgument("v must be a unit vector");
  }
  HwTerms h;
  h.omega = 0.5 * (omega + omega.transpose());
  h.trace = h.omega.trace();
  if (!(h.trace > 0.0)) throw InvalidArgument("Omega has zero trace");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h.omega);
  Matrix root = eig.eigenvectors() *
                eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                eig.eigenvectors().transpose();
  Matrix p = Matrix::Identity(v.size(), v.size()) - v * v.transpose();
  h.q = root * p * root;
  h.base = 1.0 - v.dot(h.omega * v) / h.trace;
  h.log_inv_gamma = std::log(1.0 / gamma);
  return h;
}

double Rhs(const HwTerms& h, double delta) {
  Matrix r = h.q - (h.base + delta) * h.omega;
  r = 0.5 * (r + r.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(r, Eigen::EigenvaluesOnly);
  double spectral = eig.eigenvalues().cwiseAbs().maxCoeff();
  return (2.0 * r.norm() * std::sqrt(h.log_inv_gamma) +
          2.0 * spectral * h.log_inv_gamma) /
         h.trace;
}

}  // namespace

double HansonWrightRhs(const Matrix& omega, const Vector& v, double gamma,
                       double delta) {
  return Rhs(PrepareHw(omega, v, gamma), delta);
}

HansonWrightResult HansonWrightDelta(const Matrix& omega, const Vector& v,
                                     double gamma,
                                     const HansonWrightOptions& options) {
  HwTerms h = PrepareHw(omega, v, gamma);
  double delta = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    double rhs = Rhs(h, delta);
    if (!std::isfinite(rhs)) break;
    if (std::abs(rhs - delta) <=
        options.relative_tol * std::max(std::abs(rhs), 1e-300)) {
      return {rhs, h.base + rhs, it};
    }
    delta = (1.0 - options.damping) * delta + options.damping * rhs;
  }
  throw NumericalError(
      "Hanson-Wright fixed point did not converge in " +
      std::to_string(options.max_iterations) + " iterations");
}

BoundReport ConvergenceBound(const data::PartitionedDataset& data,
                             const network::Topology& top,
                             const network::NetworkOperator& op,
                             const engine::RunConfig& cfg, double gamma,
                             Index observer_size) {
  BoundReport rep;
  rep.gamma = gamma;
  rep.lambda1 = op.lambda1;
  rep.lambda2 = op.lambda2;
  rep.mu1 = op.mu(0);
  rep.mu2 = op.mu.size() > 1 ? op.mu(1) : 0.0;
  rep.consensus_gap = op.consensus_gap;
  rep.lambda2_w = top.lambda2();
  rep.rows = data.rows();
  rep.observer_size = observer_size > 0 ? observer_size : data.max_block_size();

  rep.eigengap_positive = rep.lambda1 - rep.lambda2 > 1e-12 * rep.lambda1;
  if (!rep.eigengap_positive) {
    throw InvalidArgument("top two eigenvalues of X X^T coincide");
  }
  rep.mixing_valid = network::ValidateMixingMatrix(top.w()).valid();
  rep.consensus_within_eigengap = op.gap_within_eigengap;
  if (!rep.consensus_within_eigengap) {
    rep.warnings.push_back(
        "consensus gap exceeds the eigengap of X X^T; bound may not apply");
  }
  rep.deflated_rounds_heuristic = cfg.rank > 1;
  if (rep.deflated_rounds_heuristic) {
    rep.warnings.push_back("bound covers the principal eigenvector only");
  }

  Vector v = engine::ExactEigenvectors(data.Stack(), 1).col(0);
  OmegaModel omega = BuildOmega(op, cfg);
  rep.expected_sin2 = 1.0 - v.dot(omega.omega * v) / omega.omega.trace();

  try {
    HansonWrightResult hw = HansonWrightDelta(omega.omega, v, gamma);
    rep.delta_hw = hw.delta;
    rep.theta = hw.theta;
    rep.hw_converged = true;
  } catch (const NumericalError&) {
    rep.delta_hw = kInf;
    rep.theta = kInf;
    rep.hw_converged = false;
    rep.warnings.push_back(
        "Hanson-Wright fixed point does not exist at this gamma; bound is "
        "vacuous");
  }

  rep.rho = Rho(cfg, rep.mu1, rep.mu2);
  const double m = static_cast<double>(data.agents());
  rep.consensus_term = 2.0 * static_cast<double>(rep.observer_size) * m *
                       std::pow(top.lambda2(), top.consensus_rounds()) /
                       (rep.lambda1 - rep.lambda2);
  rep.decay_term = 2.0 * static_cast<double>(data.rows() - 1) * rep.rho *
                   std::pow(rep.mu2 / rep.mu1, 2 * cfg.iterations);
  rep.total = rep.delta_hw + rep.consensus_term + rep.decay_term;
  rep.vacuous = !rep.hw_converged || rep.total >= 1.0;
  return rep;
}

SuggestedParameters SuggestParameters(double mu1, double mu2, Index n,
                                      int iterations, double eta) {
  if (!(mu1 > 0.0)) throw InvalidArgument("mu1 must be positive");
  if (!(mu1 > mu2)) throw InvalidArgument("need mu1 > mu2");
  if (n < 1) throw InvalidArgument("n must be >= 1");
  if (!(eta >= 0.0)) throw InvalidArgument("eta must be >= 0");
  SuggestedParameters out;
  if (mu2 > 0.0) {
    out.alpha = 2.0 / (mu1 + mu2);
  } else {
    out.alpha = (1.0 + 1e-3) / mu1;
    out.alpha_fallback = true;
    out.warning = "mu2 <= 0: alpha interval is unbounded above, using "
                  "(1 + 1e-3) / mu1";
  }
  out.sigma_q = 1.0 / std::sqrt(static_cast<double>(n));
  out.sigma_p =
      engine::GeometricSchedule(iterations, eta, std::max(mu2, 0.0) / mu1);
  return out;
}

}  // namespace ddppm::analysis
