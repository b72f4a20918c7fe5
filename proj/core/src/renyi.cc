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

#include "ddppm/renyi.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ddppm::privacy {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double LogDet(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

void CheckPair(const GaussianDist& p, const GaussianDist& q) {
  if (p.dim() != q.dim() || p.cov.rows() != p.dim() ||
      p.cov.cols() != p.dim() || q.cov.rows() != q.dim() ||
      q.cov.cols() != q.dim()) {
    throw InvalidArgument("Gaussian pair dimension mismatch");
  }
}

}  // namespace

Matrix RenyiOrderMatrix(const Matrix& cov_p, const Matrix& cov_q,
                        double beta) {
  Matrix ip = cov_p.llt().solve(Matrix::Identity(cov_p.rows(), cov_p.cols()));
  Matrix iq = cov_q.llt().solve(Matrix::Identity(cov_q.rows(), cov_q.cols()));
  return (beta + 1.0) * ip - beta * iq;
}

double RenyiDivergence(const GaussianDist& p, const GaussianDist& q,
                       double order) {
  CheckPair(p, q);
  if (!(order > 1.0) || !std::isfinite(order)) {
    throw InvalidArgument("Renyi order must be finite and > 1");
  }
  const double beta = order - 1.0;
  Eigen::LLT<Matrix> lp(p.cov), lq(q.cov);
  if (lp.info() != Eigen::Success || lq.info() != Eigen::Success) {
    throw NumericalError("covariance is not positive definite");
  }
  Matrix a = RenyiOrderMatrix(p.cov, q.cov, beta);
  Eigen::LLT<Matrix> la(0.5 * (a + a.transpose()));
  if (la.info() != Eigen::Success) return kInf;
  // Sigma_a = (b+1) Sigma_q - b Sigma_p is congruent to A_{b+1}.
  Matrix sa = order * q.cov - beta * p.cov;
  Eigen::LLT<Matrix> ls(0.5 * (sa + sa.transpose()));
  if (ls.info() != Eigen::Success) return kInf;
  Vector diff = p.mean - q.mean;
  double quad = diff.dot(ls.solve(diff));
  double logdet = LogDet(ls) + beta * LogDet(lp) - order * LogDet(lq);
  return 0.5 * order * quad - logdet / (2.0 * beta);
}

RenyiProfile::RenyiProfile(const Matrix& cov_p, const Matrix& cov_q) {
  if (cov_p.rows() != cov_p.cols() || cov_q.rows() != cov_q.cols() ||
      cov_p.rows() != cov_q.rows()) {
    throw InvalidArgument("covariance pair dimension mismatch");
  }
  Eigen::LLT<Matrix> llt(0.5 * (cov_p + cov_p.transpose()));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("first covariance is not positive definite");
  }
  const auto l = llt.matrixL();
  Matrix half = l.solve(cov_q);                   // L^-1 Sq
  Matrix b = l.solve(half.transpose());           // L^-1 Sq L^-T
  b = 0.5 * (b + b.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("generalized eigendecomposition failed");
  }
  ratios_ = eig.eigenvalues();
  if (ratios_.size() > 0 && !(ratios_.minCoeff() > 0.0)) {
    throw NumericalError("second covariance is not positive definite");
  }
  transform_ = llt.matrixU().solve(eig.eigenvectors()).transpose();
  log_ratio_sum_ = ratios_.array().log().sum();
}

Vector RenyiProfile::Coordinates(const Vector& mean_difference) const {
  return transform_ * mean_difference;
}

bool RenyiProfile::Feasible(double beta) const {
  for (Index k = 0; k < ratios_.size(); ++k) {
    if (!((beta + 1.0) * ratios_(k) - beta > 0.0)) return false;
  }
  return true;
}

double RenyiProfile::BetaMax(double cap) const {
  double best = cap;
  for (Index k = 0; k < ratios_.size(); ++k) {
    double r = ratios_(k);
    if (r < 1.0) best = std::min(best, r / (1.0 - r));
  }
  return best;
}

double RenyiProfile::Divergence(double beta, const Vector& c) const {
  double quad = 0.0;
  double bracket = 0.0;
  for (Index k = 0; k < ratios_.size(); ++k) {
    double r = ratios_(k);
    double s = (beta + 1.0) * r - beta;
    if (!(s > 0.0)) return kInf;
    quad += c(k) * c(k) / s;
    // ln s - (b+1) ln r = log1p(b (1 - 1/r)) - b ln r
    bracket += std::log1p(beta * (1.0 - 1.0 / r));
  }
  bracket -= beta * log_ratio_sum_;
  return 0.5 * (beta + 1.0) * quad - bracket / (2.0 * beta);
}

RenyiProfile RenyiProfile::Swapped() const {
  RenyiProfile out;
  out.ratios_ = ratios_.cwiseInverse();
  out.transform_ = ratios_.cwiseSqrt().cwiseInverse().asDiagonal() * transform_;
  out.log_ratio_sum_ = -log_ratio_sum_;
  return out;
}

Vector RenyiProfile::SwapCoordinates(const Vector& c) const {
  return c.cwiseQuotient(ratios_.cwiseSqrt());
}

DeltaResult MinimizeChernoff(const std::function<double(double)>& divergence,
                             double beta_max, bool open_end, double epsilon,
                             const DeltaOptions& options) {
  DeltaResult out;
  out.beta_max = beta_max;
  double hi = open_end ? beta_max * (1.0 - 1e-9) : beta_max;
  const double lo = options.beta_floor;
  if (!(hi >= lo)) {
    out.delta = 1.0;
    out.infinite = true;
    out.diagnostic = "no feasible Renyi order above the search floor";
    return out;
  }
  // log delta as a function of log beta.
  auto objective = [&](double log_beta) {
    double b = std::exp(log_beta);
    double d = divergence(b);
    if (!std::isfinite(d)) return kInf;
    return b * (d - epsilon);
  };
  const double a = std::log(lo), z = std::log(hi);
  const int n = std::max(2, options.grid_points);
  std::vector<double> xs(n), fs(n);
  int best = 0;
  for (int k = 0; k < n; ++k) {
    xs[k] = (hi == lo) ? a : a + (z - a) * k / (n - 1);
    fs[k] = objective(xs[k]);
    if (fs[k] < fs[best]) best = k;
  }
  double best_x = xs[best], best_f = fs[best];
  if (std::isfinite(best_f) && hi > lo) {
    double left = xs[std::max(best - 1, 0)];
    double right = xs[std::min(best + 1, n - 1)];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = right - g * (right - left), x2 = left + g * (right - left);
    double f1 = objective(x1), f2 = objective(x2);
    while (right - left > options.relative_tol) {
      if (f1 <= f2) {
        right = x2;
        x2 = x1;
        f2 = f1;
        x1 = right - g * (right - left);
        f1 = objective(x1);
      } else {
        left = x1;
        x1 = x2;
        f1 = f2;
        x2 = left + g * (right - left);
        f2 = objective(x2);
      }
    }
    if (f1 < best_f) best_f = f1, best_x = x1;
    if (f2 < best_f) best_f = f2, best_x = x2;
  }
  if (!std::isfinite(best_f)) {
    out.delta = 1.0;
    out.infinite = true;
    out.beta_star = 0.0;
    out.diagnostic = "divergence infinite at every searched order";
    return out;
  }
  out.beta_star = std::clamp(std::exp(best_x), lo, hi);
  out.delta = std::clamp(std::exp(std::min(best_f, 0.0)), 0.0, 1.0);
  return out;
}

DeltaResult DeltaBound(const GaussianDist& p, const GaussianDist& q,
                       double epsilon, const DeltaOptions& options) {
  CheckPair(p, q);
  if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be >= 0");
  RenyiProfile profile(p.cov, q.cov);
  Vector c = profile.Coordinates(p.mean - q.mean);
  double beta_max = profile.BetaMax(options.beta_cap);
  bool open_end = beta_max < options.beta_cap;
  return MinimizeChernoff(
      [&](double b) { return profile.Divergence(b, c); }, beta_max, open_end,
      epsilon, options);
}

}  // namespace ddppm::privacy
