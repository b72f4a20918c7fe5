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

#include "ddppm/network.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "ddppm/linalg.h"

namespace ddppm::network {
namespace {

constexpr double kSumTol = 1e-10;

double SecondLargestModulus(const Matrix& w) {
  if (w.rows() < 2) return 0.0;
  std::vector<double> moduli;
  if (IsSymmetric(w, kSumTol)) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(w, Eigen::EigenvaluesOnly);
    for (Index k = 0; k < w.rows(); ++k) {
      moduli.push_back(std::abs(solver.eigenvalues()(k)));
    }
  } else {
    Eigen::EigenSolver<Matrix> solver(w, false);
    for (Index k = 0; k < w.rows(); ++k) {
      moduli.push_back(std::abs(solver.eigenvalues()(k)));
    }
  }
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  return moduli[1];
}

bool Reaches(const Matrix& w, bool transpose) {
  const Index m = w.rows();
  std::vector<bool> seen(m, false);
  std::queue<Index> frontier;
  frontier.push(0);
  seen[0] = true;
  Index count = 1;
  while (!frontier.empty()) {
    Index i = frontier.front();
    frontier.pop();
    for (Index j = 0; j < m; ++j) {
      double weight = transpose ? w(j, i) : w(i, j);
      if (weight > 0.0 && !seen[j]) {
        seen[j] = true;
        ++count;
        frontier.push(j);
      }
    }
  }
  return count == m;
}

}  // namespace

MixingDiagnostics ValidateMixingMatrix(const Matrix& w) {
  MixingDiagnostics d;
  d.square = w.rows() == w.cols() && w.rows() > 0;
  if (!d.square) {
    d.lambda2 = std::numeric_limits<double>::quiet_NaN();
    d.failures.push_back("square");
    return d;
  }
  const Index m = w.rows();
  d.nonnegative = w.allFinite() && (w.array() >= 0.0).all();
  d.symmetric = IsSymmetric(w, kSumTol);
  d.row_stochastic =
      ((w.rowwise().sum().array() - 1.0).abs() <= kSumTol).all();
  d.column_stochastic =
      ((w.colwise().sum().array() - 1.0).abs() <= kSumTol).all();
  d.connected = m == 1 || (Reaches(w, false) && Reaches(w, true));
  d.lambda2 = w.allFinite() ? SecondLargestModulus(w)
                            : std::numeric_limits<double>::quiet_NaN();
  d.lambda2_below_one = d.lambda2 >= 0.0 && d.lambda2 < 1.0 - 1e-12;

  if (!d.nonnegative) d.failures.push_back("nonnegative");
  if (!d.symmetric) d.failures.push_back("symmetric");
  if (!d.row_stochastic) d.failures.push_back("row_stochastic");
  if (!d.column_stochastic) d.failures.push_back("column_stochastic");
  if (!d.connected) d.failures.push_back("connected");
  if (!d.lambda2_below_one) d.failures.push_back("lambda2_below_one");
  return d;
}

Topology::Topology(Matrix w, int consensus_rounds)
    : w_(std::move(w)), rounds_(consensus_rounds) {
  if (rounds_ < 1) throw InvalidArgument("consensus rounds must be >= 1");
  MixingDiagnostics d = ValidateMixingMatrix(w_);
  if (!d.valid()) {
    std::string msg = "invalid mixing matrix, failed:";
    for (const auto& f : d.failures) msg += " " + f;
    throw InvalidArgument(msg);
  }
  lambda2_ = d.lambda2;
  aggregation_ = static_cast<double>(w_.rows()) * MatrixPower(w_, rounds_);
}

Matrix RingMatrix(Index m, double self_weight) {
  if (m < 1) throw InvalidArgument("ring needs at least one agent");
  if (self_weight < 0.0 || self_weight > 1.0) {
    throw InvalidArgument("self weight outside [0, 1]");
  }
  if (m == 1) return Matrix::Ones(1, 1);
  Matrix w = Matrix::Zero(m, m);
  if (m == 2) {
    w << self_weight, 1.0 - self_weight, 1.0 - self_weight, self_weight;
    return w;
  }
  double side = 0.5 * (1.0 - self_weight);
  for (Index i = 0; i < m; ++i) {
    w(i, i) = self_weight;
    w(i, (i + 1) % m) += side;
    w(i, (i + m - 1) % m) += side;
  }
  return w;
}

Matrix CompleteMatrix(Index m) {
  if (m < 1) throw InvalidArgument("complete graph needs at least one agent");
  return Matrix::Constant(m, m, 1.0 / static_cast<double>(m));
}

Matrix PathMatrix(Index m) {
  if (m < 1) throw InvalidArgument("path needs at least one agent");
  Matrix w = Matrix::Zero(m, m);
  auto degree = [m](Index i) -> double {
    if (m == 1) return 0.0;
    return (i == 0 || i == m - 1) ? 1.0 : 2.0;
  };
  for (Index i = 0; i + 1 < m; ++i) {
    double weight = 1.0 / (1.0 + std::max(degree(i), degree(i + 1)));
    w(i, i + 1) = weight;
    w(i + 1, i) = weight;
  }
  for (Index i = 0; i < m; ++i) w(i, i) = 1.0 - w.row(i).sum();
  return w;
}

std::vector<Vector> ConsensusApply(const Topology& top,
                                   std::span<const Vector> z) {
  const Index m = top.agents();
  if (static_cast<Index>(z.size()) != m) {
    throw InvalidArgument("consensus input has " + std::to_string(z.size()) +
                          " vectors for " + std::to_string(m) + " agents");
  }
  const Index d = z.front().size();
  for (const Vector& v : z) {
    if (v.size() != d) throw InvalidArgument("consensus dimension mismatch");
  }
  const Matrix& a = top.aggregation();
  std::vector<Vector> out(m, Vector::Zero(d));
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) out[i].noalias() += a(i, j) * z[j];
  }
  return out;
}

Matrix AssembleXi(const data::PartitionedDataset& data, const Topology& top) {
  if (data.agents() != top.agents()) {
    throw InvalidArgument("data has " + std::to_string(data.agents()) +
                          " agents, topology has " +
                          std::to_string(top.agents()));
  }
  const Matrix x = data.Stack();
  Matrix xi = x * x.transpose();
  const Matrix& a = top.aggregation();
  for (Index i = 0; i < data.agents(); ++i) {
    for (Index j = 0; j < data.agents(); ++j) {
      xi.block(data.start(i), data.start(j), data.size(i), data.size(j)) *=
          a(i, j);
    }
  }
  return xi;
}

NetworkOperator BuildNetworkOperator(const data::PartitionedDataset& data,
                                     const Topology& top) {
  NetworkOperator op;
  op.xi = AssembleXi(data, top);
  SymmetricEigen eig = EigenDescending(op.xi);
  op.mu = eig.values;
  op.eigenvectors = eig.vectors;
  op.min_eigenvalue = op.mu(op.mu.size() - 1);
  op.negative_eigenvalue_flag =
      op.min_eigenvalue <
      -10.0 * std::numeric_limits<double>::epsilon() * std::abs(op.mu(0));

  const Matrix x = data.Stack();
  Eigen::SelfAdjointEigenSolver<Matrix> gap_solver(op.xi - x * x.transpose(),
                                                   Eigen::EigenvaluesOnly);
  op.consensus_gap = gap_solver.eigenvalues().cwiseAbs().maxCoeff();

  Eigen::SelfAdjointEigenSolver<Matrix> gram(x.transpose() * x,
                                             Eigen::EigenvaluesOnly);
  const Vector& g = gram.eigenvalues();  // ascending
  op.lambda1 = g(g.size() - 1);
  op.lambda2 = (g.size() >= 2 && x.rows() >= 2) ? g(g.size() - 2) : 0.0;
  op.gap_within_eigengap = op.consensus_gap <= op.lambda1 - op.lambda2;
  return op;
}

}  // namespace ddppm::network
