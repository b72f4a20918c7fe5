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

#include "ddppm/engine.h"

#include <cmath>
#include <string>

#include "ddppm/linalg.h"
#include "ddppm/random.h"

namespace ddppm::engine {

void RunConfig::Validate() const {
  if (iterations < 0) throw InvalidArgument("iterations must be >= 0");
  if (rank < 1) throw InvalidArgument("rank must be >= 1");
  if (rank > 1 && iterations < 1) {
    throw InvalidArgument("deflation needs at least one iteration per rank");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("alpha must be positive and finite");
  }
  if (!(sigma_q > 0.0) || !std::isfinite(sigma_q)) {
    throw InvalidArgument("sigma_q must be positive and finite");
  }
  if (static_cast<int>(sigma_p.size()) < iterations) {
    throw InvalidArgument("sigma_p schedule has " +
                          std::to_string(sigma_p.size()) + " entries, need " +
                          std::to_string(iterations));
  }
  for (double s : sigma_p) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw InvalidArgument("sigma_p entries must be finite and >= 0");
    }
  }
}

std::vector<double> ConstantSchedule(int iterations, double scale) {
  return std::vector<double>(std::max(iterations, 0), scale);
}

std::vector<double> GeometricSchedule(int iterations, double eta,
                                      double ratio) {
  std::vector<double> out(std::max(iterations, 0));
  double f = eta;
  for (auto& s : out) {
    f *= ratio;
    s = f;
  }
  return out;
}

Vector StackedRelease(const RankTrace& trace) {
  Index size = trace.q_final.size();
  for (const auto& it : trace.iterations) {
    for (const Vector& z : it.z) size += z.size();
  }
  Vector y(size);
  Index pos = 0;
  for (const auto& it : trace.iterations) {
    for (const Vector& z : it.z) {
      y.segment(pos, z.size()) = z;
      pos += z.size();
    }
  }
  y.tail(trace.q_final.size()) = trace.q_final;
  return y;
}

RunResult RunDdppm(const data::PartitionedDataset& data,
                   const network::Topology& top, const RunConfig& cfg) {
  cfg.Validate();
  const Index m = data.agents();
  if (m != top.agents()) {
    throw InvalidArgument("data has " + std::to_string(m) +
                          " agents, topology has " +
                          std::to_string(top.agents()));
  }
  if (cfg.rank > data.rows()) throw InvalidArgument("rank exceeds row count");
  const int T = cfg.iterations;

  data::PartitionedDataset working = data;
  RunResult result;
  result.u_hat = Matrix::Zero(data.rows(), cfg.rank);
  result.deflation_norms.assign(cfg.rank, 0.0);

  std::vector<Vector> z_prev;
  double norm_prev = 0.0;
  std::vector<Vector> q(m), z(m);
  for (int l = 0; l < cfg.rank; ++l) {
    if (l > 0) {
      double after = 0.0;
      data::PartitionedDataset prior = working;
      Deflate(working, result.u_hat.col(l - 1), z_prev, norm_prev);
      for (Index i = 0; i < m; ++i) {
        after += (working.block(i) - prior.block(i)).squaredNorm();
      }
      result.deflation_norms[l] = std::sqrt(after);
    }

    const auto rank_index = static_cast<std::uint64_t>(l);
    RankNoise noise;
    for (Index i = 0; i < m; ++i) {
      RandomStream rng(cfg.seed, StreamPurpose::kInitialIterate,
                       {rank_index, static_cast<std::uint64_t>(i)});
      q[i] = rng.NormalVector(working.size(i), cfg.sigma_q);
    }
    auto stacked = [&] {
      Vector s(data.rows());
      for (Index i = 0; i < m; ++i) s.segment(data.start(i), q[i].size()) = q[i];
      return s;
    };
    if (cfg.record_noise) noise.q0 = stacked();

    std::vector<double> norms;
    norms.reserve(T + 1);
    norms.push_back(stacked().norm());
    RankTrace trace;
    std::vector<Vector> z_half;
    for (int t = 1; t <= T; ++t) {
      for (Index i = 0; i < m; ++i) {
        z[i] = working.block(i).transpose() * q[i];
      }
      z_half = network::ConsensusApply(top, z);
      Vector p_stacked;
      if (cfg.record_noise) p_stacked.resize(data.rows());
      for (Index i = 0; i < m; ++i) {
        RandomStream rng(cfg.seed, StreamPurpose::kIterationNoise,
                         {rank_index, static_cast<std::uint64_t>(t),
                          static_cast<std::uint64_t>(i)});
        Vector p = rng.NormalVector(working.size(i), cfg.SigmaP(t));
        q[i] = cfg.alpha * (working.block(i) * z_half[i]) + p;
        if (cfg.record_noise) p_stacked.segment(data.start(i), p.size()) = p;
      }
      if (cfg.record_noise) noise.p.push_back(std::move(p_stacked));
      if (cfg.record_trace) trace.iterations.push_back({z, z_half});
      norms.push_back(stacked().norm());
    }

    Vector q_tilde = stacked();
    double norm = q_tilde.norm();
    if (!(norm >= 1e-300) || !std::isfinite(norm)) {
      throw NumericalError("degenerate final iterate norm at rank index " +
                           std::to_string(l + 1));
    }
    result.u_hat.col(l) = q_tilde / norm;
    result.final_norms.push_back(norm);
    result.iterate_norms.push_back(std::move(norms));
    if (cfg.record_trace) {
      trace.q_final = q_tilde;
      result.trace.push_back(std::move(trace));
    }
    if (cfg.record_noise) result.noise.push_back(std::move(noise));

    // z_i^(T+1/2) approximates X^T q^(T-1); rescale it to an estimate of
    // X^T q~^(T) using only public ||q~|| and the agent's own z_i.
    z_prev.assign(m, Vector());
    for (Index i = 0; i < m && T >= 1; ++i) {
      double zz = z_half[i].squaredNorm();
      z_prev[i] = zz > 0.0 ? Vector(z_half[i] * (norm * norm / (cfg.alpha * zz)))
                           : Vector(Vector::Zero(z_half[i].size()));
    }
    norm_prev = norm;
  }
  return result;
}

void Deflate(data::PartitionedDataset& working, const Vector& q_prev,
             std::span<const Vector> z_final, double norm_prev) {
  if (!(norm_prev > 0.0)) throw InvalidArgument("norm_prev must be positive");
  if (q_prev.size() != working.rows()) {
    throw InvalidArgument("q_prev length does not match the row count");
  }
  if (static_cast<Index>(z_final.size()) != working.agents()) {
    throw InvalidArgument("need one z vector per agent");
  }
  for (Index i = 0; i < working.agents(); ++i) {
    if (z_final[i].size() != working.dim()) {
      throw InvalidArgument("z dimension mismatch");
    }
    Vector q_i = working.Segment(q_prev, i);
    working.mutable_block(i).noalias() -=
        q_i * (z_final[i] / norm_prev).transpose();
  }
}

Matrix CentralizedPowerMethodFrom(const Matrix& x, int iterations,
                                  const Matrix& initial) {
  if (iterations < 0) throw InvalidArgument("iterations must be >= 0");
  if (initial.rows() != x.rows()) {
    throw InvalidArgument("initial vectors do not match the row count");
  }
  Matrix a = x * x.transpose();
  Matrix out(x.rows(), initial.cols());
  for (Index l = 0; l < initial.cols(); ++l) {
    Vector q = initial.col(l);
    double norm = q.norm();
    if (!(norm > 0.0)) throw NumericalError("zero initial iterate");
    q /= norm;
    for (int t = 0; t < iterations; ++t) {
      q = a * q;
      norm = q.norm();
      if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw NumericalError("zero iterate norm at rank index " +
                             std::to_string(l + 1));
      }
      q /= norm;
    }
    out.col(l) = q;
    double lambda = q.dot(a * q);
    a -= lambda * q * q.transpose();
  }
  return out;
}

Matrix CentralizedPowerMethod(const Matrix& x, int iterations, int rank,
                              std::uint64_t seed) {
  if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
  if (rank < 1 || rank > x.rows()) throw InvalidArgument("rank out of range");
  Matrix init(x.rows(), rank);
  for (int l = 0; l < rank; ++l) {
    RandomStream rng(seed, StreamPurpose::kInitialIterate,
                     {static_cast<std::uint64_t>(l)});
    init.col(l) = rng.NormalVector(x.rows());
  }
  return CentralizedPowerMethodFrom(x, iterations, init);
}

double SinError(const Vector& v, const Vector& q) {
  if (v.size() != q.size()) throw InvalidArgument("length mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-10) {
    throw InvalidArgument("reference vector is not unit norm");
  }
  double qn = q.norm();
  if (!(qn > 0.0)) throw InvalidArgument("zero estimate");
  double s = (q - v * v.dot(q)).norm() / qn;
  return std::min(1.0, s);
}

Matrix ExactEigenvectors(const Matrix& x, Index r) {
  return TopLeftSingularVectors(x, r);
}

}  // namespace ddppm::engine
