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

#include "ddppm/privacy.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "ddppm/linalg.h"
#include "ddppm/parallel.h"
#include "ddppm/random.h"

namespace ddppm::privacy {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Block-diagonal D(X)^T, (md x n).
Matrix StackedTransposeBlocks(const data::PartitionedDataset& data) {
  const Index d = data.dim();
  Matrix dt = Matrix::Zero(data.agents() * d, data.rows());
  for (Index a = 0; a < data.agents(); ++a) {
    dt.block(a * d, data.start(a), d, data.size(a)) =
        data.block(a).transpose();
  }
  return dt;
}

// C * (alpha Xi) for a row block C (k x n) without forming Xi.
Matrix RightApplyXi(const Matrix& c, const data::PartitionedDataset& data,
                    const Matrix& aggregation, double alpha) {
  const Index m = data.agents();
  std::vector<Matrix> y(m);
  for (Index a = 0; a < m; ++a) {
    y[a] = c.middleCols(data.start(a), data.size(a)) * data.block(a);
  }
  Matrix out(c.rows(), c.cols());
  for (Index b = 0; b < m; ++b) {
    Matrix g = Matrix::Zero(c.rows(), data.dim());
    for (Index a = 0; a < m; ++a) {
      if (aggregation(a, b) != 0.0) g.noalias() += aggregation(a, b) * y[a];
    }
    out.middleCols(data.start(b), data.size(b)).noalias() =
        alpha * g * data.block(b).transpose();
  }
  return out;
}

}  // namespace

Matrix ReleaseModel::Covariance() const {
  Matrix cov = sigma_q * sigma_q * m * m.transpose();
  for (int k = 0; k < iterations; ++k) {
    auto block = l.middleCols(static_cast<Index>(k) * rows, rows);
    cov.noalias() += sigma_p[k] * sigma_p[k] * block * block.transpose();
  }
  return cov;
}

std::vector<Index> ReleaseModel::SelectedRows(Index agent) const {
  std::vector<Index> out;
  out.reserve(dim * iterations + sizes[agent]);
  for (int t = 0; t < iterations; ++t) {
    Index base = static_cast<Index>(t) * agents * dim + agent * dim;
    for (Index k = 0; k < dim; ++k) out.push_back(base + k);
  }
  Index base = agents * dim * iterations + starts[agent];
  for (Index k = 0; k < sizes[agent]; ++k) out.push_back(base + k);
  return out;
}

Matrix ReleaseModel::Selector(Index agent) const {
  std::vector<Index> rows_sel = SelectedRows(agent);
  Matrix s = Matrix::Zero(static_cast<Index>(rows_sel.size()), release_dim());
  for (std::size_t r = 0; r < rows_sel.size(); ++r) s(r, rows_sel[r]) = 1.0;
  return s;
}

ReleaseModel BuildReleaseModel(const data::PartitionedDataset& data,
                               const network::NetworkOperator& op,
                               const engine::RunConfig& cfg) {
  cfg.Validate();
  if (cfg.rank != 1) {
    throw InvalidArgument("the release model describes one rank-1 round");
  }
  const Index n = data.rows();
  if (op.xi.rows() != n || op.xi.cols() != n) {
    throw InvalidArgument("network operator does not match the data");
  }
  ReleaseModel model;
  model.sigma_q = cfg.sigma_q;
  model.sigma_p.assign(cfg.sigma_p.begin(),
                       cfg.sigma_p.begin() + cfg.iterations);
  model.agents = data.agents();
  model.dim = data.dim();
  model.rows = n;
  model.iterations = cfg.iterations;
  for (Index a = 0; a < data.agents(); ++a) {
    model.starts.push_back(data.start(a));
    model.sizes.push_back(data.size(a));
  }
  const int T = cfg.iterations;
  const Index md = data.agents() * data.dim();
  const Matrix dt = StackedTransposeBlocks(data);
  const Matrix step = cfg.alpha * op.xi;
  std::vector<Matrix> powers(T + 1);
  powers[0] = Matrix::Identity(n, n);
  for (int s = 1; s <= T; ++s) powers[s] = powers[s - 1] * step;

  model.m = Matrix::Zero(md * T + n, n);
  model.l = Matrix::Zero(md * T + n, n * T);
  for (int t = 1; t <= T; ++t) {
    model.m.middleRows((t - 1) * md, md) = dt * powers[t - 1];
    for (int k = 1; k < t; ++k) {
      model.l.block((t - 1) * md, (k - 1) * n, md, n) = dt * powers[t - 1 - k];
    }
  }
  model.m.bottomRows(n) = powers[T];
  for (int k = 1; k <= T; ++k) {
    model.l.block(md * T, (k - 1) * n, n, n) = powers[T - k];
  }
  return model;
}

ObserverRows ObserverRowsFromModel(const ReleaseModel& model, Index agent) {
  std::vector<Index> sel = model.SelectedRows(agent);
  ObserverRows rows;
  rows.m = model.m(sel, Eigen::all);
  rows.l = model.l(sel, Eigen::all);
  return rows;
}

ObserverRows BuildObserverRows(const data::PartitionedDataset& data,
                               const network::Topology& top,
                               const engine::RunConfig& cfg, Index agent) {
  if (agent < 0 || agent >= data.agents()) {
    throw InvalidArgument("observer index out of range");
  }
  const int T = cfg.iterations;
  const Index n = data.rows(), d = data.dim(), ni = data.size(agent);
  // C_s = R_i (alpha Xi)^s for s = 0..T.
  std::vector<Matrix> c(T + 1);
  c[0] = Matrix::Zero(ni, n);
  c[0].middleCols(data.start(agent), ni).setIdentity();
  for (int s = 1; s <= T; ++s) {
    c[s] = RightApplyXi(c[s - 1], data, top.aggregation(), cfg.alpha);
  }
  const Matrix& xi_t = data.block(agent);
  std::vector<Matrix> zrows(T);
  for (int s = 0; s < T; ++s) zrows[s] = xi_t.transpose() * c[s];

  ObserverRows rows;
  rows.m = Matrix::Zero(d * T + ni, n);
  rows.l = Matrix::Zero(d * T + ni, n * T);
  for (int t = 1; t <= T; ++t) {
    rows.m.middleRows((t - 1) * d, d) = zrows[t - 1];
    for (int k = 1; k < t; ++k) {
      rows.l.block((t - 1) * d, (k - 1) * n, d, n) = zrows[t - 1 - k];
    }
  }
  rows.m.bottomRows(ni) = c[T];
  for (int k = 1; k <= T; ++k) {
    rows.l.block(d * T, (k - 1) * n, ni, n) = c[T - k];
  }
  return rows;
}

ObserverConditional::ObserverConditional(ObserverRows rows,
                                         const data::PartitionedDataset& data,
                                         Index agent, double sigma_q,
                                         std::span<const double> sigma_p)
    : agent_(agent), rows_(std::move(rows)) {
  const Index n = data.rows();
  const Index ni = data.size(agent), start = data.start(agent);
  const Index T = static_cast<Index>(sigma_p.size());
  if (rows_.m.cols() != n || rows_.l.cols() != n * T) {
    throw InvalidArgument("observer rows do not match the data layout");
  }
  const Index dim = rows_.m.rows();
  std::vector<Index> own, other;
  for (Index k = 0; k < n; ++k) {
    (k >= start && k < start + ni ? own : other).push_back(k);
  }
  own_m_ = rows_.m(Eigen::all, own);
  other_m_ = rows_.m(Eigen::all, other);
  const Index no = static_cast<Index>(other.size());
  own_l_.resize(dim, ni * T);
  other_l_.resize(dim, no * T);
  // Scaled generator of the unknown randomness: cov = G G^T.
  Matrix g(dim, no * (T + 1));
  g.leftCols(no) = sigma_q * other_m_;
  for (Index k = 0; k < T; ++k) {
    auto block = rows_.l.middleCols(k * n, n);
    own_l_.middleCols(k * ni, ni) = block(Eigen::all, own);
    other_l_.middleCols(k * no, no) = block(Eigen::all, other);
    g.middleCols((k + 1) * no, no) = sigma_p[k] * other_l_.middleCols(k * no, no);
  }
  cov_ = Matrix::Zero(dim, dim);
  cov_.selfadjointView<Eigen::Lower>().rankUpdate(g);
  cov_ = cov_.selfadjointView<Eigen::Lower>();
}

Vector ObserverConditional::Mean(const Vector& q_own,
                                 const Vector& p_own) const {
  if (q_own.size() != own_m_.cols() || p_own.size() != own_l_.cols()) {
    throw InvalidArgument("own randomness has the wrong length");
  }
  return own_m_ * q_own + own_l_ * p_own;
}

GaussianDist ObserverConditional::Evaluate(const Vector& q_own,
                                           const Vector& p_own) const {
  return GaussianDist{Mean(q_own, p_own), cov_, std::nullopt};
}

ObserverConditional ConditionalFromModel(const ReleaseModel& model,
                                         const data::PartitionedDataset& data,
                                         Index agent) {
  return ObserverConditional(ObserverRowsFromModel(model, agent), data, agent,
                             model.sigma_q, model.sigma_p);
}

ObserverConditional BuildObserverConditional(
    const data::PartitionedDataset& data, const network::Topology& top,
    const engine::RunConfig& cfg, Index agent) {
  return ObserverConditional(
      BuildObserverRows(data, top, cfg, agent), data, agent, cfg.sigma_q,
      std::span<const double>(cfg.sigma_p.data(), cfg.iterations));
}

namespace {

Matrix EnergyBasis(const Matrix& cov, double energy_tol) {
  if (!(energy_tol > 0.0) || energy_tol > 1.0) {
    throw InvalidArgument("energy_tol must lie in (0, 1]");
  }
  SymmetricEigen eig = EigenDescending(0.5 * (cov + cov.transpose()));
  const Vector& lam = eig.values;
  double top = lam.size() > 0 ? lam(0) : 0.0;
  double trace = lam.cwiseMax(0.0).sum();
  if (!(top > 0.0) || !(trace > 0.0)) {
    throw InvalidArgument("zero covariance");
  }
  Index r = 0;
  double acc = 0.0;
  while (r < lam.size() && lam(r) > 1e-12 * top) {
    acc += lam(r);
    ++r;
    if (acc >= energy_tol * trace) break;
  }
  return eig.vectors.leftCols(r);
}

}  // namespace

GaussianDist Project(const GaussianDist& g, const Matrix& basis) {
  GaussianDist out;
  out.mean = basis.transpose() * g.mean;
  out.cov = basis.transpose() * g.cov * basis;
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  out.rank_hint = basis.cols();
  return out;
}

GaussianDist ReduceRank(const GaussianDist& g, double energy_tol) {
  return Project(g, EnergyBasis(g.cov, energy_tol));
}

Matrix JointBasis(const Matrix& cov_p, const Matrix& cov_q,
                  double energy_tol) {
  if (cov_p.rows() != cov_q.rows() || cov_p.cols() != cov_q.cols()) {
    throw InvalidArgument("covariance pair dimension mismatch");
  }
  return EnergyBasis(cov_p + cov_q, energy_tol);
}

std::vector<Perturbation> DefaultPerturbations(
    const data::PartitionedDataset& data, std::uint64_t seed,
    Index max_rows_per_agent, int random_directions) {
  const Matrix x = data.Stack();
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinV);
  const Index nsv = std::min<Index>(2, svd.matrixV().cols());
  std::vector<Perturbation> out;
  for (Index a = 0; a < data.agents(); ++a) {
    std::vector<Index> rows(data.size(a));
    std::iota(rows.begin(), rows.end(), 0);
    if (max_rows_per_agent > 0 && max_rows_per_agent < data.size(a)) {
      RandomStream rng(seed, StreamPurpose::kPerturbation,
                       {static_cast<std::uint64_t>(a)});
      std::shuffle(rows.begin(), rows.end(), rng.engine());
      rows.resize(max_rows_per_agent);
      std::sort(rows.begin(), rows.end());
    }
    for (Index r : rows) {
      std::string prefix = "a" + std::to_string(a) + ":r" + std::to_string(r);
      auto add = [&](const Vector& dir, const std::string& tag) {
        out.push_back(Perturbation{a, r, dir, 1.0, prefix + ":" + tag});
      };
      Vector row = data.block(a).row(r).transpose();
      double norm = row.norm();
      if (norm > 0.0) {
        add(row / norm, "+row");
        add(-row / norm, "-row");
      }
      for (Index k = 0; k < nsv; ++k) {
        Vector v = svd.matrixV().col(k);
        add(v, "+sv" + std::to_string(k + 1));
        add(-v, "-sv" + std::to_string(k + 1));
      }
      RandomStream rng(seed, StreamPurpose::kPerturbation,
                       {static_cast<std::uint64_t>(a),
                        static_cast<std::uint64_t>(r), 1});
      for (int k = 0; k < random_directions; ++k) {
        add(rng.UnitVector(data.dim()), "rand" + std::to_string(k + 1));
      }
    }
  }
  return out;
}

std::vector<Perturbation> ParsePerturbations(const std::string& text,
                                             Index dim) {
  std::istringstream in(text);
  std::string line;
  std::vector<Perturbation> out;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> v;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        double x = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) {
          throw std::invalid_argument(cell);
        }
        v.push_back(x);
      } catch (const std::exception&) {
        throw ParseError("perturbation line " + std::to_string(line_no) +
                         ": not a number: '" + cell + "'");
      }
    }
    if (static_cast<Index>(v.size()) != dim + 3) {
      throw ParseError("perturbation line " + std::to_string(line_no) +
                       ": expected " + std::to_string(dim + 3) + " fields");
    }
    if (v[0] < 0 || v[1] < 0 || v[0] != std::floor(v[0]) ||
        v[1] != std::floor(v[1])) {
      throw ParseError("perturbation line " + std::to_string(line_no) +
                       ": agent and row must be non-negative integers");
    }
    Perturbation p;
    p.agent = static_cast<Index>(v[0]);
    p.row = static_cast<Index>(v[1]);
    p.direction = Eigen::Map<Vector>(v.data() + 2, dim);
    p.magnitude = v.back();
    p.id = "line" + std::to_string(line_no);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Perturbation> LoadPerturbations(const std::string& path,
                                            Index dim) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParsePerturbations(buf.str(), dim);
}

data::PartitionedDataset ApplyPerturbation(const data::PartitionedDataset& x,
                                           const Perturbation& p) {
  if (p.agent < 0 || p.agent >= x.agents()) {
    throw InvalidArgument("perturbation " + p.id + ": agent out of range");
  }
  if (p.row < 0 || p.row >= x.size(p.agent)) {
    throw InvalidArgument("perturbation " + p.id + ": row out of range");
  }
  if (p.direction.size() != x.dim()) {
    throw InvalidArgument("perturbation " + p.id + ": wrong dimension");
  }
  double change = std::abs(p.magnitude) * p.direction.norm();
  if (!(change <= 1.0 + 1e-12)) {
    throw InvalidArgument("perturbation " + p.id + " moves a row by " +
                          std::to_string(change) + " > 1");
  }
  data::PartitionedDataset out = x;
  out.mutable_block(p.agent).row(p.row) +=
      p.magnitude * p.direction.transpose();
  return out;
}

namespace {

// Data of deflation round l: (I - sum_{k<l} v_k v_k^T) X with exact v_k.
std::vector<data::PartitionedDataset> DeflatedRounds(
    const data::PartitionedDataset& x, int rank) {
  std::vector<data::PartitionedDataset> rounds{x};
  if (rank == 1) return rounds;
  Matrix v = TopLeftSingularVectors(x.Stack(), rank - 1);
  for (int l = 1; l < rank; ++l) {
    data::PartitionedDataset next = rounds.back();
    Vector vl = v.col(l - 1);
    Matrix stacked = next.Stack();
    Eigen::RowVectorXd proj = vl.transpose() * stacked;
    for (Index a = 0; a < next.agents(); ++a) {
      next.mutable_block(a).noalias() -= next.Segment(vl, a) * proj;
    }
    rounds.push_back(std::move(next));
  }
  return rounds;
}

struct Realization {
  Vector q;
  Vector p;
};

std::vector<Realization> OwnRealizations(const data::PartitionedDataset& x,
                                         const engine::RunConfig& cfg,
                                         Index agent, int round, int random,
                                         std::uint64_t seed) {
  const Index ni = x.size(agent);
  const int T = cfg.iterations;
  std::vector<Realization> out;
  out.push_back({Vector::Constant(ni, cfg.sigma_q / std::sqrt(double(ni))),
                 Vector::Zero(ni * T)});
  for (int k = 0; k < random; ++k) {
    RandomStream rng(seed, StreamPurpose::kRealization,
                     {static_cast<std::uint64_t>(agent),
                      static_cast<std::uint64_t>(round),
                      static_cast<std::uint64_t>(k)});
    Realization r;
    r.q = rng.NormalVector(ni, cfg.sigma_q);
    r.p.resize(ni * T);
    for (int t = 0; t < T; ++t) {
      r.p.segment(t * ni, ni) = rng.NormalVector(ni, cfg.sigma_p[t]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

// One (observer, perturbation, round) comparison, both directions.
struct RoundPair {
  bool infinite = false;
  std::string diagnostic;
  Index rank = 0;
  std::vector<RenyiProfile> profiles;           // [forward, swapped]
  std::vector<std::vector<Vector>> coords;      // [direction][realization]
};

RoundPair CompareRound(const ObserverConditional& base,
                       const ObserverConditional& alt,
                       const std::vector<Realization>& draws,
                       const AuditOptions& options) {
  RoundPair out;
  Matrix basis;
  try {
    basis = JointBasis(base.covariance(), alt.covariance(), options.energy_tol);
  } catch (const InvalidArgument&) {
    out.infinite = true;
    out.diagnostic = "conditional covariances vanish";
    return out;
  }
  out.rank = basis.cols();
  Matrix cp = basis.transpose() * base.covariance() * basis;
  Matrix cq = basis.transpose() * alt.covariance() * basis;
  try {
    out.profiles.emplace_back(0.5 * (cp + cp.transpose()),
                              0.5 * (cq + cq.transpose()));
  } catch (const NumericalError&) {
    out.infinite = true;
    out.diagnostic = "reduced covariance pair is not positive definite";
    return out;
  }
  out.profiles.push_back(out.profiles[0].Swapped());
  out.coords.resize(2);
  for (const Realization& r : draws) {
    Vector diff = basis.transpose() * (base.Mean(r.q, r.p) - alt.Mean(r.q, r.p));
    out.coords[0].push_back(out.profiles[0].Coordinates(diff));
    out.coords[1].push_back(out.profiles[1].Coordinates(-diff));
  }
  return out;
}

struct PairOutcome {
  double delta = 0.0;
  double beta_star = 0.0;
  Index rank = 0;
  bool infinite = false;
  std::string diagnostic;
};

PairOutcome SingleRound(const RoundPair& rp, double epsilon,
                        const AuditOptions& options) {
  PairOutcome out;
  out.rank = rp.rank;
  if (rp.infinite) {
    out.delta = 1.0;
    out.infinite = true;
    out.diagnostic = rp.diagnostic;
    return out;
  }
  const int directions = options.both_directions ? 2 : 1;
  for (int dir = 0; dir < directions; ++dir) {
    const RenyiProfile& prof = rp.profiles[dir];
    double beta_max = prof.BetaMax(options.delta.beta_cap);
    bool open_end = beta_max < options.delta.beta_cap;
    for (const Vector& c : rp.coords[dir]) {
      DeltaResult r = MinimizeChernoff(
          [&](double b) { return prof.Divergence(b, c); }, beta_max, open_end,
          epsilon, options.delta);
      if (r.delta > out.delta || (out.beta_star == 0.0 && r.delta == out.delta)) {
        out.delta = r.delta;
        out.beta_star = r.beta_star;
        out.infinite = r.infinite;
        out.diagnostic = r.diagnostic;
      }
    }
  }
  return out;
}

// Renyi divergences add across rounds; each round contributes its worst
// realization pointwise in the order.
PairOutcome Stacked(const std::vector<RoundPair>& rounds, double epsilon,
                    const AuditOptions& options) {
  PairOutcome out;
  for (const RoundPair& rp : rounds) {
    out.rank = std::max(out.rank, rp.rank);
    if (rp.infinite) {
      out.delta = 1.0;
      out.infinite = true;
      out.diagnostic = rp.diagnostic;
      return out;
    }
  }
  const int directions = options.both_directions ? 2 : 1;
  for (int dir = 0; dir < directions; ++dir) {
    double beta_max = options.delta.beta_cap;
    for (const RoundPair& rp : rounds) {
      beta_max = std::min(beta_max, rp.profiles[dir].BetaMax(beta_max));
    }
    bool open_end = beta_max < options.delta.beta_cap;
    auto divergence = [&](double b) {
      double total = 0.0;
      for (const RoundPair& rp : rounds) {
        double worst = 0.0;
        for (const Vector& c : rp.coords[dir]) {
          worst = std::max(worst, rp.profiles[dir].Divergence(b, c));
        }
        total += worst;
      }
      return total;
    };
    DeltaResult r = MinimizeChernoff(divergence, beta_max, open_end, epsilon,
                                     options.delta);
    if (r.delta > out.delta || out.beta_star == 0.0) {
      out.delta = std::max(out.delta, r.delta);
      out.beta_star = r.beta_star;
      out.infinite = r.infinite;
      out.diagnostic = r.diagnostic;
    }
  }
  return out;
}

PairOutcome NaiveSum(const std::vector<RoundPair>& rounds, double epsilon,
                     const AuditOptions& options) {
  PairOutcome out;
  const double share = epsilon / static_cast<double>(rounds.size());
  double total = 0.0;
  for (const RoundPair& rp : rounds) {
    PairOutcome one = SingleRound(rp, share, options);
    total += one.delta;
    out.rank = std::max(out.rank, one.rank);
    out.beta_star = std::max(out.beta_star, one.beta_star);
    if (one.infinite) {
      out.infinite = true;
      out.diagnostic = one.diagnostic;
    }
  }
  out.delta = std::min(1.0, total);
  return out;
}

}  // namespace

std::vector<PrivacyReport> AuditPrivacy(const data::PartitionedDataset& data,
                                        const network::Topology& top,
                                        const engine::RunConfig& cfg,
                                        std::span<const double> epsilons,
                                        std::span<const Perturbation> perts,
                                        const AuditOptions& options) {
  cfg.Validate();
  if (data.agents() != top.agents()) {
    throw InvalidArgument("data and topology disagree on the agent count");
  }
  for (double e : epsilons) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw InvalidArgument("epsilon must be finite and >= 0");
    }
  }
  if (!(options.energy_tol > 0.0) || options.energy_tol > 1.0) {
    throw InvalidArgument("energy_tol must lie in (0, 1]");
  }
  // Validates every perturbation up front.
  for (const Perturbation& p : perts) (void)ApplyPerturbation(data, p);

  const int rank = cfg.rank;
  Composition compose = options.compose;
  if (compose == Composition::kAuto) {
    compose = rank <= 2 ? Composition::kStacked : Composition::kNaiveSum;
  }
  engine::RunConfig round_cfg = cfg;
  round_cfg.rank = 1;

  const Index m = data.agents();
  const std::size_t ne = epsilons.size();
  std::vector<data::PartitionedDataset> base_rounds = DeflatedRounds(data, rank);
  std::vector<std::vector<ObserverConditional>> base;  // [observer][round]
  std::vector<std::vector<std::vector<Realization>>> draws;
  base.resize(m);
  draws.resize(m);
  for (Index i = 0; i < m; ++i) {
    for (int l = 0; l < rank; ++l) {
      base[i].push_back(
          BuildObserverConditional(base_rounds[l], top, round_cfg, i));
      draws[i].push_back(OwnRealizations(base_rounds[l], cfg, i, l,
                                         options.random_realizations,
                                         options.seed));
    }
  }

  // outcomes[pert][observer][eps]
  const Index np = static_cast<Index>(perts.size());
  std::vector<std::vector<std::vector<PairOutcome>>> outcomes(
      np, std::vector<std::vector<PairOutcome>>(m));
  ParallelFor(np, options.jobs, [&](Index k) {
    const Perturbation& pert = perts[k];
    std::vector<data::PartitionedDataset> alt_rounds =
        DeflatedRounds(ApplyPerturbation(data, pert), rank);
    for (Index i = 0; i < m; ++i) {
      if (i == pert.agent) continue;
      std::vector<RoundPair> pairs;
      for (int l = 0; l < rank; ++l) {
        ObserverConditional alt =
            BuildObserverConditional(alt_rounds[l], top, round_cfg, i);
        pairs.push_back(CompareRound(base[i][l], alt, draws[i][l], options));
      }
      auto& slot = outcomes[k][i];
      for (std::size_t e = 0; e < ne; ++e) {
        if (rank == 1) {
          slot.push_back(SingleRound(pairs[0], epsilons[e], options));
        } else if (compose == Composition::kStacked) {
          slot.push_back(Stacked(pairs, epsilons[e], options));
        } else {
          slot.push_back(NaiveSum(pairs, epsilons[e], options));
        }
      }
    }
  });

  std::vector<PrivacyReport> reports(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    PrivacyReport& rep = reports[e];
    rep.epsilon = epsilons[e];
    rep.perturbations = np;
    rep.composition = rank == 1 ? "single-round"
                      : compose == Composition::kStacked ? "stacked"
                                                         : "naive-sum";
    std::set<std::string> diags;
    for (Index i = 0; i < m; ++i) {
      ObserverResult obs;
      obs.agent = i;
      bool any = false;
      for (Index k = 0; k < np; ++k) {
        if (outcomes[k][i].empty()) continue;
        const PairOutcome& o = outcomes[k][i][e];
        if (!any || o.delta > obs.delta) {
          obs.delta = o.delta;
          obs.beta_star = o.beta_star;
          obs.perturbation_id = perts[k].id;
          obs.reduced_rank = o.rank;
          obs.infinite = o.infinite;
          any = true;
        }
        if (!o.diagnostic.empty()) {
          diags.insert("observer " + std::to_string(i) + ", " + perts[k].id +
                       ": " + o.diagnostic + "; delta set to 1");
        }
      }
      rep.per_observer.push_back(obs);
      if (i == 0 || obs.delta > rep.delta) {
        rep.delta = obs.delta;
        rep.worst_observer = i;
        rep.perturbation_id = obs.perturbation_id;
      }
    }
    if (np == 0) rep.diagnostics.push_back("empty perturbation set");
    rep.diagnostics.insert(rep.diagnostics.end(), diags.begin(), diags.end());
  }
  return reports;
}

}  // namespace ddppm::privacy
