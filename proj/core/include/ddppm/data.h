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

#ifndef DDPPM_CORE_DATA_H_
#define DDPPM_CORE_DATA_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddppm/common.h"

namespace ddppm::data {

// Rows as read from disk, before any preprocessing.
struct RawDataset {
  Matrix rows;  // n x d
  std::string source_name;
};

// Global data matrix with every row inside the unit ball.
struct Dataset {
  Matrix x;  // n x d
};

// Row-wise split of X across m agents. Agent i owns the contiguous global
// rows [starts[i], starts[i] + blocks[i].rows()).
class PartitionedDataset {
 public:
  PartitionedDataset() = default;
  PartitionedDataset(std::vector<Matrix> blocks);

  Index agents() const { return static_cast<Index>(blocks_.size()); }
  Index rows() const { return rows_; }
  Index dim() const { return dim_; }
  Index size(Index agent) const { return blocks_[agent].rows(); }
  Index start(Index agent) const { return starts_[agent]; }
  Index max_block_size() const;

  const Matrix& block(Index agent) const { return blocks_[agent]; }
  Matrix& mutable_block(Index agent) { return blocks_[agent]; }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  // Global row indices owned by an agent.
  std::vector<Index> Offsets(Index agent) const;
  // Owner of a global row.
  Index AgentOf(Index global_row) const;

  // Vertical concatenation of the blocks.
  Matrix Stack() const;

  // Segment of a global n-vector that belongs to an agent.
  Vector Segment(const Vector& global, Index agent) const {
    return global.segment(starts_[agent], blocks_[agent].rows());
  }

 private:
  std::vector<Matrix> blocks_;
  std::vector<Index> starts_;
  Index rows_ = 0;
  Index dim_ = 0;
};

// Reads a numeric CSV. `columns`, when non-empty, selects (0-based) columns
// in the given order. Errors name the offending row and column.
RawDataset LoadCsv(const std::string& path, bool has_header,
                   std::span<const int> columns = {});
RawDataset ParseCsv(const std::string& text, bool has_header,
                    std::span<const int> columns = {},
                    const std::string& source_name = "<memory>");

// Subtracts the column means.
RawDataset CenterColumns(const RawDataset& raw);

// Divides by the largest row norm so that every row lies in the unit ball.
Dataset NormalizeUnitBall(const RawDataset& raw);

// Splits rows across m agents. Without explicit sizes the split is balanced
// and the remainder goes to the lowest-index agents.
PartitionedDataset PartitionRows(const Dataset& x, Index m,
                                 std::optional<std::vector<Index>> sizes = {});

}  // namespace ddppm::data

#endif  // DDPPM_CORE_DATA_H_
