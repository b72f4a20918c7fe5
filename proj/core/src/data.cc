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

#include "ddppm/data.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace ddppm::data {
namespace {

std::string Trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> SplitCells(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(Trim(std::string_view(line).substr(start)));
      return cells;
    }
    cells.push_back(Trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
}

}  // namespace

PartitionedDataset::PartitionedDataset(std::vector<Matrix> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw InvalidArgument("partition has no blocks");
  dim_ = blocks_.front().cols();
  starts_.reserve(blocks_.size());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].cols() != dim_) {
      throw InvalidArgument("block " + std::to_string(i) +
                            " has a different column count");
    }
    if (blocks_[i].rows() < 1) {
      throw InvalidArgument("block " + std::to_string(i) + " is empty");
    }
    starts_.push_back(rows_);
    rows_ += blocks_[i].rows();
  }
}

Index PartitionedDataset::max_block_size() const {
  Index best = 0;
  for (const Matrix& b : blocks_) best = std::max(best, b.rows());
  return best;
}

std::vector<Index> PartitionedDataset::Offsets(Index agent) const {
  std::vector<Index> out(blocks_[agent].rows());
  std::iota(out.begin(), out.end(), starts_[agent]);
  return out;
}

Index PartitionedDataset::AgentOf(Index global_row) const {
  if (global_row < 0 || global_row >= rows_) {
    throw InvalidArgument("row index out of range");
  }
  auto it = std::upper_bound(starts_.begin(), starts_.end(), global_row);
  return static_cast<Index>(it - starts_.begin()) - 1;
}

Matrix PartitionedDataset::Stack() const {
  Matrix x(rows_, dim_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    x.middleRows(starts_[i], blocks_[i].rows()) = blocks_[i];
  }
  return x;
}

RawDataset ParseCsv(const std::string& text, bool has_header,
                    std::span<const int> columns,
                    const std::string& source_name) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t line_no = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::vector<std::string> cells = SplitCells(line);
    if (rows.empty()) {
      width = cells.size();
    } else if (cells.size() != width) {
      throw ParseError(source_name + ": line " + std::to_string(line_no) +
                       " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(width));
    }
    std::vector<double> values(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const std::string& cell = cells[j];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() ||
          ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ParseError(source_name + ": line " + std::to_string(line_no) +
                         ", column " + std::to_string(j + 1) +
                         ": not a finite number: '" + cell + "'");
      }
      values[j] = v;
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError(source_name + ": no rows");

  std::vector<int> selected(columns.begin(), columns.end());
  if (selected.empty()) {
    selected.resize(width);
    std::iota(selected.begin(), selected.end(), 0);
  }
  for (int c : selected) {
    if (c < 0 || static_cast<std::size_t>(c) >= width) {
      throw ParseError(source_name + ": column " + std::to_string(c) +
                       " out of range (width " + std::to_string(width) + ")");
    }
  }
  RawDataset raw;
  raw.source_name = source_name;
  raw.rows.resize(static_cast<Index>(rows.size()),
                  static_cast<Index>(selected.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < selected.size(); ++j) {
      raw.rows(i, j) = rows[i][selected[j]];
    }
  }
  return raw;
}

RawDataset LoadCsv(const std::string& path, bool has_header,
                   std::span<const int> columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw ParseError("read failure on " + path);
  return ParseCsv(buf.str(), has_header, columns, path);
}

RawDataset CenterColumns(const RawDataset& raw) {
  RawDataset out = raw;
  out.rows.rowwise() -= raw.rows.colwise().mean();
  return out;
}

Dataset NormalizeUnitBall(const RawDataset& raw) {
  if (raw.rows.rows() < 1) throw InvalidArgument("dataset has no rows");
  if (!raw.rows.allFinite()) throw InvalidArgument("dataset has non-finite values");
  double s = raw.rows.rowwise().norm().maxCoeff();
  if (s == 0.0) s = 1.0;
  return Dataset{raw.rows / s};
}

PartitionedDataset PartitionRows(const Dataset& x, Index m,
                                 std::optional<std::vector<Index>> sizes) {
  const Index n = x.x.rows();
  std::vector<Index> n_i;
  if (sizes) {
    n_i = *sizes;
    if (static_cast<Index>(n_i.size()) != m) {
      throw InvalidArgument("got " + std::to_string(n_i.size()) +
                            " block sizes for " + std::to_string(m) + " agents");
    }
    Index total = 0;
    for (Index s : n_i) {
      if (s < 1) throw InvalidArgument("every block needs at least one row");
      total += s;
    }
    if (total != n) {
      throw InvalidArgument("block sizes sum to " + std::to_string(total) +
                            ", dataset has " + std::to_string(n) + " rows");
    }
  } else {
    if (m < 1) throw InvalidArgument("agent count must be at least 1");
    if (m > n) {
      throw InvalidArgument("more agents (" + std::to_string(m) +
                            ") than rows (" + std::to_string(n) + ")");
    }
    n_i.assign(m, n / m);
    for (Index i = 0; i < n % m; ++i) ++n_i[i];
  }
  std::vector<Matrix> blocks;
  blocks.reserve(m);
  Index start = 0;
  for (Index s : n_i) {
    blocks.push_back(x.x.middleRows(start, s));
    start += s;
  }
  return PartitionedDataset(std::move(blocks));
}

}  // namespace ddppm::data
