// Copyright 2026 The parares Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "parares/sweep.hpp"

namespace parares::cli {

/// Column-oriented result block. Cells are numbers, strings, booleans or
/// null (written as an empty CSV field).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  /// Ordered "key: value" metadata; the key "generated" is the only
  /// non-deterministic entry.
  std::vector<std::pair<std::string, nlohmann::json>> metadata;

  void add_row(std::vector<nlohmann::json> row);
};

/// Shortest representation that round-trips through strtod.
std::string format_number(double x);

void write_csv(std::ostream& out, const Table& table);
void write_json(std::ostream& out, const Table& table);

/// Writes to `path` ("-" is standard output) in `format` (csv | json).
void write_table(const std::string& path, const std::string& format, const Table& table);

nlohmann::json verdict_json(const sweep::PointVerdict& v);
sweep::PointVerdict verdict_from_json(const nlohmann::json& j);

/// Append-only JSON-lines record of completed sweep cells. The first line
/// identifies the configuration; a truncated trailing line is ignored.
class Manifest {
 public:
  /// Opens or creates `path`. Throws std::invalid_argument when an existing
  /// manifest belongs to a different configuration or grid.
  Manifest(std::string path, const std::string& fingerprint, std::size_t cells);

  const std::vector<std::optional<sweep::PointVerdict>>& completed() const { return completed_; }
  std::size_t completed_count() const;
  void record(std::size_t index, const sweep::PointVerdict& v);

 private:
  std::string path_;
  std::vector<std::optional<sweep::PointVerdict>> completed_;
};

}  // namespace parares::cli
