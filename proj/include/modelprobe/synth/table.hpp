/*
 * Copyright 2026 The ModelProbe Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "modelprobe/common/csv.hpp"
#include "modelprobe/common/json.hpp"

namespace modelprobe::synth {

enum class ColumnKind { kCategorical, kNumeric };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::kCategorical;
  std::vector<std::string> categories;  // categorical domain, sorted
  double min = 0.0;                     // numeric domain
  double max = 0.0;

  bool is_numeric() const noexcept { return kind == ColumnKind::kNumeric; }
  double range() const noexcept { return max - min; }
};

struct TableSchema {
  std::vector<Column> columns;

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::size_t require_index(std::string_view name) const;
  std::vector<std::string> names() const;
  // Names unique, numeric min <= max, categorical domains non-empty.
  void validate() const;
};

using Cell = std::variant<double, std::string>;
using Row = std::vector<Cell>;

struct Table {
  TableSchema schema;
  std::vector<Row> rows;

  std::size_t size() const noexcept { return rows.size(); }
};

struct SchemaOptions {
  std::set<std::string> force_categorical;  // e.g. protected attributes
  std::set<std::string> exclude;            // e.g. the gold-label column
};

// A column is numeric when every value parses as a finite number and it is
// not forced categorical. Categories are sorted.
TableSchema infer_schema(const CsvTable& csv, const SchemaOptions& options = {});
Table table_from_csv(const CsvTable& csv, const SchemaOptions& options = {});
CsvTable table_to_csv(const Table& table);

std::string cell_text(const Cell& cell);
double cell_number(const Cell& cell);

// Ordered JSON object column -> value, in schema order.
Json row_to_sample(const TableSchema& schema, const Row& row);
Row row_from_sample(const TableSchema& schema, const Json& sample);

void to_json(Json& j, const TableSchema& schema);
void from_json(const Json& j, TableSchema& schema);

}  // namespace modelprobe::synth
