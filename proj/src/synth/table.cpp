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

#include "modelprobe/synth/table.hpp"

#include <algorithm>

#include "modelprobe/common/error.hpp"

namespace modelprobe::synth {

std::optional<std::size_t> TableSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t TableSchema::require_index(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  fail(ErrorCode::kInvalidArgument, "unknown column '" + std::string(name) + "'");
}

std::vector<std::string> TableSchema::names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

void TableSchema::validate() const {
  std::set<std::string> seen;
  for (const auto& c : columns) {
    if (!seen.insert(c.name).second) fail(ErrorCode::kInvalidArgument, "duplicate column " + c.name);
    if (c.is_numeric() && c.min > c.max) {
      fail(ErrorCode::kInvalidArgument, "column " + c.name + " has min > max");
    }
    if (!c.is_numeric() && c.categories.empty()) {
      fail(ErrorCode::kInvalidArgument, "categorical column " + c.name + " has no categories");
    }
  }
}

TableSchema infer_schema(const CsvTable& csv, const SchemaOptions& options) {
  TableSchema schema;
  for (std::size_t c = 0; c < csv.header.size(); ++c) {
    const std::string& name = csv.header[c];
    if (options.exclude.contains(name)) continue;
    Column col;
    col.name = name;
    bool numeric = !options.force_categorical.contains(name) && !csv.rows.empty();
    double lo = 0.0, hi = 0.0;
    bool first = true;
    if (numeric) {
      for (const auto& row : csv.rows) {
        auto v = parse_number(row[c]);
        if (!v) {
          numeric = false;
          break;
        }
        lo = first ? *v : std::min(lo, *v);
        hi = first ? *v : std::max(hi, *v);
        first = false;
      }
    }
    if (numeric) {
      col.kind = ColumnKind::kNumeric;
      col.min = lo;
      col.max = hi;
    } else {
      std::set<std::string> cats;
      for (const auto& row : csv.rows) cats.insert(row[c]);
      col.categories.assign(cats.begin(), cats.end());
    }
    schema.columns.push_back(std::move(col));
  }
  schema.validate();
  return schema;
}

Table table_from_csv(const CsvTable& csv, const SchemaOptions& options) {
  Table table;
  table.schema = infer_schema(csv, options);
  std::vector<std::size_t> source;
  for (const auto& col : table.schema.columns) source.push_back(*csv.column_index(col.name));
  table.rows.reserve(csv.rows.size());
  for (const auto& raw : csv.rows) {
    Row row;
    row.reserve(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
      if (table.schema.columns[i].is_numeric()) {
        row.emplace_back(*parse_number(raw[source[i]]));
      } else {
        row.emplace_back(raw[source[i]]);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable table_to_csv(const Table& table) {
  CsvTable csv;
  csv.header = table.schema.names();
  for (const auto& row : table.rows) {
    std::vector<std::string> out;
    for (const auto& cell : row) out.push_back(cell_text(cell));
    csv.rows.push_back(std::move(out));
  }
  return csv;
}

std::string cell_text(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  return std::get<std::string>(cell);
}

double cell_number(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  if (auto v = parse_number(std::get<std::string>(cell))) return *v;
  fail(ErrorCode::kInvalidArgument, "cell is not numeric: " + std::get<std::string>(cell));
}

Json row_to_sample(const TableSchema& schema, const Row& row) {
  Json obj = Json::object();
  for (std::size_t i = 0; i < schema.columns.size(); ++i) {
    if (const auto* d = std::get_if<double>(&row[i])) {
      obj[schema.columns[i].name] = *d;
    } else {
      obj[schema.columns[i].name] = std::get<std::string>(row[i]);
    }
  }
  return obj;
}

Row row_from_sample(const TableSchema& schema, const Json& sample) {
  Row row;
  for (const auto& col : schema.columns) {
    const Json& v = sample.at(col.name);
    if (col.is_numeric()) {
      row.emplace_back(v.is_number() ? v.get<double>() : cell_number(Cell{v.get<std::string>()}));
    } else {
      row.emplace_back(v.is_string() ? v.get<std::string>() : format_number(v.get<double>()));
    }
  }
  return row;
}

void to_json(Json& j, const TableSchema& schema) {
  j = Json::array();
  for (const auto& c : schema.columns) {
    Json col{{"name", c.name}, {"kind", c.is_numeric() ? "numeric" : "categorical"}};
    if (c.is_numeric()) {
      col["min"] = c.min;
      col["max"] = c.max;
    } else {
      col["categories"] = c.categories;
    }
    j.push_back(std::move(col));
  }
}

void from_json(const Json& j, TableSchema& schema) {
  schema.columns.clear();
  for (const auto& col : j) {
    Column c;
    c.name = col.at("name").get<std::string>();
    c.kind = col.at("kind").get<std::string>() == "numeric" ? ColumnKind::kNumeric
                                                             : ColumnKind::kCategorical;
    if (c.is_numeric()) {
      c.min = col.at("min").get<double>();
      c.max = col.at("max").get<double>();
    } else {
      c.categories = col.at("categories").get<std::vector<std::string>>();
    }
    schema.columns.push_back(std::move(c));
  }
}

}  // namespace modelprobe::synth
