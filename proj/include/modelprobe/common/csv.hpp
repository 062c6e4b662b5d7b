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
#include <string>
#include <string_view>
#include <vector>

namespace modelprobe {

// RFC-4180 table: first record is the header, every record has the same
// number of fields.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column_index(std::string_view name) const;
};

// Throws Error(kInvalidArgument) on unterminated quotes, ragged rows or a
// missing header. A trailing newline does not produce an empty record.
CsvTable parse_csv(std::string_view text);

std::string write_csv(const CsvTable& table);

// Strict full-string numeric parse (no trailing garbage, finite values only).
std::optional<double> parse_number(std::string_view text);

// Shortest representation that round-trips through parse_number.
std::string format_number(double value);

}  // namespace modelprobe
