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

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "modelprobe/common/json.hpp"

namespace modelprobe::testers {

// Minority-group predicate, e.g. `marital == 'single' and (sex != "M")`.
// Grammar in docs/group-expressions.md. `and` binds tighter than `or`;
// keywords are case-insensitive.
class GroupExpression {
 public:
  struct Node;

  // Throws Error(kInvalidArgument) with the offending position.
  static GroupExpression parse(std::string_view text);

  // Values compare numerically when both sides parse as numbers, as text
  // otherwise. A missing column never equals anything.
  bool matches(const Json& sample) const;

  // Column names in order of first appearance.
  std::vector<std::string> columns() const;
  GroupExpression negated() const;
  std::string to_string() const;

 private:
  explicit GroupExpression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace modelprobe::testers
