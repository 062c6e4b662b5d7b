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

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "modelprobe/common/json.hpp"

namespace modelprobe::gateway {

// JSONPath subset used to pull labels and confidences out of model
// responses:
//
//   $                 root
//   .name  ['name']   child member
//   [3]  [-1]         array index (negative counts from the end)
//   [*]  .*           wildcard over array elements or object members
//   ..name  ..[*]     recursive descent
//
// Filters, slices, unions and script expressions are rejected at parse time.
// Results are produced in document order.
class JsonPath {
 public:
  static JsonPath parse(std::string_view expression);

  std::vector<const Json*> evaluate(const Json& document) const;

  const std::string& expression() const noexcept { return expression_; }

 private:
  struct Member { std::string name; };
  struct Index { long long value; };
  struct Wildcard {};
  using Selector = std::variant<Member, Index, Wildcard>;
  struct Step {
    bool recursive = false;
    Selector selector;
  };

  std::string expression_;
  std::vector<Step> steps_;
};

}  // namespace modelprobe::gateway
