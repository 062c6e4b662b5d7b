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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "modelprobe/common/json.hpp"
#include "modelprobe/gateway/gateway.hpp"
#include "modelprobe/synth/table.hpp"

namespace modelprobe::synth {

// Internal nodes route left when the value is <= threshold (numeric) or in
// `left_categories` (categorical); everything else, including categories
// never seen during training, goes right.
struct TreeNode {
  bool leaf = true;
  std::string label;
  std::size_t support = 0;
  std::size_t column = 0;
  double threshold = 0.0;
  std::vector<std::string> left_categories;
  int left = -1;
  int right = -1;
};

class SurrogateTree {
 public:
  SurrogateTree() = default;
  SurrogateTree(TableSchema schema, std::vector<TreeNode> nodes, double fidelity)
      : schema_(std::move(schema)), nodes_(std::move(nodes)), fidelity_(fidelity) {}

  const TableSchema& schema() const noexcept { return schema_; }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  double fidelity() const noexcept { return fidelity_; }
  bool empty() const noexcept { return nodes_.empty(); }

  // Node index of the leaf a row is routed to.
  std::size_t route(const Row& row) const;
  std::string predict(const Row& row) const { return nodes_[route(row)].label; }
  // Leaf node indices, left-first depth-first order.
  std::vector<std::size_t> leaves() const;
  std::size_t depth() const;
  // Columns used by at least one split.
  std::vector<std::string> split_columns() const;

 private:
  TableSchema schema_;
  std::vector<TreeNode> nodes_;
  double fidelity_ = 1.0;
};

struct SurrogateOptions {
  std::size_t max_depth = 6;
  std::size_t min_leaf = 20;
  double train_fraction = 0.8;
  double max_error_fraction = 0.10;
};

// CART with Gini impurity on a seeded 80/20 split; fidelity is agreement
// with `labels` on the held-out 20%.
SurrogateTree fit_cart(const Table& rows, std::span<const std::string> labels,
                       const SurrogateOptions& options, std::uint64_t seed);

// Labels `rows` with the black box, then fits CART. Aborts with diagnostics
// when more than max_error_fraction of the predictions fail.
SurrogateTree fit_surrogate(const Table& rows, const gateway::PredictorHandle& predictor,
                            const SurrogateOptions& options, std::uint64_t seed);

void to_json(Json& j, const SurrogateTree& tree);
void from_json(const Json& j, SurrogateTree& tree);

}  // namespace modelprobe::synth
