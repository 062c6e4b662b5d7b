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
#include <string>
#include <vector>

#include "modelprobe/common/json.hpp"
#include "modelprobe/synth/distribution.hpp"
#include "modelprobe/synth/surrogate.hpp"

namespace modelprobe::synth {

enum class Relation { kLessEqual, kGreater, kIn, kNotIn };

struct Predicate {
  std::string column;
  Relation relation = Relation::kLessEqual;
  double threshold = 0.0;               // numeric relations
  std::vector<std::string> categories;  // set relations

  std::string to_string() const;
};

struct DecisionPath {
  std::vector<Predicate> predicates;
  std::string label;
  std::size_t leaf_node = 0;

  std::string to_string() const;
};

// One path per leaf, left-first order; predicates in root-to-leaf order.
std::vector<DecisionPath> extract_paths(const SurrogateTree& tree);

// Intersection of a path's predicates, per schema column.
Region path_region(const TableSchema& schema, const DecisionPath& path);

bool path_admits(const TableSchema& schema, const DecisionPath& path, const Row& row);

struct PathAllocation {
  std::size_t path_index = 0;
  bool satisfiable = true;
  std::size_t quota = 0;
  std::size_t emitted = 0;
  std::size_t rejection_rows = 0;
  std::size_t fallback_rows = 0;
  std::size_t attempts = 0;
};

struct PathGeneration {
  std::vector<Row> rows;
  std::vector<std::size_t> row_path;  // path index of each row
  std::vector<bool> row_fallback;     // produced by constrained sampling
  std::vector<PathAllocation> allocation;
  std::vector<std::string> warnings;

  std::size_t requested = 0;
};

// Equal allocation floor(n / |satisfiable paths|), remainder to the first
// satisfiable paths in leaf order. Each path rejection-samples from the
// model up to 1000 x quota attempts, then falls back to constrained
// sampling. Paths with zero mass under the model get no rows and a warning.
PathGeneration generate_for_paths(const std::vector<DecisionPath>& paths,
                                  const JointDistributionModel& model, std::size_t n,
                                  std::uint64_t seed);

// Fraction of satisfiable leaf paths hit by at least one row. Without a
// model every leaf whose region is non-empty over the schema counts.
double path_coverage(const std::vector<Row>& rows, const SurrogateTree& tree,
                     const JointDistributionModel* model = nullptr);

void to_json(Json& j, const DecisionPath& path);

}  // namespace modelprobe::synth
