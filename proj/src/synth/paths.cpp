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

#include "modelprobe/synth/paths.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "modelprobe/common/csv.hpp"
#include "modelprobe/common/error.hpp"
#include "modelprobe/common/random.hpp"

namespace modelprobe::synth {
namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

std::string_view relation_symbol(Relation r) {
  switch (r) {
    case Relation::kLessEqual: return "<=";
    case Relation::kGreater: return ">";
    case Relation::kIn: return "in";
    case Relation::kNotIn: return "not in";
  }
  return "?";
}

bool geometric_nonempty(const TableSchema& schema, const Region& region) {
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    const Column& col = schema.columns[c];
    if (col.is_numeric()) {
      Interval iv = region[c].interval;
      if (col.min > iv.lo || (col.min == iv.lo && !iv.lo_open)) {
        iv.lo = col.min;
        iv.lo_open = false;
      }
      if (col.max < iv.hi || (col.max == iv.hi && !iv.hi_open)) {
        iv.hi = col.max;
        iv.hi_open = false;
      }
      if (iv.empty()) return false;
    } else if (std::none_of(col.categories.begin(), col.categories.end(),
                            [&](const std::string& cat) { return region[c].admits(cat); })) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::string Predicate::to_string() const {
  std::ostringstream os;
  os << column << ' ' << relation_symbol(relation) << ' ';
  if (relation == Relation::kIn || relation == Relation::kNotIn) {
    os << '{' << join(categories) << '}';
  } else {
    os << format_number(threshold);
  }
  return os.str();
}

std::string DecisionPath::to_string() const {
  std::vector<std::string> parts;
  for (const auto& p : predicates) parts.push_back(p.to_string());
  return (parts.empty() ? std::string("true") : [&] {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? " and " : "") + parts[i];
    return s;
  }()) + " -> " + label;
}

std::vector<DecisionPath> extract_paths(const SurrogateTree& tree) {
  if (tree.empty()) fail(ErrorCode::kInvalidArgument, "extract_paths needs a non-empty tree");
  const auto& nodes = tree.nodes();
  const auto& schema = tree.schema();
  std::vector<DecisionPath> out;
  std::vector<Predicate> trail;

  auto walk = [&](auto&& self, std::size_t n) -> void {
    const TreeNode& node = nodes[n];
    if (node.leaf) {
      out.push_back({trail, node.label, n});
      return;
    }
    const Column& col = schema.columns[node.column];
    Predicate left{col.name, Relation::kLessEqual, node.threshold, {}};
    Predicate right{col.name, Relation::kGreater, node.threshold, {}};
    if (!col.is_numeric()) {
      left = {col.name, Relation::kIn, 0.0, node.left_categories};
      right = {col.name, Relation::kNotIn, 0.0, node.left_categories};
    }
    trail.push_back(left);
    self(self, static_cast<std::size_t>(node.left));
    trail.back() = right;
    self(self, static_cast<std::size_t>(node.right));
    trail.pop_back();
  };
  walk(walk, 0);
  return out;
}

Region path_region(const TableSchema& schema, const DecisionPath& path) {
  Region region = unconstrained_region(schema);
  for (const auto& p : path.predicates) {
    ColumnRegion& r = region[schema.require_index(p.column)];
    switch (p.relation) {
      case Relation::kLessEqual:
        if (p.threshold < r.interval.hi) {
          r.interval.hi = p.threshold;
          r.interval.hi_open = false;
        }
        break;
      case Relation::kGreater:
        if (p.threshold > r.interval.lo) {
          r.interval.lo = p.threshold;
          r.interval.lo_open = true;
        } else if (p.threshold == r.interval.lo) {
          r.interval.lo_open = true;
        }
        break;
      case Relation::kIn: {
        std::set<std::string> s(p.categories.begin(), p.categories.end());
        if (r.allowed) {
          std::set<std::string> both;
          std::set_intersection(r.allowed->begin(), r.allowed->end(), s.begin(), s.end(),
                                std::inserter(both, both.end()));
          r.allowed = std::move(both);
        } else {
          r.allowed = std::move(s);
        }
        break;
      }
      case Relation::kNotIn:
        r.excluded.insert(p.categories.begin(), p.categories.end());
        break;
    }
  }
  return region;
}

bool path_admits(const TableSchema& schema, const DecisionPath& path, const Row& row) {
  return region_contains(schema, path_region(schema, path), row);
}

PathGeneration generate_for_paths(const std::vector<DecisionPath>& paths,
                                  const JointDistributionModel& model, std::size_t n,
                                  std::uint64_t seed) {
  PathGeneration gen;
  gen.requested = n;
  const TableSchema& schema = model.schema;

  std::vector<Region> regions;
  std::size_t satisfiable = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    regions.push_back(path_region(schema, paths[i]));
    PathAllocation a;
    a.path_index = i;
    a.satisfiable = region_satisfiable(model, regions.back());
    if (a.satisfiable) {
      ++satisfiable;
    } else {
      gen.warnings.push_back("path " + std::to_string(i) + " [" + paths[i].to_string() +
                             "] is unsatisfiable under the distribution model; 0 rows generated");
    }
    gen.allocation.push_back(a);
  }
  if (satisfiable == 0) fail(ErrorCode::kFailedPrecondition, "all decision paths are unsatisfiable");
  if (n < satisfiable) {
    fail(ErrorCode::kInvalidArgument, "budget " + std::to_string(n) + " is smaller than the " +
                                          std::to_string(satisfiable) + " satisfiable paths");
  }

  std::size_t remainder = n % satisfiable;
  for (auto& a : gen.allocation) {
    if (!a.satisfiable) continue;
    a.quota = n / satisfiable + (remainder > 0 ? 1 : 0);
    if (remainder > 0) --remainder;
  }

  for (auto& a : gen.allocation) {
    if (!a.satisfiable) continue;
    Rng rng(derive_seed(seed, a.path_index));
    const DecisionPath& path = paths[a.path_index];
    const Region& region = regions[a.path_index];
    const std::size_t cap = 1000 * a.quota;
    auto emit = [&](Row row, bool fallback) {
      gen.rows.push_back(std::move(row));
      gen.row_path.push_back(a.path_index);
      gen.row_fallback.push_back(fallback);
      ++a.emitted;
      ++(fallback ? a.fallback_rows : a.rejection_rows);
    };
    while (a.emitted < a.quota && a.attempts < cap) {
      ++a.attempts;
      Row row = sample_row(model, rng);
      if (region_contains(schema, region, row)) emit(std::move(row), false);
    }
    while (a.emitted < a.quota) {
      auto row = sample_constrained(model, region, rng);
      if (!row || !path_admits(schema, path, *row)) {
        fail(ErrorCode::kInternal, "constrained sampling left path " + std::to_string(a.path_index));
      }
      emit(std::move(*row), true);
    }
    if (a.fallback_rows > 0) {
      gen.warnings.push_back("path " + std::to_string(a.path_index) + ": " +
                             std::to_string(a.fallback_rows) +
                             " rows from constrained sampling after the rejection cap");
    }
  }
  return gen;
}

double path_coverage(const std::vector<Row>& rows, const SurrogateTree& tree,
                     const JointDistributionModel* model) {
  if (rows.empty() || tree.empty()) return 0.0;
  const auto paths = extract_paths(tree);
  std::set<std::size_t> eligible;
  for (const auto& p : paths) {
    const Region region = path_region(tree.schema(), p);
    const bool ok = model ? region_satisfiable(*model, region) : geometric_nonempty(tree.schema(), region);
    if (ok) eligible.insert(p.leaf_node);
  }
  if (eligible.empty()) return 0.0;
  std::set<std::size_t> hit;
  for (const auto& row : rows) {
    const std::size_t leaf = tree.route(row);
    if (eligible.contains(leaf)) hit.insert(leaf);
  }
  return static_cast<double>(hit.size()) / static_cast<double>(eligible.size());
}

void to_json(Json& j, const DecisionPath& path) {
  Json preds = Json::array();
  for (const auto& p : path.predicates) {
    Json jp{{"column", p.column}, {"relation", relation_symbol(p.relation)}};
    if (p.relation == Relation::kIn || p.relation == Relation::kNotIn) {
      jp["categories"] = p.categories;
    } else {
      jp["threshold"] = p.threshold;
    }
    preds.push_back(std::move(jp));
  }
  j = Json{{"predicates", preds}, {"label", path.label}, {"leaf_node", path.leaf_node}};
}

}  // namespace modelprobe::synth
