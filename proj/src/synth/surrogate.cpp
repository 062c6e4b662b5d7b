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

#include "modelprobe/synth/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "modelprobe/common/error.hpp"
#include "modelprobe/common/random.hpp"

namespace modelprobe::synth {

// --- routing -------------------------------------------------------------------

std::size_t SurrogateTree::route(const Row& row) const {
  if (nodes_.empty()) fail(ErrorCode::kFailedPrecondition, "empty surrogate tree");
  std::size_t n = 0;
  while (!nodes_[n].leaf) {
    const TreeNode& node = nodes_[n];
    bool go_left;
    if (schema_.columns[node.column].is_numeric()) {
      go_left = cell_number(row[node.column]) <= node.threshold;
    } else {
      const std::string v = cell_text(row[node.column]);
      go_left = std::find(node.left_categories.begin(), node.left_categories.end(), v) !=
                node.left_categories.end();
    }
    n = static_cast<std::size_t>(go_left ? node.left : node.right);
  }
  return n;
}

std::vector<std::size_t> SurrogateTree::leaves() const {
  std::vector<std::size_t> out;
  if (nodes_.empty()) return out;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t n = stack.back();
    stack.pop_back();
    if (nodes_[n].leaf) {
      out.push_back(n);
    } else {
      stack.push_back(static_cast<std::size_t>(nodes_[n].right));
      stack.push_back(static_cast<std::size_t>(nodes_[n].left));
    }
  }
  return out;
}

std::size_t SurrogateTree::depth() const {
  if (nodes_.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [n, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (!nodes_[n].leaf) {
      stack.push_back({static_cast<std::size_t>(nodes_[n].left), d + 1});
      stack.push_back({static_cast<std::size_t>(nodes_[n].right), d + 1});
    }
  }
  return best;
}

std::vector<std::string> SurrogateTree::split_columns() const {
  std::set<std::string> cols;
  for (const auto& n : nodes_) {
    if (!n.leaf) cols.insert(schema_.columns[n.column].name);
  }
  return {cols.begin(), cols.end()};
}

// --- CART ----------------------------------------------------------------------

namespace {

double gini(const std::vector<double>& counts, double total) {
  if (total <= 0.0) return 0.0;
  double s = 0.0;
  for (double c : counts) s += (c / total) * (c / total);
  return 1.0 - s;
}

struct Split {
  bool found = false;
  double score = 0.0;
  std::size_t column = 0;
  double threshold = 0.0;
  std::vector<std::string> left_categories;
};

class CartBuilder {
 public:
  CartBuilder(const Table& rows, std::vector<std::size_t> classes, std::size_t num_classes,
              std::vector<std::string> class_names, const SurrogateOptions& options)
      : rows_(rows),
        classes_(std::move(classes)),
        num_classes_(num_classes),
        class_names_(std::move(class_names)),
        options_(options) {}

  std::vector<TreeNode> build(std::vector<std::size_t> indices) {
    grow(std::move(indices), 0);
    return std::move(nodes_);
  }

 private:
  std::vector<double> class_counts(const std::vector<std::size_t>& idx) const {
    std::vector<double> counts(num_classes_, 0.0);
    for (std::size_t i : idx) counts[classes_[i]] += 1.0;
    return counts;
  }

  int grow(std::vector<std::size_t> idx, std::size_t depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const auto counts = class_counts(idx);
    const double n = static_cast<double>(idx.size());
    const std::size_t majority =
        static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    nodes_[id].label = class_names_[majority];
    nodes_[id].support = idx.size();

    const double parent_gini = gini(counts, n);
    if (depth >= options_.max_depth || parent_gini <= 0.0 || idx.size() < 2 * options_.min_leaf) {
      return id;
    }
    const Split split = best_split(idx, n);
    if (!split.found || parent_gini - split.score <= 1e-12) return id;

    std::vector<std::size_t> left, right;
    const bool numeric = rows_.schema.columns[split.column].is_numeric();
    for (std::size_t i : idx) {
      bool go_left;
      if (numeric) {
        go_left = cell_number(rows_.rows[i][split.column]) <= split.threshold;
      } else {
        const std::string v = cell_text(rows_.rows[i][split.column]);
        go_left = std::find(split.left_categories.begin(), split.left_categories.end(), v) !=
                  split.left_categories.end();
      }
      (go_left ? left : right).push_back(i);
    }
    nodes_[id].leaf = false;
    nodes_[id].column = split.column;
    nodes_[id].threshold = split.threshold;
    nodes_[id].left_categories = split.left_categories;
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  Split best_split(const std::vector<std::size_t>& idx, double n) const {
    Split best;
    const auto total = class_counts(idx);
    const std::size_t min_leaf = std::max<std::size_t>(1, options_.min_leaf);
    auto consider = [&](double score, std::size_t column, double threshold,
                        std::vector<std::string> cats) {
      if (!best.found || score < best.score - 1e-12) {
        best = Split{true, score, column, threshold, std::move(cats)};
      }
    };

    for (std::size_t c = 0; c < rows_.schema.columns.size(); ++c) {
      if (rows_.schema.columns[c].is_numeric()) {
        std::vector<std::pair<double, std::size_t>> vals;
        vals.reserve(idx.size());
        for (std::size_t i : idx) vals.push_back({cell_number(rows_.rows[i][c]), classes_[i]});
        std::sort(vals.begin(), vals.end());
        std::vector<double> left(num_classes_, 0.0);
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
          left[vals[k].second] += 1.0;
          const std::size_t nl = k + 1;
          const std::size_t nr = vals.size() - nl;
          if (vals[k].first == vals[k + 1].first || nl < min_leaf || nr < min_leaf) continue;
          std::vector<double> right(num_classes_);
          for (std::size_t q = 0; q < num_classes_; ++q) right[q] = total[q] - left[q];
          const double score = (static_cast<double>(nl) * gini(left, static_cast<double>(nl)) +
                                static_cast<double>(nr) * gini(right, static_cast<double>(nr))) / n;
          double mid = 0.5 * (vals[k].first + vals[k + 1].first);
          if (!(mid < vals[k + 1].first)) mid = vals[k].first;
          consider(score, c, mid, {});
        }
      } else {
        // Order categories by their share of the node's majority class and
        // try every prefix (exact for two classes).
        std::map<std::string, std::vector<double>> per_cat;
        for (std::size_t i : idx) {
          auto& v = per_cat[cell_text(rows_.rows[i][c])];
          if (v.empty()) v.assign(num_classes_, 0.0);
          v[classes_[i]] += 1.0;
        }
        if (per_cat.size() < 2) continue;
        const std::size_t target =
            static_cast<std::size_t>(std::max_element(total.begin(), total.end()) - total.begin());
        std::vector<std::pair<std::string, std::vector<double>>> ordered(per_cat.begin(), per_cat.end());
        std::stable_sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
          auto rate = [&](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return v[target] / s;
          };
          return rate(a.second) > rate(b.second);
        });
        std::vector<double> left(num_classes_, 0.0);
        std::vector<std::string> cats;
        double nl = 0.0;
        for (std::size_t k = 0; k + 1 < ordered.size(); ++k) {
          cats.push_back(ordered[k].first);
          for (std::size_t q = 0; q < num_classes_; ++q) {
            left[q] += ordered[k].second[q];
            nl += ordered[k].second[q];
          }
          const double nr = n - nl;
          if (nl < static_cast<double>(min_leaf) || nr < static_cast<double>(min_leaf)) continue;
          std::vector<double> right(num_classes_);
          for (std::size_t q = 0; q < num_classes_; ++q) right[q] = total[q] - left[q];
          const double score = (nl * gini(left, nl) + nr * gini(right, nr)) / n;
          auto sorted = cats;
          std::sort(sorted.begin(), sorted.end());
          consider(score, c, 0.0, std::move(sorted));
        }
      }
    }
    return best;
  }

  const Table& rows_;
  std::vector<std::size_t> classes_;
  std::size_t num_classes_;
  std::vector<std::string> class_names_;
  const SurrogateOptions& options_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

SurrogateTree fit_cart(const Table& rows, std::span<const std::string> labels,
                       const SurrogateOptions& options, std::uint64_t seed) {
  if (rows.rows.empty()) fail(ErrorCode::kInvalidArgument, "surrogate needs at least one row");
  if (labels.size() != rows.rows.size()) {
    fail(ErrorCode::kInvalidArgument, "surrogate: labels and rows differ in length");
  }
  std::vector<std::string> names(labels.begin(), labels.end());
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::vector<std::size_t> classes;
  classes.reserve(labels.size());
  for (const auto& l : labels) {
    classes.push_back(static_cast<std::size_t>(std::lower_bound(names.begin(), names.end(), l) - names.begin()));
  }

  std::vector<std::size_t> order(rows.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  seeded_shuffle(order, rng);
  std::size_t n_train = static_cast<std::size_t>(
      std::llround(options.train_fraction * static_cast<double>(order.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, order.size());
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> holdout(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  if (holdout.empty()) holdout = train;

  CartBuilder builder(rows, classes, names.size(), names, options);
  SurrogateTree partial(rows.schema, builder.build(train), 1.0);

  std::size_t agree = 0;
  for (std::size_t i : holdout) {
    if (partial.predict(rows.rows[i]) == labels[i]) ++agree;
  }
  const double fidelity = static_cast<double>(agree) / static_cast<double>(holdout.size());
  return SurrogateTree(rows.schema, partial.nodes(), fidelity);
}

SurrogateTree fit_surrogate(const Table& rows, const gateway::PredictorHandle& predictor,
                            const SurrogateOptions& options, std::uint64_t seed) {
  std::vector<gateway::Sample> samples;
  samples.reserve(rows.rows.size());
  for (const auto& r : rows.rows) samples.push_back(row_to_sample(rows.schema, r));
  const auto outcomes = predictor.predict_batch(samples);

  Table labelled{rows.schema, {}};
  std::vector<std::string> labels;
  std::size_t errors = 0;
  std::string first_error;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].ok()) {
      if (errors++ == 0) first_error = outcomes[i].error;
      continue;
    }
    labelled.rows.push_back(rows.rows[i]);
    labels.push_back(outcomes[i].prediction->label);
  }
  if (static_cast<double>(errors) > options.max_error_fraction * static_cast<double>(rows.rows.size()) ||
      labelled.rows.empty()) {
    fail(ErrorCode::kFailedPrecondition,
         "surrogate aborted: predictor failed on " + std::to_string(errors) + " of " +
             std::to_string(rows.rows.size()) + " rows",
         first_error);
  }
  return fit_cart(labelled, labels, options, seed);
}

void to_json(Json& j, const SurrogateTree& tree) {
  Json nodes = Json::array();
  for (const auto& n : tree.nodes()) {
    Json jn{{"leaf", n.leaf}, {"label", n.label}, {"support", n.support}};
    if (!n.leaf) {
      jn["column"] = tree.schema().columns[n.column].name;
      if (tree.schema().columns[n.column].is_numeric()) {
        jn["threshold"] = n.threshold;
      } else {
        jn["left_categories"] = n.left_categories;
      }
      jn["left"] = n.left;
      jn["right"] = n.right;
    }
    nodes.push_back(std::move(jn));
  }
  j = Json{{"schema", tree.schema()}, {"fidelity", tree.fidelity()}, {"nodes", nodes}};
}

void from_json(const Json& j, SurrogateTree& tree) {
  const auto schema = j.at("schema").get<TableSchema>();
  std::vector<TreeNode> nodes;
  for (const auto& jn : j.at("nodes")) {
    TreeNode n;
    n.leaf = jn.at("leaf").get<bool>();
    n.label = jn.at("label").get<std::string>();
    n.support = jn.at("support").get<std::size_t>();
    if (!n.leaf) {
      n.column = schema.require_index(jn.at("column").get<std::string>());
      n.threshold = jn.value("threshold", 0.0);
      n.left_categories = jn.value("left_categories", std::vector<std::string>{});
      n.left = jn.at("left").get<int>();
      n.right = jn.at("right").get<int>();
    }
    nodes.push_back(std::move(n));
  }
  tree = SurrogateTree(schema, std::move(nodes), j.at("fidelity").get<double>());
}

}  // namespace modelprobe::synth
