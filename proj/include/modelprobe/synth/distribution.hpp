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
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "modelprobe/common/json.hpp"
#include "modelprobe/common/random.hpp"
#include "modelprobe/synth/table.hpp"

namespace modelprobe::synth {

// Numeric bin [lo, hi); the last bin of a column is closed. lo == hi marks a
// point mass.
struct NumericBin {
  double lo = 0.0;
  double hi = 0.0;
};

// Distribution of one column over its discrete states: categories for
// categorical columns, equal-frequency bins for numeric ones.
struct ColumnMarginal {
  ColumnKind kind = ColumnKind::kCategorical;
  std::vector<std::string> categories;
  std::vector<NumericBin> bins;
  std::vector<double> probabilities;

  std::size_t state_count() const noexcept { return probabilities.size(); }
  // State index of a value. Numeric values outside the bin range map to the
  // nearest end bin; unknown categories map to nullopt.
  std::optional<std::size_t> state_of(const Cell& value) const;
};

// Oriented dependency-tree edge with the raw joint counts it was fitted on
// (parent state x child state).
struct DependencyEdge {
  std::string parent;
  std::string child;
  double mutual_information = 0.0;  // nats
  std::vector<std::vector<double>> joint_counts;
};

struct JointDistributionModel {
  TableSchema schema;
  std::vector<ColumnMarginal> marginals;  // aligned with schema.columns
  std::vector<DependencyEdge> edges;      // spanning tree (forest after UDC)
  std::string root;
  std::vector<std::string> detached;      // UDC-overridden columns
  double smoothing = 1.0;                 // Laplace alpha for CPTs
  // Pairwise empirical MI between discretized columns, schema order.
  std::vector<std::vector<double>> pairwise_mi;

  const ColumnMarginal& marginal(std::string_view column) const;
  bool is_detached(std::string_view column) const;
  // Smoothed conditional P(child state | parent state) for an edge.
  std::vector<double> conditional(const DependencyEdge& edge, std::size_t parent_state) const;
  // Columns in ancestral order (every parent before its children).
  std::vector<std::size_t> sampling_order() const;
};

struct FitOptions {
  std::size_t bins = 10;
  double smoothing = 1.0;
};

// Empirical marginals, equal-frequency discretization, Chow-Liu maximum
// spanning tree over pairwise mutual information, Laplace-smoothed CPTs.
JointDistributionModel fit_distribution_model(const Table& training, FitOptions options = {});

// Equal-frequency bin edges over the given values (at most k bins, every
// bin non-empty).
std::vector<NumericBin> equal_frequency_bins(std::vector<double> values, std::size_t k);

// Mutual information in nats of a contingency table of counts.
double mutual_information(const std::vector<std::vector<double>>& counts);

// Discrete state of every row for one column.
std::vector<std::size_t> discretize(const ColumnMarginal& marginal, const Table& table,
                                    std::size_t column);

// --- user-defined constraints -------------------------------------------------

struct AttributeConstraint {
  std::optional<std::vector<std::pair<std::string, double>>> distribution;
  std::optional<std::pair<double, double>> range;
};

// {"attribute": {"distribution": {"F": 0.9, "M": 0.1}}} or
// {"attribute": {"range": [60, 80]}}.
struct UserDefinedConstraint {
  std::vector<std::pair<std::string, AttributeConstraint>> attributes;

  bool empty() const noexcept { return attributes.empty(); }
  static UserDefinedConstraint parse(const Json& document);
  Json to_json() const;
};

// Overrides targeted marginals (categorical replacement or numeric
// truncate-and-renormalize), detaches those columns from the dependency tree
// and leaves every other column untouched.
JointDistributionModel apply_udc(const JointDistributionModel& model,
                                 const UserDefinedConstraint& udc);

// --- sampling ----------------------------------------------------------------------

// Ancestral sampling; numeric values uniform within the sampled bin.
std::vector<Row> sample_joint(const JointDistributionModel& model, std::size_t n,
                              std::uint64_t seed);
Row sample_row(const JointDistributionModel& model, Rng& rng);

// Per-column restriction used for path-constrained sampling.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double x) const noexcept;
  bool empty() const noexcept;
};

struct ColumnRegion {
  Interval interval;                            // numeric columns
  std::optional<std::set<std::string>> allowed;  // categorical "in"
  std::set<std::string> excluded;               // categorical "not in"

  bool admits(const std::string& category) const;
};

using Region = std::vector<ColumnRegion>;  // aligned with schema.columns

Region unconstrained_region(const TableSchema& schema);
bool region_contains(const TableSchema& schema, const Region& region, const Row& row);

// True if the model puts positive probability on the region for every
// column (CPT rows are smoothed, so only marginal-sampled columns can
// rule a state out).
bool region_satisfiable(const JointDistributionModel& model, const Region& region);

// Ancestral sampling with each column's distribution restricted to the
// region and renormalized; numeric draws fall inside bin ∩ interval.
// nullopt when the region has zero mass under the model.
std::optional<Row> sample_constrained(const JointDistributionModel& model, const Region& region,
                                      Rng& rng);

void to_json(Json& j, const JointDistributionModel& model);
void from_json(const Json& j, JointDistributionModel& model);

}  // namespace modelprobe::synth
