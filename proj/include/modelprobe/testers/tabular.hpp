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

#include "modelprobe/common/random.hpp"
#include "modelprobe/synth/table.hpp"
#include "modelprobe/testers/tester.hpp"

namespace modelprobe::testers {

// Macro-averaged over the union of gold and predicted labels. A label never
// predicted has precision 0; one never in gold has recall 0.
struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  std::vector<std::string> labels;
};

ClassificationMetrics classification_metrics(std::span<const std::string> gold,
                                             std::span<const std::string> predicted);

struct GroupMetrics {
  std::size_t minority_size = 0;
  std::size_t majority_size = 0;
  std::size_t minority_favorable = 0;
  std::size_t majority_favorable = 0;
  double minority_rate = 0.0;
  double majority_rate = 0.0;
  // +inf when only the majority rate is zero; nan when undefined.
  double disparate_impact = 0.0;
  double demographic_parity = 0.0;
  bool defined = false;  // both groups non-empty and not both rates zero
};

GroupMetrics group_metrics(const std::vector<bool>& minority, const std::vector<bool>& favorable);

struct ProtectedPair {
  std::size_t source = 0;  // index of the original row
  std::string attribute;
  synth::Row original;
  synth::Row transformed;
};

// For each row, each protected attribute and each other category of that
// attribute: the row with only that attribute changed.
std::vector<ProtectedPair> individual_pairs(const synth::TableSchema& schema, std::span<const synth::Row> rows,
                                            const std::vector<std::string>& protected_attributes);

// Numeric columns moved by U[-eps * range, +eps * range] and clamped to the
// column domain; categorical columns unchanged.
std::vector<synth::Row> robustness_neighbors(const synth::TableSchema& schema, const synth::Row& row,
                                             double epsilon, std::size_t count, Rng& rng);

// Seed of the neighbor generator for source row `index`.
inline std::uint64_t neighbor_seed(std::uint64_t run_seed, std::size_t index) {
  return derive_seed(run_seed, 0x6e00 + index);
}

struct SourceRows {
  synth::TableSchema schema;
  std::vector<synth::Row> rows;
  bool synthetic = false;
  double path_coverage = 0.0;  // nan unless rows are path-guided synthetic
  std::vector<std::string> warnings;
  Json artifacts = Json::object();
};

// Schema options shared by the tabular testers: protected attributes are
// categorical, data_specific "label_column" (and `extra_exclude`) are not
// sent to the model.
synth::SchemaOptions tabular_schema_options(const TesterInput& input, const std::string& extra_exclude = "");

// At most generation_limit rows: training rows (seeded subset, file order)
// or synthetic rows from the fitted distribution model, spread over the
// surrogate tree's paths when path_guided is set.
SourceRows tabular_source_rows(const TesterInput& input, const gateway::PredictorHandle& predictor);

std::shared_ptr<const Tester> make_correctness_tester();
std::shared_ptr<const Tester> make_group_discrimination_tester();
std::shared_ptr<const Tester> make_individual_discrimination_tester();
std::shared_ptr<const Tester> make_robustness_tester();

}  // namespace modelprobe::testers
