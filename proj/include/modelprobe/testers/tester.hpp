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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modelprobe/common/json.hpp"
#include "modelprobe/datamodel/entities.hpp"
#include "modelprobe/gateway/gateway.hpp"

namespace modelprobe::testers {

// Everything a tester may read. There is no model spec here: testers reach
// the model only through the PredictorHandle.
struct TesterInput {
  PropertyDefinition property;
  Json parameters = Json::object();     // bound, defaults filled in
  Json data_specific = Json::object();  // shared inputs of the configuration
  std::size_t generation_limit = 100;
  std::uint64_t seed = 0;
  std::string training;
  DataFormat training_format = DataFormat::kCsvTable;
  std::optional<std::string> labeled;  // labeled-eval content, if attached
  DataFormat labeled_format = DataFormat::kCsvTable;
};

struct Generation {
  std::vector<TestCase> cases;
  std::size_t source_samples = 0;
  std::vector<std::string> warnings;
  // Metrics known at generation time (e.g. path_coverage).
  std::map<std::string, double> metrics;
  // State the summary step needs later; persisted on the run.
  Json artifacts = Json::object();
};

struct Summary {
  std::map<std::string, double> metrics;
  std::string explanation;
  Json grid = Json::object();
};

// A property implementation: generate cases, judge one case from its
// predictions, summarize stored cases and results into run metrics. judge
// and summarize are pure, so stored cases can be re-judged later.
class Tester {
 public:
  virtual ~Tester() = default;

  virtual Generation generate(const TesterInput& input, const gateway::PredictorHandle& predictor) const = 0;

  virtual TestResult judge(const TestCase& test_case, std::span<const gateway::PredictionOutcome> outcomes,
                           const TesterInput& input) const = 0;

  virtual Summary summarize(std::span<const TestCase> cases, std::span<const TestResult> results,
                            const TesterInput& input, const Json& artifacts) const = 0;
};

// Registry keyed by PropertyDefinition::tester. Built-ins are registered on
// first use; plug-ins may add more at any time.
void register_tester(const std::string& name, std::shared_ptr<const Tester> tester);
std::shared_ptr<const Tester> find_tester(std::string_view name);
std::vector<std::string> tester_names();

// Fills in "status:*" metrics, checks every declared metric is present and
// applies the verdict rules. Missing tester metrics become nan.
std::vector<RunMetric> finalize_metrics(const PropertyDefinition& def, const std::map<std::string, double>& values,
                                        const StatusSnapshot& status, const Json& parameters);

// "error" when nothing could be judged, "fail" when a rule metric fails or
// (without rule metrics) any case failed, "pass" otherwise.
std::string run_verdict(const std::vector<RunMetric>& metrics, const StatusSnapshot& status);

struct LocalRun {
  Generation generation;
  std::vector<TestResult> results;
  Summary summary;
  StatusSnapshot status;
  std::vector<RunMetric> metrics;
  std::string verdict;
};

// Generate, predict, judge and summarize in memory. The verdict is
// "skipped" when generation set artifacts["skipped"]. Case ids are assigned
// sequentially ("case-0", ...).
LocalRun run_locally(const Tester& tester, const TesterInput& input, const gateway::PredictorHandle& predictor);

// Predicts every sample of the given cases in one gateway call, reusing
// outcomes for identical samples. Result i holds the outcomes of case i.
std::vector<std::vector<gateway::PredictionOutcome>> predict_cases(std::span<const TestCase> cases,
                                                                  const gateway::PredictorHandle& predictor);

StatusSnapshot count_status(std::size_t generated, std::span<const TestResult> results);

// Row-normalized grid over (row key, column key) counts; intensities in [0, 1].
Json count_grid(const std::vector<std::pair<std::string, std::string>>& pairs, std::string row_title,
                std::string column_title);

}  // namespace modelprobe::testers
