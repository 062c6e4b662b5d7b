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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modelprobe/common/json.hpp"
#include "modelprobe/gateway/gateway.hpp"

namespace modelprobe {

enum class DataKind { kTraining, kLabeledEval, kResultVisualization };
enum class DataFormat { kCsvTable, kTextLines, kTimeseriesCsv };
enum class Modality { kTabular, kText, kTimeseries };
enum class CollectionState { kPending, kRunning, kCompleted, kCancelled, kErrored };
enum class Verdict { kPass, kFail, kError };
enum class MetricVerdict { kPass, kFail, kInformational };

std::string_view to_string(DataKind v);
std::string_view to_string(DataFormat v);
std::string_view to_string(Modality v);
std::string_view to_string(CollectionState v);
std::string_view to_string(Verdict v);
std::string_view to_string(MetricVerdict v);

// Parsers throw Error(kInvalidArgument) on unknown names.
DataKind parse_data_kind(std::string_view s);
DataFormat parse_data_format(std::string_view s);
Modality parse_modality(std::string_view s);
CollectionState parse_collection_state(std::string_view s);
Verdict parse_verdict(std::string_view s);
MetricVerdict parse_metric_verdict(std::string_view s);

bool is_terminal(CollectionState s) noexcept;

struct Project {
  std::string id;
  std::string name;
  std::vector<std::string> test_subjects;
  std::int64_t created_at = 0;
};

struct DataRef {
  std::string id;
  DataKind kind = DataKind::kTraining;
  DataFormat format = DataFormat::kCsvTable;
  std::string location;  // relative to the store root
  std::size_t row_count = 0;
};

struct TestSubject {
  std::string id;
  std::string project_id;
  std::string model_id;
  std::vector<DataRef> data_refs;
  Json data_properties = Json::object();  // "columns", "modality", ...

  const DataRef* find_data(DataKind kind) const;
};

// How a run-level metric maps to a verdict. Thresholds come from a run
// parameter so the mapping stays data, not code.
struct VerdictRule {
  enum class Kind { kInformational, kRange, kMax, kMin };
  Kind kind = Kind::kInformational;
  std::string parameter;  // kRange: [lo, hi]; kMax/kMin: number
};

struct MetricDef {
  std::string name;
  std::string description;
  VerdictRule rule;
  // "higher" or "lower" is better; empty when neither.
  std::string better;
  // Where the value comes from: "tester" or a generic status-derived
  // quantity ("status:fail_rate", "status:pass_rate", "status:error_rate",
  // "status:executed"). Status sources need no tester support.
  std::string source = "tester";
};

struct ParameterDef {
  std::string name;
  // "number", "integer", "string", "boolean", "range", "string_list", "json"
  std::string type = "number";
  Json default_value;  // null when there is no default
  bool mandatory = false;
  std::optional<double> min;
  std::optional<double> max;
  bool min_exclusive = false;
  std::vector<std::string> choices;  // for strings, when restricted
  std::string help;
};

struct PropertyDefinition {
  std::string id;
  std::string title;
  Modality modality = Modality::kTabular;
  std::string description;
  std::vector<MetricDef> metric_defs;
  std::vector<ParameterDef> parameter_defs;
  // Keys of RunConfiguration.data_specific this property needs.
  std::vector<std::string> required_inputs;
  // Columns a failing test case exposes to the failure view.
  std::vector<std::string> result_schema;
  // Recommendation text keyed by run outcome ("pass", "fail", "error").
  Json recommendations = Json::object();
  // Name of the tester implementation that serves this property.
  std::string tester;

  const MetricDef* find_metric(std::string_view name) const;
  const ParameterDef* find_parameter(std::string_view name) const;
};

struct RunConfiguration {
  std::string id;
  std::string test_subject_id;
  std::vector<std::string> selected_properties;
  Json parameter_values = Json::object();  // property -> {parameter -> value}
  Json data_specific = Json::object();
  std::size_t generation_limit = 100;
  std::uint64_t seed = 0;
};

struct StatusSnapshot {
  std::size_t generated = 0;
  std::size_t executed = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t errored = 0;

  bool consistent() const noexcept {
    return executed == passed + failed + errored && executed <= generated;
  }
  friend bool operator==(const StatusSnapshot&, const StatusSnapshot&) = default;
};

struct RunMetric {
  std::string name;
  double value = 0.0;  // may be +inf or nan
  MetricVerdict verdict = MetricVerdict::kInformational;
  std::string recommendation;
};

struct Run {
  std::string id;
  std::string run_collection_id;
  std::string property_id;
  CollectionState state = CollectionState::kPending;
  StatusSnapshot status;
  std::vector<RunMetric> metrics;
  std::string verdict;  // "pass", "fail", "error" or empty while running
  std::string recommendation;
  std::string explanation;
  std::string error;
  std::vector<std::string> warnings;
  Json grid = Json::object();       // {"rows": [...], "columns": [...], "values": [[...]]}
  Json artifacts = Json::object();  // tester state needed to re-evaluate
  std::int64_t started_at = 0;
  std::int64_t finished_at = 0;

  const RunMetric* find_metric(std::string_view name) const;
};

struct RunCollection {
  std::string id;
  std::string project_id;
  std::string run_configuration_id;
  std::vector<std::string> runs;
  CollectionState state = CollectionState::kPending;
  std::int64_t started_at = 0;
  std::optional<std::int64_t> finished_at;
  std::string idempotency_key;
  std::string error;
};

struct TestCase {
  std::string id;
  std::string run_id;
  std::vector<gateway::Sample> samples;
  Json reference = Json::object();
  std::vector<std::string> role_tags;
};

struct TestResult {
  std::string test_case_id;
  std::string run_id;
  std::vector<std::optional<gateway::Prediction>> predictions;
  Verdict verdict = Verdict::kError;
  std::string detail;
  Json evaluation = Json::object();  // tester-specific numbers, e.g. delta_r

  friend bool operator==(const TestResult&, const TestResult&) = default;
};

// Non-finite metric values are written as "+inf", "-inf" or "nan".
Json metric_value_to_json(double v);
double metric_value_from_json(const Json& j);

void to_json(Json& j, const Project& v);
void from_json(const Json& j, Project& v);
void to_json(Json& j, const DataRef& v);
void from_json(const Json& j, DataRef& v);
void to_json(Json& j, const TestSubject& v);
void from_json(const Json& j, TestSubject& v);
void to_json(Json& j, const VerdictRule& v);
void from_json(const Json& j, VerdictRule& v);
void to_json(Json& j, const MetricDef& v);
void from_json(const Json& j, MetricDef& v);
void to_json(Json& j, const ParameterDef& v);
void from_json(const Json& j, ParameterDef& v);
void to_json(Json& j, const PropertyDefinition& v);
void from_json(const Json& j, PropertyDefinition& v);
void to_json(Json& j, const RunConfiguration& v);
void from_json(const Json& j, RunConfiguration& v);
void to_json(Json& j, const StatusSnapshot& v);
void from_json(const Json& j, StatusSnapshot& v);
void to_json(Json& j, const RunMetric& v);
void from_json(const Json& j, RunMetric& v);
void to_json(Json& j, const Run& v);
void from_json(const Json& j, Run& v);
void to_json(Json& j, const RunCollection& v);
void from_json(const Json& j, RunCollection& v);
void to_json(Json& j, const TestCase& v);
void from_json(const Json& j, TestCase& v);
void to_json(Json& j, const TestResult& v);
void from_json(const Json& j, TestResult& v);

}  // namespace modelprobe
