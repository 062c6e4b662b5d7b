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

#include "modelprobe/datamodel/entities.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "modelprobe/common/error.hpp"

namespace modelprobe {
namespace {

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E v) {
  for (const auto& [e, n] : table) {
    if (e == v) return n;
  }
  return "unknown";
}

template <typename E, std::size_t N>
E parse_name(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s,
             std::string_view what) {
  for (const auto& [e, n] : table) {
    if (n == s) return e;
  }
  fail(ErrorCode::kInvalidArgument, "unknown " + std::string(what) + ": '" + std::string(s) + "'");
}

constexpr std::array<std::pair<DataKind, std::string_view>, 3> kDataKinds{{
    {DataKind::kTraining, "training"},
    {DataKind::kLabeledEval, "labeled-eval"},
    {DataKind::kResultVisualization, "result-visualization"},
}};
constexpr std::array<std::pair<DataFormat, std::string_view>, 3> kDataFormats{{
    {DataFormat::kCsvTable, "csv-table"},
    {DataFormat::kTextLines, "text-lines"},
    {DataFormat::kTimeseriesCsv, "timeseries-csv"},
}};
constexpr std::array<std::pair<Modality, std::string_view>, 3> kModalities{{
    {Modality::kTabular, "tabular"},
    {Modality::kText, "text"},
    {Modality::kTimeseries, "timeseries"},
}};
constexpr std::array<std::pair<CollectionState, std::string_view>, 5> kStates{{
    {CollectionState::kPending, "pending"},
    {CollectionState::kRunning, "running"},
    {CollectionState::kCompleted, "completed"},
    {CollectionState::kCancelled, "cancelled"},
    {CollectionState::kErrored, "errored"},
}};
constexpr std::array<std::pair<Verdict, std::string_view>, 3> kVerdicts{{
    {Verdict::kPass, "pass"},
    {Verdict::kFail, "fail"},
    {Verdict::kError, "error"},
}};
constexpr std::array<std::pair<MetricVerdict, std::string_view>, 3> kMetricVerdicts{{
    {MetricVerdict::kPass, "pass"},
    {MetricVerdict::kFail, "fail"},
    {MetricVerdict::kInformational, "informational"},
}};
constexpr std::array<std::pair<VerdictRule::Kind, std::string_view>, 4> kRuleKinds{{
    {VerdictRule::Kind::kInformational, "informational"},
    {VerdictRule::Kind::kRange, "range"},
    {VerdictRule::Kind::kMax, "max"},
    {VerdictRule::Kind::kMin, "min"},
}};

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

Json json_or(const Json& j, const char* key, Json fallback) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : *it;
}

}  // namespace

std::string_view to_string(DataKind v) { return name_of(kDataKinds, v); }
std::string_view to_string(DataFormat v) { return name_of(kDataFormats, v); }
std::string_view to_string(Modality v) { return name_of(kModalities, v); }
std::string_view to_string(CollectionState v) { return name_of(kStates, v); }
std::string_view to_string(Verdict v) { return name_of(kVerdicts, v); }
std::string_view to_string(MetricVerdict v) { return name_of(kMetricVerdicts, v); }

DataKind parse_data_kind(std::string_view s) { return parse_name(kDataKinds, s, "data kind"); }
DataFormat parse_data_format(std::string_view s) { return parse_name(kDataFormats, s, "data format"); }
Modality parse_modality(std::string_view s) { return parse_name(kModalities, s, "modality"); }
CollectionState parse_collection_state(std::string_view s) { return parse_name(kStates, s, "state"); }
Verdict parse_verdict(std::string_view s) { return parse_name(kVerdicts, s, "verdict"); }
MetricVerdict parse_metric_verdict(std::string_view s) {
  return parse_name(kMetricVerdicts, s, "metric verdict");
}

bool is_terminal(CollectionState s) noexcept {
  return s == CollectionState::kCompleted || s == CollectionState::kCancelled ||
         s == CollectionState::kErrored;
}

const DataRef* TestSubject::find_data(DataKind kind) const {
  for (const auto& d : data_refs) {
    if (d.kind == kind) return &d;
  }
  return nullptr;
}

const MetricDef* PropertyDefinition::find_metric(std::string_view name) const {
  for (const auto& m : metric_defs) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

const ParameterDef* PropertyDefinition::find_parameter(std::string_view name) const {
  for (const auto& p : parameter_defs) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const RunMetric* Run::find_metric(std::string_view name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

Json metric_value_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

double metric_value_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+inf" || s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  fail(ErrorCode::kInvalidArgument, "bad metric value: " + j.dump());
}

// --- serialization ------------------------------------------------------------------

void to_json(Json& j, const Project& v) {
  j = Json{{"id", v.id}, {"name", v.name}, {"test_subjects", v.test_subjects}, {"created_at", v.created_at}};
}
void from_json(const Json& j, Project& v) {
  v.id = j.at("id").get<std::string>();
  v.name = j.at("name").get<std::string>();
  v.test_subjects = get_or(j, "test_subjects", std::vector<std::string>{});
  v.created_at = get_or<std::int64_t>(j, "created_at", 0);
}

void to_json(Json& j, const DataRef& v) {
  j = Json{{"id", v.id},
           {"kind", to_string(v.kind)},
           {"format", to_string(v.format)},
           {"location", v.location},
           {"row_count", v.row_count}};
}
void from_json(const Json& j, DataRef& v) {
  v.id = get_or<std::string>(j, "id", "");
  v.kind = parse_data_kind(get_or<std::string>(j, "kind", "training"));
  v.format = parse_data_format(get_or<std::string>(j, "format", "csv-table"));
  v.location = get_or<std::string>(j, "location", "");
  v.row_count = get_or<std::size_t>(j, "row_count", 0);
}

void to_json(Json& j, const TestSubject& v) {
  j = Json{{"id", v.id},
           {"project_id", v.project_id},
           {"model_id", v.model_id},
           {"data_refs", v.data_refs},
           {"data_properties", v.data_properties}};
}
void from_json(const Json& j, TestSubject& v) {
  v.id = j.at("id").get<std::string>();
  v.project_id = j.at("project_id").get<std::string>();
  v.model_id = j.at("model_id").get<std::string>();
  v.data_refs = get_or(j, "data_refs", std::vector<DataRef>{});
  v.data_properties = json_or(j, "data_properties", Json::object());
}

void to_json(Json& j, const VerdictRule& v) {
  j = Json{{"kind", name_of(kRuleKinds, v.kind)}};
  if (!v.parameter.empty()) j["parameter"] = v.parameter;
}
void from_json(const Json& j, VerdictRule& v) {
  v.kind = parse_name(kRuleKinds, get_or<std::string>(j, "kind", "informational"), "verdict rule");
  v.parameter = get_or<std::string>(j, "parameter", "");
}

void to_json(Json& j, const MetricDef& v) {
  j = Json{{"name", v.name}, {"description", v.description}, {"verdict_rule", v.rule}};
  if (!v.better.empty()) j["better"] = v.better;
  j["source"] = v.source;
}
void from_json(const Json& j, MetricDef& v) {
  v.name = j.at("name").get<std::string>();
  v.description = get_or<std::string>(j, "description", "");
  v.rule = get_or(j, "verdict_rule", VerdictRule{});
  v.better = get_or<std::string>(j, "better", "");
  v.source = get_or<std::string>(j, "source", "tester");
}

void to_json(Json& j, const ParameterDef& v) {
  j = Json{{"name", v.name}, {"type", v.type}, {"default", v.default_value}, {"mandatory", v.mandatory}};
  if (v.min) j["min"] = *v.min;
  if (v.max) j["max"] = *v.max;
  if (v.min_exclusive) j["min_exclusive"] = true;
  if (!v.choices.empty()) j["choices"] = v.choices;
  if (!v.help.empty()) j["help"] = v.help;
}
void from_json(const Json& j, ParameterDef& v) {
  v.name = j.at("name").get<std::string>();
  v.type = get_or<std::string>(j, "type", "number");
  v.default_value = json_or(j, "default", Json());
  v.mandatory = get_or(j, "mandatory", false);
  v.min = j.contains("min") && !j.at("min").is_null() ? std::optional<double>(j.at("min").get<double>()) : std::nullopt;
  v.max = j.contains("max") && !j.at("max").is_null() ? std::optional<double>(j.at("max").get<double>()) : std::nullopt;
  v.min_exclusive = get_or(j, "min_exclusive", false);
  v.choices = get_or(j, "choices", std::vector<std::string>{});
  v.help = get_or<std::string>(j, "help", "");
}

void to_json(Json& j, const PropertyDefinition& v) {
  j = Json{{"id", v.id},
           {"title", v.title},
           {"modality", to_string(v.modality)},
           {"description", v.description},
           {"metric_defs", v.metric_defs},
           {"parameter_defs", v.parameter_defs},
           {"required_inputs", v.required_inputs},
           {"result_schema", v.result_schema},
           {"recommendations", v.recommendations},
           {"tester", v.tester}};
}
void from_json(const Json& j, PropertyDefinition& v) {
  v.id = j.at("id").get<std::string>();
  v.title = get_or<std::string>(j, "title", v.id);
  v.modality = parse_modality(j.at("modality").get<std::string>());
  v.description = get_or<std::string>(j, "description", "");
  v.metric_defs = get_or(j, "metric_defs", std::vector<MetricDef>{});
  v.parameter_defs = get_or(j, "parameter_defs", std::vector<ParameterDef>{});
  v.required_inputs = get_or(j, "required_inputs", std::vector<std::string>{});
  v.result_schema = get_or(j, "result_schema", std::vector<std::string>{});
  v.recommendations = json_or(j, "recommendations", Json::object());
  v.tester = get_or<std::string>(j, "tester", v.id);
}

void to_json(Json& j, const RunConfiguration& v) {
  j = Json{{"id", v.id},
           {"test_subject_id", v.test_subject_id},
           {"selected_properties", v.selected_properties},
           {"parameter_values", v.parameter_values},
           {"data_specific", v.data_specific},
           {"generation_limit", v.generation_limit},
           {"seed", v.seed}};
}
void from_json(const Json& j, RunConfiguration& v) {
  v.id = get_or<std::string>(j, "id", "");
  v.test_subject_id = get_or<std::string>(j, "test_subject_id", "");
  v.selected_properties = get_or(j, "selected_properties", std::vector<std::string>{});
  v.parameter_values = json_or(j, "parameter_values", Json::object());
  v.data_specific = json_or(j, "data_specific", Json::object());
  v.generation_limit = get_or<std::size_t>(j, "generation_limit", 100);
  v.seed = get_or<std::uint64_t>(j, "seed", 0);
}

void to_json(Json& j, const StatusSnapshot& v) {
  j = Json{{"generated", v.generated},
           {"executed", v.executed},
           {"passed", v.passed},
           {"failed", v.failed},
           {"errored", v.errored}};
}
void from_json(const Json& j, StatusSnapshot& v) {
  v.generated = get_or<std::size_t>(j, "generated", 0);
  v.executed = get_or<std::size_t>(j, "executed", 0);
  v.passed = get_or<std::size_t>(j, "passed", 0);
  v.failed = get_or<std::size_t>(j, "failed", 0);
  v.errored = get_or<std::size_t>(j, "errored", 0);
}

void to_json(Json& j, const RunMetric& v) {
  j = Json{{"name", v.name},
           {"value", metric_value_to_json(v.value)},
           {"verdict", to_string(v.verdict)},
           {"recommendation", v.recommendation}};
}
void from_json(const Json& j, RunMetric& v) {
  v.name = j.at("name").get<std::string>();
  v.value = metric_value_from_json(j.at("value"));
  v.verdict = parse_metric_verdict(get_or<std::string>(j, "verdict", "informational"));
  v.recommendation = get_or<std::string>(j, "recommendation", "");
}

void to_json(Json& j, const Run& v) {
  j = Json{{"id", v.id},
           {"run_collection_id", v.run_collection_id},
           {"property_id", v.property_id},
           {"state", to_string(v.state)},
           {"status", v.status},
           {"metrics", v.metrics},
           {"verdict", v.verdict},
           {"recommendation", v.recommendation},
           {"explanation", v.explanation},
           {"error", v.error},
           {"warnings", v.warnings},
           {"grid", v.grid},
           {"artifacts", v.artifacts},
           {"started_at", v.started_at},
           {"finished_at", v.finished_at}};
}
void from_json(const Json& j, Run& v) {
  v.id = j.at("id").get<std::string>();
  v.run_collection_id = get_or<std::string>(j, "run_collection_id", "");
  v.property_id = get_or<std::string>(j, "property_id", "");
  v.state = parse_collection_state(get_or<std::string>(j, "state", "pending"));
  v.status = get_or(j, "status", StatusSnapshot{});
  v.metrics = get_or(j, "metrics", std::vector<RunMetric>{});
  v.verdict = get_or<std::string>(j, "verdict", "");
  v.recommendation = get_or<std::string>(j, "recommendation", "");
  v.explanation = get_or<std::string>(j, "explanation", "");
  v.error = get_or<std::string>(j, "error", "");
  v.warnings = get_or(j, "warnings", std::vector<std::string>{});
  v.grid = json_or(j, "grid", Json::object());
  v.artifacts = json_or(j, "artifacts", Json::object());
  v.started_at = get_or<std::int64_t>(j, "started_at", 0);
  v.finished_at = get_or<std::int64_t>(j, "finished_at", 0);
}

void to_json(Json& j, const RunCollection& v) {
  j = Json{{"id", v.id},
           {"project_id", v.project_id},
           {"run_configuration_id", v.run_configuration_id},
           {"runs", v.runs},
           {"state", to_string(v.state)},
           {"started_at", v.started_at},
           {"finished_at", v.finished_at ? Json(*v.finished_at) : Json()},
           {"idempotency_key", v.idempotency_key},
           {"error", v.error}};
}
void from_json(const Json& j, RunCollection& v) {
  v.id = j.at("id").get<std::string>();
  v.project_id = get_or<std::string>(j, "project_id", "");
  v.run_configuration_id = get_or<std::string>(j, "run_configuration_id", "");
  v.runs = get_or(j, "runs", std::vector<std::string>{});
  v.state = parse_collection_state(get_or<std::string>(j, "state", "pending"));
  v.started_at = get_or<std::int64_t>(j, "started_at", 0);
  v.finished_at = j.contains("finished_at") && !j.at("finished_at").is_null()
                      ? std::optional<std::int64_t>(j.at("finished_at").get<std::int64_t>())
                      : std::nullopt;
  v.idempotency_key = get_or<std::string>(j, "idempotency_key", "");
  v.error = get_or<std::string>(j, "error", "");
}

void to_json(Json& j, const TestCase& v) {
  j = Json{{"id", v.id},
           {"run_id", v.run_id},
           {"samples", v.samples},
           {"reference", v.reference},
           {"role_tags", v.role_tags}};
}
void from_json(const Json& j, TestCase& v) {
  v.id = j.at("id").get<std::string>();
  v.run_id = get_or<std::string>(j, "run_id", "");
  v.samples = j.at("samples").get<std::vector<Json>>();
  v.reference = json_or(j, "reference", Json::object());
  v.role_tags = get_or(j, "role_tags", std::vector<std::string>{});
}

void to_json(Json& j, const TestResult& v) {
  Json preds = Json::array();
  for (const auto& p : v.predictions) preds.push_back(p ? Json(*p) : Json());
  j = Json{{"test_case_id", v.test_case_id},
           {"run_id", v.run_id},
           {"predictions", preds},
           {"verdict", to_string(v.verdict)},
           {"detail", v.detail},
           {"evaluation", v.evaluation}};
}
void from_json(const Json& j, TestResult& v) {
  v.test_case_id = j.at("test_case_id").get<std::string>();
  v.run_id = get_or<std::string>(j, "run_id", "");
  v.predictions.clear();
  for (const auto& p : j.at("predictions")) {
    v.predictions.push_back(p.is_null() ? std::nullopt : std::optional<gateway::Prediction>(p.get<gateway::Prediction>()));
  }
  v.verdict = parse_verdict(j.at("verdict").get<std::string>());
  v.detail = get_or<std::string>(j, "detail", "");
  v.evaluation = json_or(j, "evaluation", Json::object());
}

}  // namespace modelprobe
