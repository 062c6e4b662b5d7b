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

#include "modelprobe/datamodel/operations.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "modelprobe/common/csv.hpp"
#include "modelprobe/common/error.hpp"
#include "modelprobe/datamodel/catalog.hpp"
#include "modelprobe/synth/distribution.hpp"

namespace modelprobe {
namespace {

std::vector<std::string> text_lines(std::string_view content) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string line(content.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

const PropertyDefinition& property_or_throw(const std::vector<PropertyDefinition>& defs,
                                            const std::string& id) {
  for (const auto& d : defs) {
    if (d.id == id) return d;
  }
  fail(ErrorCode::kInvalidArgument, "unknown property '" + id + "'");
}

}  // namespace

std::string register_property_definition(Store& store, const PropertyDefinition& def) {
  validate_property_definition(def);
  if (store.find_property(def.id)) {
    fail(ErrorCode::kConflict, "property '" + def.id + "' exists");
  }
  store.put_property(def);
  return def.id;
}

std::vector<std::string> ensure_builtin_catalog(Store& store) {
  std::vector<std::string> added;
  for (const auto& def : builtin_properties()) {
    if (store.find_property(def.id)) continue;
    added.push_back(register_property_definition(store, def));
  }
  return added;
}

DataSummary summarize_data(DataFormat format, std::string_view content) {
  DataSummary s;
  switch (format) {
    case DataFormat::kCsvTable: {
      const CsvTable csv = parse_csv(content);
      for (const auto& h : csv.header) s.columns.push_back(h);
      s.rows = csv.rows.size();
      s.modality = Modality::kTabular;
      break;
    }
    case DataFormat::kTextLines:
      s.rows = text_lines(content).size();
      s.columns = Json::array({"text"});
      s.modality = Modality::kText;
      break;
    case DataFormat::kTimeseriesCsv: {
      const CsvTable csv = parse_csv(content);
      if (!csv.column_index("timestamp") || !csv.column_index("value")) {
        fail(ErrorCode::kInvalidArgument, "time-series data needs 'timestamp' and 'value' columns");
      }
      const std::size_t vi = *csv.column_index("value");
      for (const auto& row : csv.rows) {
        if (!parse_number(row[vi])) {
          fail(ErrorCode::kInvalidArgument, "non-numeric series value '" + row[vi] + "'");
        }
      }
      for (const auto& h : csv.header) s.columns.push_back(h);
      s.rows = csv.rows.size();
      s.modality = Modality::kTimeseries;
      break;
    }
  }
  if (s.rows == 0) fail(ErrorCode::kInvalidArgument, "empty training data");
  return s;
}

std::string register_test_subject(Store& store, const std::string& project_id,
                                  gateway::ModelSpec model, DataFormat format,
                                  std::string_view training_content) {
  if (!store.find_project(project_id)) fail(ErrorCode::kNotFound, "unknown project " + project_id);
  model.validate();
  for (const auto& existing : store.list_models(project_id)) {
    if (existing.name == model.name) {
      fail(ErrorCode::kConflict, "duplicate model name '" + model.name + "' in project");
    }
  }
  const DataSummary summary = summarize_data(format, training_content);

  model.id.clear();
  const auto stored_model = store.put_model(project_id, std::move(model));
  DataRef ref;
  ref.kind = DataKind::kTraining;
  ref.format = format;
  ref = store.put_data(project_id, ref, training_content, summary.rows);

  TestSubject subject;
  subject.project_id = project_id;
  subject.model_id = stored_model.id;
  subject.data_refs.push_back(ref);
  subject.data_properties["columns"] = summary.columns;
  subject.data_properties["modality"] = std::string(to_string(summary.modality));
  return store.put_subject(std::move(subject)).id;
}

DataRef attach_data(Store& store, const std::string& subject_id, DataKind kind, DataFormat format,
                    std::string_view content) {
  TestSubject subject = store.get_subject(subject_id);
  const DataSummary summary = summarize_data(format, content);
  DataRef ref;
  ref.kind = kind;
  ref.format = format;
  ref = store.put_data(subject.project_id, ref, content, summary.rows);
  subject.data_refs.push_back(ref);
  store.put_subject(std::move(subject));
  return ref;
}

RunConfiguration create_run_configuration(Store& store, RunConfiguration config) {
  const TestSubject subject = store.get_subject(config.test_subject_id);
  if (!subject.find_data(DataKind::kTraining)) {
    fail(ErrorCode::kFailedPrecondition, "test subject has no training data");
  }
  if (config.selected_properties.empty()) {
    fail(ErrorCode::kInvalidArgument, "select at least one property");
  }
  if (config.generation_limit < 1) fail(ErrorCode::kInvalidArgument, "generation_limit must be >= 1");
  if (!config.parameter_values.is_object()) config.parameter_values = Json::object();
  if (!config.data_specific.is_object()) config.data_specific = Json::object();

  const auto defs = store.list_properties();
  const Modality modality =
      parse_modality(subject.data_properties.value("modality", std::string("tabular")));
  std::set<std::string> seen;
  for (const auto& id : config.selected_properties) {
    if (!seen.insert(id).second) fail(ErrorCode::kInvalidArgument, "property '" + id + "' selected twice");
    const auto& def = property_or_throw(defs, id);
    if (def.modality != modality) {
      fail(ErrorCode::kInvalidArgument, "property '" + id + "' is for " + std::string(to_string(def.modality)) +
                                            " models, subject is " + std::string(to_string(modality)));
    }
    const Json values = config.parameter_values.contains(id) ? config.parameter_values.at(id) : Json();
    bind_parameters(def, values);
    for (const auto& input : def.required_inputs) {
      if (!config.data_specific.contains(input) || config.data_specific.at(input).is_null()) {
        fail(ErrorCode::kInvalidArgument, "property '" + id + "' needs input '" + input + "'");
      }
    }
  }
  for (const auto& [id, _] : config.parameter_values.items()) {
    if (!seen.contains(id)) fail(ErrorCode::kInvalidArgument, "parameters given for unselected property '" + id + "'");
  }
  if (config.data_specific.contains("udc") && !config.data_specific.at("udc").is_null()) {
    synth::UserDefinedConstraint::parse(config.data_specific.at("udc"));
  }
  config.id.clear();
  return store.put_config(std::move(config));
}

StatusSnapshot compute_status_snapshot(const Store& store, std::string_view run_id) {
  if (!store.find_run(run_id)) fail(ErrorCode::kNotFound, "unknown run " + std::string(run_id));
  return store.status(run_id);
}

Json compare_collections(const Store& store, const std::vector<std::string>& collection_ids) {
  if (collection_ids.empty()) fail(ErrorCode::kInvalidArgument, "name at least one collection");
  std::vector<RunCollection> collections;
  for (const auto& id : collection_ids) collections.push_back(store.get_collection(id));
  for (const auto& c : collections) {
    if (c.project_id != collections.front().project_id) {
      fail(ErrorCode::kInvalidArgument, "collections span projects");
    }
  }
  std::stable_sort(collections.begin(), collections.end(), [](const auto& a, const auto& b) {
    return a.started_at != b.started_at ? a.started_at < b.started_at : a.id < b.id;
  });

  // property -> run, per collection
  std::vector<std::vector<Run>> runs(collections.size());
  std::vector<std::string> property_order;
  for (std::size_t i = 0; i < collections.size(); ++i) {
    for (const auto& run_id : collections[i].runs) {
      Run run = store.get_run(run_id);
      if (std::find(property_order.begin(), property_order.end(), run.property_id) == property_order.end()) {
        property_order.push_back(run.property_id);
      }
      runs[i].push_back(std::move(run));
    }
  }
  auto run_for = [&](std::size_t i, const std::string& property) -> const Run* {
    for (const auto& r : runs[i]) {
      if (r.property_id == property) return &r;
    }
    return nullptr;
  };

  Json report;
  report["project_id"] = collections.front().project_id;
  Json cols = Json::array();
  for (const auto& c : collections) {
    cols.push_back({{"id", c.id}, {"started_at", c.started_at}, {"state", std::string(to_string(c.state))}});
  }
  report["collections"] = cols;

  Json rows = Json::array();
  for (const auto& property : property_order) {
    std::vector<MetricDef> metrics;
    if (auto def = store.find_property(property)) {
      metrics = def->metric_defs;
    } else {
      for (std::size_t i = 0; i < collections.size(); ++i) {
        if (const Run* r = run_for(i, property)) {
          for (const auto& m : r->metrics) {
            if (std::none_of(metrics.begin(), metrics.end(), [&](const auto& d) { return d.name == m.name; })) {
              metrics.push_back(MetricDef{m.name, "", {}, "", "tester"});
            }
          }
        }
      }
    }
    for (const auto& metric : metrics) {
      Json row;
      row["property"] = property;
      row["metric"] = metric.name;
      row["better"] = metric.better;
      Json values = Json::array();
      Json verdicts = Json::array();
      std::optional<std::size_t> lo, hi;
      std::vector<double> numbers(collections.size(), std::nan(""));
      for (std::size_t i = 0; i < collections.size(); ++i) {
        const Run* r = run_for(i, property);
        if (!r) {
          values.push_back("not run");
          verdicts.push_back("not run");
          continue;
        }
        const RunMetric* m = r->find_metric(metric.name);
        if (!m) {
          values.push_back(nullptr);
          verdicts.push_back(r->verdict.empty() ? Json(nullptr) : Json(r->verdict));
          continue;
        }
        values.push_back(metric_value_to_json(m->value));
        verdicts.push_back(std::string(to_string(m->verdict)));
        if (std::isnan(m->value)) continue;
        numbers[i] = m->value;
        if (!lo || m->value < numbers[*lo]) lo = i;
        if (!hi || m->value > numbers[*hi]) hi = i;
      }
      row["values"] = values;
      row["verdicts"] = verdicts;
      row["lowest"] = lo ? Json(collections[*lo].id) : Json(nullptr);
      row["highest"] = hi ? Json(collections[*hi].id) : Json(nullptr);
      Json best = nullptr;
      if (lo && hi && numbers[*lo] != numbers[*hi]) {
        if (metric.better == "lower") best = collections[*lo].id;
        if (metric.better == "higher") best = collections[*hi].id;
      }
      row["best"] = best;
      rows.push_back(std::move(row));
    }
  }
  report["rows"] = rows;
  return report;
}

}  // namespace modelprobe
