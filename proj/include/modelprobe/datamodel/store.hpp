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

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modelprobe/datamodel/entities.hpp"
#include "modelprobe/gateway/model_spec.hpp"

namespace modelprobe {

// Durable entity store. `find_*` return nullopt for unknown ids; `get_*`
// throw Error(kNotFound). `put_*` insert or replace and assign an id when
// the entity has none. All methods are safe to call from many threads.
class Store {
 public:
  virtual ~Store() = default;

  virtual Project create_project(const std::string& name) = 0;
  virtual std::optional<Project> find_project(std::string_view id) const = 0;
  virtual std::optional<Project> find_project_by_name(std::string_view name) const = 0;
  virtual std::vector<Project> list_projects() const = 0;
  // Removes the project with every subject, model, run and result it owns.
  virtual void delete_project(std::string_view id) = 0;

  virtual gateway::ModelSpec put_model(const std::string& project_id, gateway::ModelSpec spec) = 0;
  virtual std::optional<gateway::ModelSpec> find_model(std::string_view id) const = 0;
  virtual std::vector<gateway::ModelSpec> list_models(std::string_view project_id) const = 0;

  // Copies `content` under the project's data directory and fills in id,
  // location and row_count.
  virtual DataRef put_data(const std::string& project_id, DataRef ref, std::string_view content,
                           std::size_t row_count) = 0;
  virtual std::string read_data(const DataRef& ref) const = 0;

  virtual TestSubject put_subject(TestSubject subject) = 0;
  virtual std::optional<TestSubject> find_subject(std::string_view id) const = 0;
  virtual std::vector<TestSubject> list_subjects(std::string_view project_id) const = 0;

  virtual void put_property(const PropertyDefinition& def) = 0;
  virtual std::optional<PropertyDefinition> find_property(std::string_view id) const = 0;
  virtual std::vector<PropertyDefinition> list_properties() const = 0;

  virtual RunConfiguration put_config(RunConfiguration config) = 0;
  virtual std::optional<RunConfiguration> find_config(std::string_view id) const = 0;

  virtual RunCollection put_collection(RunCollection collection) = 0;
  virtual std::optional<RunCollection> find_collection(std::string_view id) const = 0;
  virtual std::vector<RunCollection> list_collections(std::string_view project_id) const = 0;

  virtual Run put_run(Run run) = 0;
  virtual std::optional<Run> find_run(std::string_view id) const = 0;

  // Appends are atomic per record. Case ids are assigned here.
  virtual std::vector<TestCase> append_cases(const std::string& run_id, std::vector<TestCase> cases) = 0;
  virtual void append_results(const std::string& run_id, std::span<const TestResult> results) = 0;
  // Cases in creation order.
  virtual std::vector<TestCase> list_cases(std::string_view run_id) const = 0;
  // Latest result per case, in case order; cases without results are skipped.
  virtual std::vector<TestResult> list_results(std::string_view run_id) const = 0;
  // Counts over stored cases and their latest results.
  virtual StatusSnapshot status(std::string_view run_id) const = 0;

  Project get_project(std::string_view id) const;
  gateway::ModelSpec get_model(std::string_view id) const;
  TestSubject get_subject(std::string_view id) const;
  PropertyDefinition get_property(std::string_view id) const;
  RunConfiguration get_config(std::string_view id) const;
  RunCollection get_collection(std::string_view id) const;
  Run get_run(std::string_view id) const;
};

// Directory-per-project store of line-delimited JSON:
//
//   <root>/properties.jsonl
//   <root>/<project-id>/project.json
//   <root>/<project-id>/{subjects,models,configs,collections,runs}/index.jsonl
//   <root>/<project-id>/cases/<run-id>.jsonl      (append-only)
//   <root>/<project-id>/results/<run-id>.jsonl    (append-only)
//   <root>/<project-id>/data/<data-id>.<ext>
//
// Index files are rewritten through a temp file and rename. Everything is
// also held in memory; a single writer lock serializes mutations.
std::shared_ptr<Store> open_file_store(const std::filesystem::path& root);

}  // namespace modelprobe
