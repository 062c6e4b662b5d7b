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

#include <string>
#include <string_view>
#include <vector>

#include "modelprobe/common/json.hpp"
#include "modelprobe/datamodel/entities.hpp"
#include "modelprobe/datamodel/store.hpp"
#include "modelprobe/gateway/model_spec.hpp"

namespace modelprobe {

// Validates and stores a new property. Throws kConflict when the id exists.
std::string register_property_definition(Store& store, const PropertyDefinition& def);

// Registers every built-in property the store does not know yet. Returns the
// ids added.
std::vector<std::string> ensure_builtin_catalog(Store& store);

struct DataSummary {
  std::size_t rows = 0;
  Json columns = Json::array();
  Modality modality = Modality::kTabular;
};

// Parses content under its declared format. Throws kInvalidArgument on
// unparseable content and "empty training data" when there are no rows.
DataSummary summarize_data(DataFormat format, std::string_view content);

// Stores the model and its training data and creates the subject. The
// sniffed column list and modality land in data_properties.
std::string register_test_subject(Store& store, const std::string& project_id,
                                  gateway::ModelSpec model, DataFormat format,
                                  std::string_view training_content);

DataRef attach_data(Store& store, const std::string& subject_id, DataKind kind, DataFormat format,
                    std::string_view content);

// Checks the configuration against the subject and the selected properties
// (known, matching modality, parameters bindable, required inputs present)
// before storing it.
RunConfiguration create_run_configuration(Store& store, RunConfiguration config);

StatusSnapshot compute_status_snapshot(const Store& store, std::string_view run_id);

// Per-property, per-metric table with one column per collection, ordered by
// start time. Absent properties show "not run". Each row names the
// collections holding the lowest and highest value and, when the metric
// declares a direction, the best one.
Json compare_collections(const Store& store, const std::vector<std::string>& collection_ids);

}  // namespace modelprobe
