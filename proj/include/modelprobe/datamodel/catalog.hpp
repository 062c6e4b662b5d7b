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

#include <vector>

#include "modelprobe/common/json.hpp"
#include "modelprobe/datamodel/entities.hpp"

namespace modelprobe {

// The nine built-in properties: four tabular (correctness, group and
// individual discrimination, adversarial robustness), two text (typo and
// noise sensitivity) and three time-series metamorphic relations.
std::vector<PropertyDefinition> builtin_properties();

// Metric names unique and non-empty, at least one metric, parameter
// defaults legal, verdict rules refer to declared parameters.
void validate_property_definition(const PropertyDefinition& def);

// Throws Error(kInvalidArgument) when `value` does not fit the declaration.
void validate_parameter_value(const ParameterDef& def, const Json& value);

// Defaults filled in for every parameter not given in `values`. Unknown
// names, illegal values and unbound mandatory parameters throw.
Json bind_parameters(const PropertyDefinition& def, const Json& values);

// Applies a metric's verdict rule with thresholds from bound parameters.
// Range bounds are inclusive; NaN never passes.
MetricVerdict evaluate_metric(const MetricDef& metric, double value, const Json& bound_parameters);

}  // namespace modelprobe
