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

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modelprobe/common/json.hpp"

namespace modelprobe::gateway {

inline constexpr std::string_view kSamplesPlaceholder = "{{SAMPLES}}";
inline constexpr std::string_view kSamplePlaceholder = "{{SAMPLE}}";

enum class HttpMethod { kPost, kGet };

// The black-box contract for one model API. Headers may hold credentials and
// never leave the gateway.
struct ModelSpec {
  std::string id;
  std::string name;
  std::string endpoint_url;
  HttpMethod http_method = HttpMethod::kPost;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string request_template = R"({"instances": {{SAMPLES}}})";
  std::string label_path = "$.predictions[*].label";
  std::optional<std::string> confidence_path;
  std::size_t batch_limit = 32;

  // True when the template uses {{SAMPLE}} (one request per sample).
  bool single_sample_mode() const;

  // Checks the invariants: exactly one placeholder, non-empty label path,
  // parseable JSONPath expressions, batch_limit >= 1.
  void validate() const;
};

// Full serialization, headers included. Used only by the store.
void to_json(Json& j, const ModelSpec& spec);
void from_json(const Json& j, ModelSpec& spec);

}  // namespace modelprobe::gateway
