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

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modelprobe/common/json.hpp"
#include "modelprobe/gateway/gateway.hpp"

namespace modelprobe::gateway {

// Deterministic models whose pass/fail outcome under every property is known
// by construction. Parameters (with defaults):
//
//   constant         {"label": "no"}
//   planted-bias     {"protected": "group", "privileged": "A", "score": "score",
//                     "threshold": 0.5, "favorable": "favorable",
//                     "unfavorable": "unfavorable"}
//                    favorable iff protected == privileged or score > threshold
//   threshold        {"column": "x", "threshold": 0.5, "above": "1", "below": "0"}
//   keyword-text     {"words": ["good"], "positive": "positive", "negative": "negative"}
//
// Forecasters receive {"history": [[t, v], ...], "forecast_timestamps": [...]}
// and answer one number per forecast timestamp:
//
//   last-value       value at the latest timestamp (shift-equivariant)
//   mean             mean of history values (permutation-invariant)
//   normalizing      min-max normalizes the window, forecasts the mean of the
//                    three latest normalized values, denormalizes
//   order-sensitive  value of the last record in payload order
//   range-clamped    {"min": 0, "max": 1}: last value clamped to the range
enum class MockModelKind {
  kConstant,
  kPlantedBias,
  kThreshold,
  kKeywordText,
  kLastValue,
  kMean,
  kNormalizing,
  kOrderSensitive,
  kRangeClamped,
};

std::optional<MockModelKind> parse_mock_kind(std::string_view name);
std::string_view mock_kind_name(MockModelKind kind);
std::vector<std::string_view> mock_kind_names();

class MockModel {
 public:
  MockModel(MockModelKind kind, Json params = Json::object());

  // Throws Error(kInvalidArgument) for unknown kinds.
  static MockModel from_name(std::string_view kind, Json params = Json::object());

  MockModelKind kind() const noexcept { return kind_; }
  const Json& params() const noexcept { return params_; }

  // The response entry for one sample: {"label": ..., "confidence": ...}.
  Json respond(const Sample& sample) const;

 private:
  MockModelKind kind_;
  Json params_;
};

Prediction mock_predict(const MockModel& model, const Sample& sample);

// Serves one request body the way `mock-model serve` does: samples are found
// with `samples_path` (an array of samples, or one object for {{SAMPLE}}
// templates) and the reply is {"predictions": [{"label": .., "confidence": ..}]}.
HttpResponse handle_mock_request(const MockModel& model, std::string_view body,
                                 std::string_view samples_path = "$.instances");

// In-process transport backed by a mock model. Counts requests and supports
// fault injection: `fault` may return an HTTP status to answer instead.
class MockTransport final : public Transport {
 public:
  using Fault = std::function<std::optional<int>(std::size_t request_index, const HttpRequest&)>;

  explicit MockTransport(MockModel model, std::string samples_path = "$.instances")
      : model_(std::move(model)), samples_path_(std::move(samples_path)) {}

  HttpResponse send(const HttpRequest& request) override;

  void set_fault(Fault fault) { fault_ = std::move(fault); }
  std::size_t request_count() const noexcept { return requests_.load(); }
  // Headers seen on the most recent request (for header-injection tests).
  std::vector<std::pair<std::string, std::string>> last_headers() const;

 private:
  MockModel model_;
  std::string samples_path_;
  Fault fault_;
  std::atomic<std::size_t> requests_{0};
  mutable std::mutex mu_;
  std::vector<std::pair<std::string, std::string>> last_headers_;
};

}  // namespace modelprobe::gateway
