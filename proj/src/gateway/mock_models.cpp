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

#include "modelprobe/gateway/mock_models.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

#include "modelprobe/common/csv.hpp"
#include "modelprobe/common/error.hpp"
#include "modelprobe/gateway/jsonpath.hpp"

namespace modelprobe::gateway {
namespace {

constexpr std::array<std::pair<MockModelKind, std::string_view>, 9> kKindNames{{
    {MockModelKind::kConstant, "constant"},
    {MockModelKind::kPlantedBias, "planted-bias"},
    {MockModelKind::kThreshold, "threshold"},
    {MockModelKind::kKeywordText, "keyword-text"},
    {MockModelKind::kLastValue, "last-value"},
    {MockModelKind::kMean, "mean"},
    {MockModelKind::kNormalizing, "normalizing"},
    {MockModelKind::kOrderSensitive, "order-sensitive"},
    {MockModelKind::kRangeClamped, "range-clamped"},
}};

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

double scalar_number(const Json& v, std::string_view column) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    if (auto n = parse_number(v.get<std::string>())) return *n;
  }
  fail(ErrorCode::kInvalidArgument, "column '" + std::string(column) + "' is not numeric");
}

const Json& field(const Sample& sample, const std::string& column) {
  if (!sample.is_object()) fail(ErrorCode::kInvalidArgument, "tabular mock expects an object sample");
  auto it = sample.find(column);
  if (it == sample.end()) fail(ErrorCode::kInvalidArgument, "sample lacks column '" + column + "'");
  return *it;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct Record {
  double t;
  double v;
};

std::vector<Record> history_of(const Sample& sample) {
  if (!sample.is_object() || !sample.contains("history")) {
    fail(ErrorCode::kInvalidArgument, "forecaster expects {\"history\": [[t, v], ...]}");
  }
  std::vector<Record> out;
  for (const auto& pair : sample.at("history")) {
    out.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
  }
  if (out.empty()) fail(ErrorCode::kInvalidArgument, "forecaster needs a non-empty history");
  return out;
}

std::size_t horizon_of(const Sample& sample) {
  if (auto it = sample.find("forecast_timestamps"); it != sample.end()) return it->size();
  return 1;
}

double latest_value(const std::vector<Record>& h) {
  return std::max_element(h.begin(), h.end(), [](const Record& a, const Record& b) {
           return a.t < b.t;
         })->v;
}

Json repeat(double value, std::size_t n) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < n; ++i) arr.push_back(value);
  return arr;
}

}  // namespace

std::optional<MockModelKind> parse_mock_kind(std::string_view name) {
  for (const auto& [kind, n] : kKindNames) {
    if (n == name) return kind;
  }
  return std::nullopt;
}

std::string_view mock_kind_name(MockModelKind kind) {
  for (const auto& [k, n] : kKindNames) {
    if (k == kind) return n;
  }
  return "unknown";
}

std::vector<std::string_view> mock_kind_names() {
  std::vector<std::string_view> out;
  for (const auto& entry : kKindNames) out.push_back(entry.second);
  return out;
}

MockModel::MockModel(MockModelKind kind, Json params)
    : kind_(kind), params_(params.is_null() ? Json::object() : std::move(params)) {}

MockModel MockModel::from_name(std::string_view kind, Json params) {
  auto parsed = parse_mock_kind(kind);
  if (!parsed) fail(ErrorCode::kInvalidArgument, "unknown mock model kind: " + std::string(kind));
  return MockModel(*parsed, std::move(params));
}

Json MockModel::respond(const Sample& sample) const {
  switch (kind_) {
    case MockModelKind::kConstant:
      return Json{{"label", params_.value("label", "no")}, {"confidence", 1.0}};

    case MockModelKind::kPlantedBias: {
      const std::string protected_col = params_.value("protected", "group");
      const std::string privileged = params_.value("privileged", "A");
      const std::string score_col = params_.value("score", "score");
      const double threshold = params_.value("threshold", 0.5);
      const double score = scalar_number(field(sample, score_col), score_col);
      const bool favorable =
          scalar_text(field(sample, protected_col)) == privileged || score > threshold;
      return Json{{"label", favorable ? params_.value("favorable", "favorable")
                                      : params_.value("unfavorable", "unfavorable")},
                  {"confidence", favorable ? 0.9 : 0.8}};
    }

    case MockModelKind::kThreshold: {
      const std::string column = params_.value("column", "x");
      const double x = scalar_number(field(sample, column), column);
      const bool above = x > params_.value("threshold", 0.5);
      return Json{{"label", above ? params_.value("above", "1") : params_.value("below", "0")},
                  {"confidence", 1.0}};
    }

    case MockModelKind::kKeywordText: {
      std::string text;
      if (sample.is_string()) {
        text = sample.get<std::string>();
      } else if (sample.is_object() && sample.contains("text")) {
        text = sample.at("text").get<std::string>();
      } else {
        fail(ErrorCode::kInvalidArgument, "keyword-text mock expects a string sample");
      }
      const std::string folded = lower(text);
      std::vector<std::string> words{"good"};
      if (params_.contains("words")) words = params_.at("words").get<std::vector<std::string>>();
      const bool positive = std::any_of(words.begin(), words.end(), [&](const std::string& w) {
        return folded.find(lower(w)) != std::string::npos;
      });
      return Json{{"label", positive ? params_.value("positive", "positive")
                                     : params_.value("negative", "negative")},
                  {"confidence", 1.0}};
    }

    case MockModelKind::kLastValue: {
      const auto h = history_of(sample);
      return Json{{"label", repeat(latest_value(h), horizon_of(sample))}};
    }

    case MockModelKind::kMean: {
      auto h = history_of(sample);
      std::vector<double> values;
      for (const auto& r : h) values.push_back(r.v);
      // Summing in sorted order makes the result bitwise independent of the
      // payload order.
      std::sort(values.begin(), values.end());
      double sum = 0.0;
      for (double v : values) sum += v;
      return Json{{"label", repeat(sum / static_cast<double>(values.size()), horizon_of(sample))}};
    }

    case MockModelKind::kNormalizing: {
      auto h = history_of(sample);
      std::sort(h.begin(), h.end(), [](const Record& a, const Record& b) { return a.t < b.t; });
      double lo = h.front().v, hi = h.front().v;
      for (const auto& r : h) {
        lo = std::min(lo, r.v);
        hi = std::max(hi, r.v);
      }
      const double span = hi - lo;
      const std::size_t k = std::min<std::size_t>(3, h.size());
      double acc = 0.0;
      for (std::size_t i = h.size() - k; i < h.size(); ++i) {
        acc += span > 0.0 ? (h[i].v - lo) / span : 0.0;
      }
      const double normalized = acc / static_cast<double>(k);
      return Json{{"label", repeat(normalized * span + lo, horizon_of(sample))}};
    }

    case MockModelKind::kOrderSensitive: {
      const auto h = history_of(sample);
      return Json{{"label", repeat(h.back().v, horizon_of(sample))}};
    }

    case MockModelKind::kRangeClamped: {
      const auto h = history_of(sample);
      const double lo = params_.value("min", 0.0);
      const double hi = params_.value("max", 1.0);
      return Json{{"label", repeat(std::clamp(latest_value(h), lo, hi), horizon_of(sample))}};
    }
  }
  fail(ErrorCode::kInvalidArgument, "unknown mock model kind");
}

Prediction mock_predict(const MockModel& model, const Sample& sample) {
  const Json entry = model.respond(sample);
  ModelSpec spec;
  spec.endpoint_url = "mock://";
  spec.label_path = "$.label";
  if (entry.contains("confidence")) spec.confidence_path = "$.confidence";
  return extract_predictions(entry.dump(), spec, 1).front();
}

HttpResponse handle_mock_request(const MockModel& model, std::string_view body,
                                 std::string_view samples_path) {
  Json doc;
  try {
    doc = Json::parse(body);
  } catch (const Json::parse_error& e) {
    return {400, Json{{"error", std::string("malformed request: ") + e.what()}}.dump()};
  }
  const auto nodes = JsonPath::parse(samples_path).evaluate(doc);
  if (nodes.size() != 1) {
    return {400, Json{{"error", "request has no samples at " + std::string(samples_path)}}.dump()};
  }
  std::vector<const Json*> samples;
  if (nodes.front()->is_array()) {
    for (const auto& s : *nodes.front()) samples.push_back(&s);
  } else {
    samples.push_back(nodes.front());
  }
  Json predictions = Json::array();
  try {
    for (const Json* s : samples) predictions.push_back(model.respond(*s));
  } catch (const Error& e) {
    return {422, Json{{"error", e.what()}}.dump()};
  }
  return {200, Json{{"predictions", predictions}}.dump()};
}

HttpResponse MockTransport::send(const HttpRequest& request) {
  const std::size_t index = requests_.fetch_add(1) + 1;
  {
    std::lock_guard lock(mu_);
    last_headers_ = request.headers;
  }
  if (fault_) {
    if (auto status = fault_(index, request)) return {*status, R"({"error": "injected fault"})"};
  }
  if (request.method == "GET" && request.body.empty()) return {200, R"({"status": "ok"})"};
  return handle_mock_request(model_, request.body, samples_path_);
}

std::vector<std::pair<std::string, std::string>> MockTransport::last_headers() const {
  std::lock_guard lock(mu_);
  return last_headers_;
}

}  // namespace modelprobe::gateway
