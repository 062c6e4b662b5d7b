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

#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modelprobe/common/error.hpp"
#include "modelprobe/common/json.hpp"
#include "modelprobe/gateway/model_spec.hpp"

namespace modelprobe::gateway {

// A tabular row (object, column -> scalar), a text sample (string) or a
// forecasting window ({"history": [[t, v], ...], "forecast_timestamps": [...]}).
using Sample = Json;

struct Prediction {
  std::string label;
  std::optional<double> confidence;
  // Numeric view of the label node when it is a number or an array of
  // numbers (forecasts). Empty otherwise.
  std::vector<double> values;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct PredictionOutcome {
  std::optional<Prediction> prediction;
  std::string error;

  bool ok() const noexcept { return prediction.has_value(); }
  static PredictionOutcome failure(std::string why) { return {std::nullopt, std::move(why)}; }
};

void to_json(Json& j, const Prediction& p);
void from_json(const Json& j, Prediction& p);

// Substitutes the JSON array of samples (or the single sample) into the
// template. Throws on batch overflow or a template without placeholder.
std::string render_request(const ModelSpec& spec, std::span<const Sample> samples);

// Applies label_path (and confidence_path) to a response body. The label
// path must yield exactly `expected` nodes.
std::vector<Prediction> extract_predictions(std::string_view body, const ModelSpec& spec,
                                            std::size_t expected);

// --- transport -------------------------------------------------------------

struct HttpRequest {
  std::string method;
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Connection-level failure (refused, timeout, TLS). Retryable.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message)
      : Error(ErrorCode::kUnavailable, message) {}
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

struct HttpTransportOptions {
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds read_timeout{30000};
  bool verify_tls = true;
  std::string ca_cert_path;
};

std::shared_ptr<Transport> make_http_transport(HttpTransportOptions options = {});

// --- concurrency and retries --------------------------------------------------

// Caps in-flight upstream requests across every handle that shares it.
class RequestLimiter {
 public:
  explicit RequestLimiter(std::size_t capacity) : capacity_(capacity ? capacity : 1) {}

  void acquire();
  void release();
  void set_capacity(std::size_t capacity);
  std::size_t in_flight() const;
  std::size_t peak_in_flight() const;

  static std::shared_ptr<RequestLimiter> global();

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::size_t capacity_;
  std::size_t in_flight_ = 0;
  std::size_t peak_ = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  // Wait before attempt k+1 is backoff[k-1].
  std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(200),
                                                 std::chrono::milliseconds(800),
                                                 std::chrono::milliseconds(3200)};
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to sleep_for
};

struct GatewayOptions {
  RetryPolicy retry;
  std::shared_ptr<RequestLimiter> limiter;  // defaults to RequestLimiter::global()
};

// --- predictor handle ----------------------------------------------------------

namespace detail {
class PredictorImpl;
}

// The capability testers receive. It can predict and describe itself; it
// carries no way to read the endpoint headers it was built from.
class PredictorHandle {
 public:
  using Function = std::function<PredictionOutcome(const Sample&)>;

  static PredictorHandle connect(ModelSpec spec, std::shared_ptr<Transport> transport,
                                 GatewayOptions options = {});
  static PredictorHandle from_function(std::string name, Function fn);

  // |result| == |samples|, order preserved. Failures are per-sample outcomes.
  std::vector<PredictionOutcome> predict_batch(std::span<const Sample> samples) const;

  // Model name, batch limit and kind; safe to show to third-party testers.
  Json describe() const;

  // True if the endpoint answers at all (any HTTP status).
  bool probe() const;

 private:
  explicit PredictorHandle(std::shared_ptr<const detail::PredictorImpl> impl)
      : impl_(std::move(impl)) {}
  std::shared_ptr<const detail::PredictorImpl> impl_;
};

}  // namespace modelprobe::gateway
