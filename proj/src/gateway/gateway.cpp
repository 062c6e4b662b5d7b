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

#include "modelprobe/gateway/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "modelprobe/common/csv.hpp"
#include "modelprobe/gateway/jsonpath.hpp"

namespace modelprobe::gateway {

// --- ModelSpec ---------------------------------------------------------------

namespace {

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

// Compact JSON with a space after ':' and ',' so rendered bodies read like
// hand-written templates. Integral doubles print without a fraction.
void dump_spaced(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ", ";
        first = false;
        out += Json(it.key()).dump();
        out += ": ";
        dump_spaced(it.value(), out);
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::array: {
      out.push_back('[');
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        dump_spaced(v[i], out);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) fail(ErrorCode::kInvalidArgument, "sample value is not finite");
      out += format_number(d);
      break;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

bool ModelSpec::single_sample_mode() const {
  return request_template.find(kSamplePlaceholder) != std::string::npos;
}

void ModelSpec::validate() const {
  const std::size_t many = count_occurrences(request_template, kSamplesPlaceholder);
  const std::size_t one = count_occurrences(request_template, kSamplePlaceholder);
  if (many + one == 0) fail(ErrorCode::kInvalidArgument, "template missing placeholder");
  if (many + one > 1) {
    fail(ErrorCode::kInvalidArgument, "template must contain exactly one placeholder");
  }
  if (label_path.empty()) fail(ErrorCode::kInvalidArgument, "label_path must not be empty");
  JsonPath::parse(label_path);
  if (confidence_path) JsonPath::parse(*confidence_path);
  if (batch_limit < 1) fail(ErrorCode::kInvalidArgument, "batch_limit must be >= 1");
  if (endpoint_url.empty()) fail(ErrorCode::kInvalidArgument, "endpoint_url must not be empty");
}

void to_json(Json& j, const ModelSpec& s) {
  Json headers = Json::array();
  for (const auto& [k, v] : s.headers) headers.push_back(Json::array({k, v}));
  j = Json{{"id", s.id},
           {"name", s.name},
           {"endpoint_url", s.endpoint_url},
           {"http_method", s.http_method == HttpMethod::kGet ? "GET" : "POST"},
           {"headers", headers},
           {"request_template", s.request_template},
           {"label_path", s.label_path},
           {"confidence_path", s.confidence_path ? Json(*s.confidence_path) : Json(nullptr)},
           {"batch_limit", s.batch_limit}};
}

void from_json(const Json& j, ModelSpec& s) {
  s = ModelSpec{};
  s.id = j.value("id", "");
  s.name = j.at("name").get<std::string>();
  s.endpoint_url = j.at("endpoint_url").get<std::string>();
  const std::string method = j.value("http_method", "POST");
  if (method == "GET") {
    s.http_method = HttpMethod::kGet;
  } else if (method == "POST") {
    s.http_method = HttpMethod::kPost;
  } else {
    fail(ErrorCode::kInvalidArgument, "http_method must be POST or GET");
  }
  s.headers.clear();
  if (auto it = j.find("headers"); it != j.end() && !it->is_null()) {
    if (it->is_object()) {
      for (auto h = it->begin(); h != it->end(); ++h) {
        s.headers.emplace_back(h.key(), h.value().get<std::string>());
      }
    } else {
      for (const auto& pair : *it) {
        s.headers.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
      }
    }
  }
  if (j.contains("request_template")) s.request_template = j.at("request_template").get<std::string>();
  if (j.contains("label_path")) s.label_path = j.at("label_path").get<std::string>();
  if (auto it = j.find("confidence_path"); it != j.end() && !it->is_null()) {
    s.confidence_path = it->get<std::string>();
  }
  if (j.contains("batch_limit")) {
    const auto limit = j.at("batch_limit").get<long long>();
    if (limit < 1) fail(ErrorCode::kInvalidArgument, "batch_limit must be >= 1");
    s.batch_limit = static_cast<std::size_t>(limit);
  }
}

// --- Prediction --------------------------------------------------------------

void to_json(Json& j, const Prediction& p) {
  j = Json{{"label", p.label}};
  if (p.confidence) j["confidence"] = *p.confidence;
  if (!p.values.empty()) j["values"] = p.values;
}

void from_json(const Json& j, Prediction& p) {
  p = Prediction{};
  p.label = j.at("label").get<std::string>();
  if (auto it = j.find("confidence"); it != j.end() && !it->is_null()) p.confidence = it->get<double>();
  if (auto it = j.find("values"); it != j.end()) p.values = it->get<std::vector<double>>();
}

// --- rendering and extraction --------------------------------------------------

std::string render_request(const ModelSpec& spec, std::span<const Sample> samples) {
  const bool single = spec.single_sample_mode();
  const std::string_view placeholder = single ? kSamplePlaceholder : kSamplesPlaceholder;
  const std::size_t pos = spec.request_template.find(placeholder);
  if (pos == std::string::npos) fail(ErrorCode::kInvalidArgument, "template missing placeholder");
  const std::size_t limit = single ? 1 : spec.batch_limit;
  if (samples.empty()) fail(ErrorCode::kInvalidArgument, "render_request needs at least one sample");
  if (samples.size() > limit) {
    fail(ErrorCode::kInvalidArgument, "batch overflow: " + std::to_string(samples.size()) +
                                          " samples exceed batch_limit " + std::to_string(limit));
  }

  std::string payload;
  if (single) {
    dump_spaced(samples.front(), payload);
  } else {
    payload.push_back('[');
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (i) payload += ", ";
      dump_spaced(samples[i], payload);
    }
    payload.push_back(']');
  }
  std::string body = spec.request_template;
  body.replace(pos, placeholder.size(), payload);
  return body;
}

namespace {

Prediction label_from_node(const Json& node) {
  Prediction p;
  if (node.is_string()) {
    p.label = node.get<std::string>();
  } else if (node.is_number()) {
    const double v = node.get<double>();
    p.label = format_number(v);
    p.values.push_back(v);
  } else if (node.is_array() &&
             std::all_of(node.begin(), node.end(), [](const Json& x) { return x.is_number(); })) {
    p.label = node.dump();
    for (const auto& x : node) p.values.push_back(x.get<double>());
  } else if (node.is_boolean()) {
    p.label = node.get<bool>() ? "true" : "false";
  } else {
    p.label = node.dump();
  }
  return p;
}

double confidence_from_node(const Json& node) {
  std::optional<double> value;
  if (node.is_number()) {
    value = node.get<double>();
  } else if (node.is_string()) {
    value = parse_number(node.get<std::string>());
  }
  if (!value) fail(ErrorCode::kInvalidArgument, "non-numeric confidence: " + node.dump());
  if (*value < 0.0 || *value > 1.0) {
    fail(ErrorCode::kInvalidArgument, "confidence outside [0,1]: " + node.dump());
  }
  return *value;
}

}  // namespace

std::vector<Prediction> extract_predictions(std::string_view body, const ModelSpec& spec,
                                            std::size_t expected) {
  Json doc;
  try {
    doc = Json::parse(body);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kInvalidArgument, std::string("malformed JSON response: ") + e.what());
  }
  const auto labels = JsonPath::parse(spec.label_path).evaluate(doc);
  if (labels.size() != expected) {
    fail(ErrorCode::kInvalidArgument, "cardinality mismatch: label_path yielded " +
                                          std::to_string(labels.size()) + " values, expected " +
                                          std::to_string(expected));
  }
  std::vector<Prediction> out;
  out.reserve(expected);
  for (const Json* node : labels) out.push_back(label_from_node(*node));

  if (spec.confidence_path) {
    const auto confs = JsonPath::parse(*spec.confidence_path).evaluate(doc);
    if (confs.size() != expected) {
      fail(ErrorCode::kInvalidArgument, "cardinality mismatch: confidence_path yielded " +
                                            std::to_string(confs.size()) + " values, expected " +
                                            std::to_string(expected));
    }
    for (std::size_t i = 0; i < expected; ++i) out[i].confidence = confidence_from_node(*confs[i]);
  }
  return out;
}

// --- RequestLimiter ----------------------------------------------------------

void RequestLimiter::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return in_flight_ < capacity_; });
  ++in_flight_;
  peak_ = std::max(peak_, in_flight_);
}

void RequestLimiter::release() {
  {
    std::lock_guard lock(mu_);
    if (in_flight_ > 0) --in_flight_;
  }
  cv_.notify_one();
}

void RequestLimiter::set_capacity(std::size_t capacity) {
  {
    std::lock_guard lock(mu_);
    capacity_ = capacity ? capacity : 1;
  }
  cv_.notify_all();
}

std::size_t RequestLimiter::in_flight() const {
  std::lock_guard lock(mu_);
  return in_flight_;
}

std::size_t RequestLimiter::peak_in_flight() const {
  std::lock_guard lock(mu_);
  return peak_;
}

std::shared_ptr<RequestLimiter> RequestLimiter::global() {
  static auto limiter = std::make_shared<RequestLimiter>(8);
  return limiter;
}

// --- PredictorHandle -------------------------------------------------------------

namespace detail {

class PredictorImpl {
 public:
  virtual ~PredictorImpl() = default;
  virtual std::vector<PredictionOutcome> predict(std::span<const Sample> samples) const = 0;
  virtual Json describe() const = 0;
  virtual bool probe() const = 0;
};

namespace {

class RemotePredictor final : public PredictorImpl {
 public:
  RemotePredictor(ModelSpec spec, std::shared_ptr<Transport> transport, GatewayOptions options)
      : spec_(std::move(spec)), transport_(std::move(transport)), options_(std::move(options)) {
    spec_.validate();
    if (!transport_) fail(ErrorCode::kInvalidArgument, "predictor needs a transport");
    if (!options_.limiter) options_.limiter = RequestLimiter::global();
    if (!options_.retry.sleep) {
      options_.retry.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    }
    if (options_.retry.max_attempts < 1) options_.retry.max_attempts = 1;
  }

  std::vector<PredictionOutcome> predict(std::span<const Sample> samples) const override {
    std::vector<PredictionOutcome> out;
    out.reserve(samples.size());
    const std::size_t chunk = spec_.single_sample_mode() ? 1 : spec_.batch_limit;
    for (std::size_t start = 0; start < samples.size(); start += chunk) {
      const auto part = samples.subspan(start, std::min(chunk, samples.size() - start));
      predict_chunk(part, out);
    }
    return out;
  }

  Json describe() const override {
    return Json{{"kind", "remote"}, {"model", spec_.name}, {"batch_limit", spec_.batch_limit}};
  }

  bool probe() const override {
    HttpRequest req{"GET", spec_.endpoint_url, spec_.headers, {}};
    try {
      options_.limiter->acquire();
      struct Release {
        RequestLimiter* l;
        ~Release() { l->release(); }
      } release{options_.limiter.get()};
      transport_->send(req);
      return true;
    } catch (const Error&) {
      return false;
    }
  }

 private:
  void predict_chunk(std::span<const Sample> part, std::vector<PredictionOutcome>& out) const {
    std::string error;
    try {
      HttpRequest req;
      req.method = spec_.http_method == HttpMethod::kGet ? "GET" : "POST";
      req.url = spec_.endpoint_url;
      req.headers = spec_.headers;
      req.body = render_request(spec_, part);
      const HttpResponse resp = send_with_retry(req);
      if (resp.status < 200 || resp.status >= 300) {
        error = "model API returned HTTP " + std::to_string(resp.status);
      } else {
        auto preds = extract_predictions(resp.body, spec_, part.size());
        for (auto& p : preds) out.push_back({std::move(p), {}});
        return;
      }
    } catch (const Error& e) {
      error = e.what();
    }
    for (std::size_t i = 0; i < part.size(); ++i) out.push_back(PredictionOutcome::failure(error));
  }

  HttpResponse send_with_retry(const HttpRequest& req) const {
    const RetryPolicy& retry = options_.retry;
    for (int attempt = 1;; ++attempt) {
      std::optional<HttpResponse> resp;
      std::string transport_error;
      options_.limiter->acquire();
      try {
        resp = transport_->send(req);
      } catch (const TransportError& e) {
        transport_error = e.what();
      } catch (...) {
        options_.limiter->release();
        throw;
      }
      options_.limiter->release();

      const bool retryable = !resp || resp->status >= 500;
      if (!retryable || attempt >= retry.max_attempts) {
        if (resp) return *resp;
        throw TransportError("model API unreachable after " + std::to_string(attempt) +
                             " attempts: " + transport_error);
      }
      const std::size_t slot = static_cast<std::size_t>(attempt - 1);
      if (!retry.backoff.empty()) {
        retry.sleep(retry.backoff[std::min(slot, retry.backoff.size() - 1)]);
      }
    }
  }

  ModelSpec spec_;
  std::shared_ptr<Transport> transport_;
  GatewayOptions options_;
};

class LocalPredictor final : public PredictorImpl {
 public:
  LocalPredictor(std::string name, PredictorHandle::Function fn)
      : name_(std::move(name)), fn_(std::move(fn)) {}

  std::vector<PredictionOutcome> predict(std::span<const Sample> samples) const override {
    std::vector<PredictionOutcome> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
      try {
        out.push_back(fn_(s));
      } catch (const std::exception& e) {
        out.push_back(PredictionOutcome::failure(e.what()));
      }
    }
    return out;
  }

  Json describe() const override { return Json{{"kind", "local"}, {"model", name_}}; }
  bool probe() const override { return true; }

 private:
  std::string name_;
  PredictorHandle::Function fn_;
};

}  // namespace
}  // namespace detail

PredictorHandle PredictorHandle::connect(ModelSpec spec, std::shared_ptr<Transport> transport,
                                         GatewayOptions options) {
  return PredictorHandle(std::make_shared<detail::RemotePredictor>(
      std::move(spec), std::move(transport), std::move(options)));
}

PredictorHandle PredictorHandle::from_function(std::string name, Function fn) {
  return PredictorHandle(std::make_shared<detail::LocalPredictor>(std::move(name), std::move(fn)));
}

std::vector<PredictionOutcome> PredictorHandle::predict_batch(std::span<const Sample> samples) const {
  if (samples.empty()) return {};
  return impl_->predict(samples);
}

Json PredictorHandle::describe() const { return impl_->describe(); }

bool PredictorHandle::probe() const { return impl_->probe(); }

}  // namespace modelprobe::gateway
