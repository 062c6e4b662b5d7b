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

#include "modelprobe/service/api.hpp"

#include <charconv>
#include <thread>
#include <vector>

#include "httplib.h"

#include "modelprobe/datamodel/operations.hpp"

namespace modelprobe::service {
namespace {

std::vector<std::string> segments(const std::string& path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t end = std::min(path.find('/', start), path.size());
    if (end > start) out.push_back(path.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::kInvalidArgument, "request body is not valid JSON");
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  return j;
}

std::size_t query_size(const ApiRequest& request, const std::string& key, std::size_t fallback) {
  const auto it = request.query.find(key);
  if (it == request.query.end() || it->second.empty()) return fallback;
  std::size_t v = 0;
  const auto* end = it->second.data() + it->second.size();
  const auto [ptr, ec] = std::from_chars(it->second.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorCode::kInvalidArgument, "query parameter '" + key + "' must be a non-negative integer");
  }
  return v;
}

struct DataPayload {
  DataFormat format = DataFormat::kCsvTable;
  std::string content;
};

DataPayload data_payload(const Json& body, const std::string& key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_object()) fail(ErrorCode::kInvalidArgument, "missing '" + key + "' payload");
  DataPayload p;
  p.format = parse_data_format(it->value("format", std::string("csv-table")));
  if (!it->contains("content") || !it->at("content").is_string()) {
    fail(ErrorCode::kInvalidArgument, "'" + key + ".content' must be a string");
  }
  p.content = it->at("content").get<std::string>();
  return p;
}

ApiResponse ok(Json body, int status = 200) { return ApiResponse{status, std::move(body)}; }

[[noreturn]] void no_route(const ApiRequest& request) {
  fail(ErrorCode::kNotFound, "no route for " + request.method + " " + request.path);
}

}  // namespace

int http_status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kFailedPrecondition: return 409;
    case ErrorCode::kUnavailable: return 503;
    case ErrorCode::kInternal: return 500;
  }
  return 500;
}

Json error_json(const Error& error) {
  return Json{{"code", error_code_name(error.code())}, {"message", error.what()}, {"detail", error.detail()}};
}

Json redacted_model(const gateway::ModelSpec& spec) {
  Json j = spec;
  Json names = Json::array();
  for (const auto& [name, value] : spec.headers) names.push_back(name);
  j.erase("headers");
  j["header_names"] = names;
  return j;
}

ApiResponse Api::handle(const ApiRequest& request) const {
  try {
    return route(request);
  } catch (const Error& e) {
    return ApiResponse{http_status_for(e.code()), error_json(e)};
  } catch (const Json::exception& e) {
    return ApiResponse{400, error_json(Error(ErrorCode::kInvalidArgument, "malformed request", e.what()))};
  } catch (const std::exception& e) {
    return ApiResponse{500, error_json(Error(ErrorCode::kInternal, e.what()))};
  }
}

ApiResponse Api::route(const ApiRequest& request) const {
  Store& store = orchestrator_.store();
  const auto seg = segments(request.path);
  const std::string& m = request.method;
  const std::size_t n = seg.size();

  if (n == 1 && seg[0] == "health" && m == "GET") return ok(Json{{"status", "ok"}});
  if (n == 1 && seg[0] == "properties" && m == "GET") return ok(Json(store.list_properties()));

  if (n >= 1 && seg[0] == "projects") {
    if (n == 1 && m == "GET") return ok(Json(store.list_projects()));
    if (n == 1 && m == "POST") {
      const Json body = parse_body(request.body);
      const std::string name = body.value("name", std::string());
      if (name.empty()) fail(ErrorCode::kInvalidArgument, "project name must not be empty");
      return ok(Json(store.create_project(name)), 201);
    }
    if (n == 3 && seg[2] == "collections" && m == "GET") {
      store.get_project(seg[1]);
      return ok(Json(store.list_collections(seg[1])));
    }
    if (n == 3 && seg[2] == "subjects" && m == "POST") {
      const Json body = parse_body(request.body);
      if (!body.contains("model")) fail(ErrorCode::kInvalidArgument, "missing 'model'");
      const auto spec = body.at("model").get<gateway::ModelSpec>();
      const DataPayload training = data_payload(body, "training");
      const std::string subject_id = register_test_subject(store, seg[1], spec, training.format, training.content);
      if (body.contains("labeled_eval") && !body.at("labeled_eval").is_null()) {
        const DataPayload labeled = data_payload(body, "labeled_eval");
        attach_data(store, subject_id, DataKind::kLabeledEval, labeled.format, labeled.content);
      }
      const TestSubject subject = store.get_subject(subject_id);
      Json out = subject;
      out["model"] = redacted_model(store.get_model(subject.model_id));
      return ok(out, 201);
    }
    if (n == 3 && seg[2] == "compare" && m == "GET") {
      store.get_project(seg[1]);
      std::vector<std::string> ids;
      if (const auto it = request.query.find("collections"); it != request.query.end()) {
        std::size_t start = 0;
        const std::string& list = it->second;
        while (start <= list.size()) {
          const std::size_t end = std::min(list.find(',', start), list.size());
          if (end > start) ids.push_back(list.substr(start, end - start));
          start = end + 1;
        }
      }
      if (ids.empty()) fail(ErrorCode::kInvalidArgument, "query parameter 'collections' names no collection");
      for (const auto& id : ids) {
        if (store.get_collection(id).project_id != seg[1]) {
          fail(ErrorCode::kInvalidArgument, "collection " + id + " belongs to another project");
        }
      }
      return ok(compare_collections(store, ids));
    }
  }

  if (n == 3 && seg[0] == "subjects" && seg[2] == "configs" && m == "POST") {
    RunConfiguration config = parse_body(request.body).get<RunConfiguration>();
    config.id.clear();
    config.test_subject_id = seg[1];
    return ok(Json(create_run_configuration(store, config)), 201);
  }

  if (n == 3 && seg[0] == "configs" && seg[2] == "run" && m == "POST") {
    const Json body = parse_body(request.body);
    RunRequest rr;
    rr.run_configuration_id = seg[1];
    rr.idempotency_key = body.value("idempotency_key", std::string());
    rr.force = body.value("force", false);
    const std::string id = orchestrator_.execute_run(rr);
    return ok(Json{{"collection_id", id}, {"runs", store.get_collection(id).runs}}, 202);
  }

  if (n >= 2 && seg[0] == "collections") {
    if (n == 3 && seg[2] == "status" && m == "GET") return ok(Json(orchestrator_.poll_status(seg[1])));
    if (n == 2 && m == "GET") return ok(Json(store.get_collection(seg[1])));
    if (n == 2 && m == "DELETE") {
      orchestrator_.cancel_run(seg[1]);
      return ok(Json{{"collection_id", seg[1]}, {"state", to_string(store.get_collection(seg[1]).state)}});
    }
  }

  if (n == 3 && seg[0] == "runs") {
    if (seg[2] == "metrics" && m == "GET") return ok(orchestrator_.metric_report(seg[1]));
    if (seg[2] == "failures" && m == "GET") {
      return ok(Json(orchestrator_.get_failures(seg[1], query_size(request, "offset", 0),
                                                query_size(request, "limit", 50))));
    }
    if (seg[2] == "reevaluate" && m == "POST") {
      const Json body = parse_body(request.body);
      return ok(Json(orchestrator_.reevaluate(seg[1], body.value("persist", false))));
    }
  }
  no_route(request);
}

ApiResponse send_remote(const std::string& base_url, const ApiRequest& request) {
  httplib::Client client(base_url);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(300, 0);
  httplib::Params params(request.query.begin(), request.query.end());
  const std::string target = httplib::append_query_params(request.path, params);
  httplib::Result res;
  if (request.method == "GET") {
    res = client.Get(target);
  } else if (request.method == "POST") {
    res = client.Post(target, request.body.empty() ? std::string("{}") : request.body, "application/json");
  } else if (request.method == "DELETE") {
    res = client.Delete(target);
  } else {
    return ApiResponse{400, error_json(Error(ErrorCode::kInvalidArgument, "unsupported method " + request.method))};
  }
  if (!res) {
    return ApiResponse{503, error_json(Error(ErrorCode::kUnavailable, "cannot reach " + base_url,
                                             httplib::to_string(res.error())))};
  }
  Json body = Json::parse(res->body, nullptr, false);
  if (body.is_discarded()) {
    body = error_json(Error(ErrorCode::kInternal, "server answered with non-JSON body", res->body));
  }
  return ApiResponse{res->status, std::move(body)};
}

struct ApiServer::Impl {
  const Api& api;
  httplib::Server server;
  std::thread thread;

  explicit Impl(const Api& a) : api(a) {
    auto serve = [this](const httplib::Request& req, httplib::Response& res) {
      ApiRequest r;
      r.method = req.method;
      r.path = req.path;
      for (const auto& [k, v] : req.params) r.query[k] = v;
      r.body = req.body;
      const ApiResponse out = api.handle(r);
      res.status = out.status;
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_content(out.body.dump(), "application/json");
    };
    server.Get(R"(/.*)", serve);
    server.Post(R"(/.*)", serve);
    server.Delete(R"(/.*)", serve);
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
  }
};

ApiServer::ApiServer(const Api& api) : impl_(std::make_unique<Impl>(api)) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) fail(ErrorCode::kUnavailable, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ApiServer::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    fail(ErrorCode::kUnavailable, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace modelprobe::service
