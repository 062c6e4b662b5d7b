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

#include <map>
#include <memory>
#include <string>

#include "modelprobe/common/error.hpp"
#include "modelprobe/common/json.hpp"
#include "modelprobe/service/orchestrator.hpp"

namespace modelprobe::service {

struct ApiRequest {
  std::string method;  // "GET", "POST", "DELETE"
  std::string path;    // without query string
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  Json body;
};

int http_status_for(ErrorCode code) noexcept;

// {"code": ..., "message": ..., "detail": ...}
Json error_json(const Error& error);

// A model spec as the API shows it: header values never leave the store.
Json redacted_model(const gateway::ModelSpec& spec);

// JSON API over an orchestrator and its store:
//
//   GET    /health
//   GET    /properties
//   GET    /projects
//   POST   /projects                         {"name"}
//   GET    /projects/{id}/collections
//   POST   /projects/{id}/subjects           {"model", "training", "labeled_eval"?}
//   POST   /subjects/{id}/configs            run configuration fields
//   POST   /configs/{id}/run                 {"idempotency_key"?, "force"?}
//   GET    /collections/{id}/status
//   DELETE /collections/{id}                 cancel
//   GET    /runs/{id}/metrics
//   GET    /runs/{id}/failures?offset&limit
//   POST   /runs/{id}/reevaluate             {"persist"?}
//   GET    /projects/{id}/compare?collections=a,b
//
// Data payloads are {"format": "csv-table" | "text-lines" | "timeseries-csv",
// "content": "..."}.
class Api {
 public:
  explicit Api(Orchestrator& orchestrator) : orchestrator_(orchestrator) {}

  // Never throws: failures become error bodies.
  ApiResponse handle(const ApiRequest& request) const;

 private:
  ApiResponse route(const ApiRequest& request) const;
  Orchestrator& orchestrator_;
};

// Sends the request to a server at base_url (e.g. "http://127.0.0.1:8080").
// Connection failures come back as a 503 error body.
ApiResponse send_remote(const std::string& base_url, const ApiRequest& request);

class ApiServer {
 public:
  explicit ApiServer(const Api& api);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Background thread; port 0 picks a free port. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace modelprobe::service
