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

#include "modelprobe/gateway/mock_server.hpp"

#include <thread>

#include "httplib.h"

#include "modelprobe/common/error.hpp"

namespace modelprobe::gateway {

struct MockModelServer::Impl {
  MockModel model;
  std::string samples_path;
  httplib::Server server;
  std::thread thread;
  std::string host = "127.0.0.1";

  Impl(MockModel m, std::string path) : model(std::move(m)), samples_path(std::move(path)) {
    auto reply = [this](const std::string& body, httplib::Response& res) {
      const HttpResponse out = handle_mock_request(model, body, samples_path);
      res.status = out.status;
      res.set_content(out.body, "application/json");
    };
    server.Post(R"(/.*)", [reply](const httplib::Request& req, httplib::Response& res) {
      reply(req.body, res);
    });
    server.Get(R"(/.*)", [this, reply](const httplib::Request& req, httplib::Response& res) {
      if (req.has_param("payload")) {
        reply(req.get_param_value("payload"), res);
        return;
      }
      res.set_content(Json{{"status", "ok"}, {"kind", mock_kind_name(model.kind())}}.dump(),
                      "application/json");
    });
  }
};

MockModelServer::MockModelServer(MockModel model, std::string samples_path)
    : impl_(std::make_unique<Impl>(std::move(model), std::move(samples_path))) {}

MockModelServer::~MockModelServer() { stop(); }

int MockModelServer::start(const std::string& host, int port) {
  impl_->host = host;
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    port_ = port;
  } else {
    port_ = -1;
  }
  if (port_ <= 0) fail(ErrorCode::kUnavailable, "mock server could not bind " + host);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port_;
}

void MockModelServer::run(const std::string& host, int port) {
  impl_->host = host;
  port_ = port;
  if (!impl_->server.listen(host, port)) {
    fail(ErrorCode::kUnavailable, "mock server could not listen on " + host + ":" +
                                      std::to_string(port));
  }
}

void MockModelServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockModelServer::url() const {
  return "http://" + impl_->host + ":" + std::to_string(port_) + "/predict";
}

}  // namespace modelprobe::gateway
