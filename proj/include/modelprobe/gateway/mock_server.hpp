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

#include <memory>
#include <string>

#include "modelprobe/gateway/mock_models.hpp"

namespace modelprobe::gateway {

// HTTP front for a MockModel. Answers POST on every path (and GET with a
// `payload` query parameter); GET without payload is a health check.
class MockModelServer {
 public:
  MockModelServer(MockModel model, std::string samples_path = "$.instances");
  ~MockModelServer();

  MockModelServer(const MockModelServer&) = delete;
  MockModelServer& operator=(const MockModelServer&) = delete;

  // Binds and serves on a background thread. port 0 picks a free port.
  // Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);

  // Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);

  void stop();
  int port() const noexcept { return port_; }
  std::string url() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace modelprobe::gateway
