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

#include <cctype>

#include "httplib.h"

#include "modelprobe/gateway/gateway.hpp"

namespace modelprobe::gateway {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // /path?query
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    fail(ErrorCode::kInvalidArgument, "endpoint URL must include a scheme: " + url);
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    fail(ErrorCode::kInvalidArgument, "unsupported URL scheme: " + scheme);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(HttpTransportOptions options) : options_(std::move(options)) {}

  HttpResponse send(const HttpRequest& request) override {
    const SplitUrl url = split_url(request.url);
    httplib::Client client(url.origin);
    client.set_connection_timeout(options_.connect_timeout);
    client.set_read_timeout(options_.read_timeout);
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
    client.enable_server_certificate_verification(options_.verify_tls);
    if (!options_.ca_cert_path.empty()) client.set_ca_cert_path(options_.ca_cert_path);
#endif
    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [name, value] : request.headers) {
      if (iequals(name, "Content-Type")) {
        content_type = value;
      } else {
        headers.emplace(name, value);
      }
    }

    // GET carries the rendered body in the `payload` query parameter.
    httplib::Result result =
        request.method == "GET"
            ? client.Get(request.body.empty()
                             ? url.target
                             : url.target + (url.target.find('?') == std::string::npos ? "?" : "&") +
                                   "payload=" + httplib::detail::encode_query_param(request.body),
                         headers)
            : client.Post(url.target, headers, request.body, content_type);
    if (!result) {
      throw TransportError("transport error contacting " + url.origin + ": " +
                           httplib::to_string(result.error()));
    }
    return HttpResponse{result->status, result->body};
  }

 private:
  HttpTransportOptions options_;
};

}  // namespace

std::shared_ptr<Transport> make_http_transport(HttpTransportOptions options) {
  return std::make_shared<HttpTransport>(std::move(options));
}

}  // namespace modelprobe::gateway
