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

// Command-line front end. Every command is one API request, sent either to
// an in-process API over a local store or to a running server.

#include <atomic>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "modelprobe/common/error.hpp"
#include "modelprobe/datamodel/operations.hpp"
#include "modelprobe/gateway/mock_models.hpp"
#include "modelprobe/gateway/mock_server.hpp"
#include "modelprobe/service/api.hpp"

namespace {

using modelprobe::Error;
using modelprobe::ErrorCode;
using modelprobe::Json;
using modelprobe::service::ApiRequest;
using modelprobe::service::ApiResponse;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

void wait_for_signal() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Inline JSON, or @path for a file holding it.
Json json_argument(const std::string& text, const std::string& what) {
  const std::string body = !text.empty() && text[0] == '@' ? read_file(text.substr(1)) : text;
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kInvalidArgument, what + " is not valid JSON");
  return j;
}

std::string show(const Json& v) {
  if (v.is_number_integer()) return v.dump();
  if (v.is_number()) {
    std::ostringstream out;
    out << std::setprecision(6) << v.get<double>();
    return out.str();
  }
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  return v.dump();
}

struct Settings {
  std::string store = "modelprobe-store";
  std::string server;
  std::size_t concurrency = 8;
  bool json = false;
};

class Backend {
 public:
  explicit Backend(const Settings& s) : settings_(s) {}

  ApiResponse call(const ApiRequest& request) {
    if (!settings_.server.empty()) return modelprobe::service::send_remote(settings_.server, request);
    return local().handle(request);
  }

  bool remote() const { return !settings_.server.empty(); }

 private:
  modelprobe::service::Api& local() {
    if (!api_) {
      store_ = modelprobe::open_file_store(settings_.store);
      modelprobe::ensure_builtin_catalog(*store_);
      modelprobe::service::OrchestratorOptions options;
      options.gateway.limiter = std::make_shared<modelprobe::gateway::RequestLimiter>(settings_.concurrency);
      orchestrator_ = std::make_unique<modelprobe::service::Orchestrator>(store_, options);
      api_ = std::make_unique<modelprobe::service::Api>(*orchestrator_);
    }
    return *api_;
  }

  const Settings& settings_;
  std::shared_ptr<modelprobe::Store> store_;
  std::unique_ptr<modelprobe::service::Orchestrator> orchestrator_;
  std::unique_ptr<modelprobe::service::Api> api_;
};

// Prints the body (JSON mode) or hands it to `human`. Returns the exit code.
int report(const Settings& s, const ApiResponse& r, const std::function<void(const Json&)>& human) {
  if (r.status >= 400) {
    if (s.json) {
      std::cout << r.body.dump(2) << "\n";
    } else {
      std::cerr << "error: " << show(r.body.value("code", Json("internal"))) << ": "
                << show(r.body.value("message", Json(""))) << "\n";
      const std::string detail = r.body.value("detail", std::string());
      if (!detail.empty()) std::cerr << "  " << detail << "\n";
    }
    return 1;
  }
  if (s.json) {
    std::cout << r.body.dump(2) << "\n";
  } else {
    human(r.body);
  }
  return 0;
}

void print_status(const Json& status) {
  std::cout << "collection " << show(status.at("collection_id")) << "  " << show(status.at("state")) << "\n";
  for (const auto& run : status.at("runs")) {
    const auto& s = run.at("status");
    std::cout << "  " << show(run.at("property_id")) << "  run " << show(run.at("run_id")) << "  "
              << show(run.at("state")) << "  generated " << show(s.at("generated")) << "  executed "
              << show(s.at("executed")) << "  pass " << show(s.at("passed")) << "  fail " << show(s.at("failed"))
              << "  error " << show(s.at("errored"));
    if (!run.value("verdict", std::string()).empty()) std::cout << "  verdict " << show(run.at("verdict"));
    std::cout << "\n";
    if (!run.value("error", std::string()).empty()) std::cout << "    " << show(run.at("error")) << "\n";
  }
}

void print_metrics(const Json& m) {
  std::cout << show(m.at("property_title")) << " (" << show(m.at("property_id")) << ")  run " << show(m.at("run_id"))
            << "  " << show(m.at("state")) << "  verdict " << show(m.at("verdict")) << "\n";
  for (const auto& metric : m.at("metrics")) {
    std::cout << "  " << show(metric.at("name")) << " = " << show(metric.at("value")) << "  ["
              << show(metric.at("verdict")) << "]\n";
  }
  if (!m.value("explanation", std::string()).empty()) std::cout << "\n" << show(m.at("explanation")) << "\n";
  if (!m.value("recommendation", std::string()).empty()) {
    std::cout << "Recommendation: " << show(m.at("recommendation")) << "\n";
  }
  for (const auto& w : m.at("warnings")) std::cout << "warning: " << show(w) << "\n";
  if (!m.value("error", std::string()).empty()) std::cout << "error: " << show(m.at("error")) << "\n";
}

void print_failures(const Json& page) {
  const std::size_t offset = page.at("offset");
  const std::size_t shown = page.at("items").size();
  std::cout << "failures " << (shown ? offset + 1 : 0) << "-" << offset + shown << " of " << show(page.at("total"))
            << "\n";
  for (const auto& item : page.at("items")) {
    const auto& c = item.at("test_case");
    const auto& r = item.at("result");
    std::cout << "case " << show(c.at("id")) << ": " << show(r.at("detail")) << "\n";
    const auto& samples = c.at("samples");
    const auto& tags = c.at("role_tags");
    for (std::size_t i = 0; i < samples.size() && i < 8; ++i) {
      std::cout << "  " << show(tags.at(i)) << "  " << samples.at(i).dump() << "\n";
    }
    if (samples.size() > 8) std::cout << "  ... " << samples.size() - 8 << " more samples\n";
  }
}

void print_compare(const Json& c) {
  std::cout << "property / metric";
  for (const auto& col : c.at("collections")) std::cout << "  |  " << show(col.at("id"));
  std::cout << "\n";
  for (const auto& row : c.at("rows")) {
    std::cout << show(row.at("property")) << " / " << show(row.at("metric"));
    for (const auto& v : row.at("values")) std::cout << "  |  " << show(v);
    if (!row.value("best", Json()).is_null()) std::cout << "  (best " << show(row.at("best")) << ")";
    std::cout << "\n";
  }
}

bool terminal_state(const std::string& state) {
  return state == "completed" || state == "cancelled" || state == "errored";
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  CLI::App app{"Black-box property testing for deployed ML models."};
  app.require_subcommand(1);
  app.add_option("--store", s.store, "Store directory (local mode)")->envname("MODELPROBE_STORE");
  app.add_option("--server", s.server, "API base URL, e.g. http://127.0.0.1:8080 (remote mode)")
      ->envname("MODELPROBE_SERVER");
  app.add_option("--concurrency", s.concurrency, "Cap on in-flight model requests")
      ->envname("MODELPROBE_CONCURRENCY")
      ->check(CLI::PositiveNumber);
  app.add_flag("--json", s.json, "Print raw JSON responses");

  Backend backend(s);
  int exit_code = 0;

  // project
  auto* project = app.add_subcommand("project", "Create or list projects");
  project->require_subcommand(1);
  std::string project_name;
  auto* project_create = project->add_subcommand("create", "Create a project");
  project_create->add_option("name", project_name)->required();
  project_create->callback([&] {
    exit_code = report(s, backend.call({"POST", "/projects", {}, Json{{"name", project_name}}.dump()}),
                       [](const Json& p) { std::cout << "project " << show(p.at("id")) << "  " << show(p.at("name")) << "\n"; });
  });
  project->add_subcommand("list", "List projects")->callback([&] {
    exit_code = report(s, backend.call({"GET", "/projects", {}, ""}), [](const Json& list) {
      for (const auto& p : list) std::cout << show(p.at("id")) << "  " << show(p.at("name")) << "\n";
    });
  });

  // model register
  auto* model = app.add_subcommand("model", "Register models under test");
  model->require_subcommand(1);
  auto* model_register = model->add_subcommand("register", "Register a model endpoint with its training data");
  std::string m_project, m_spec, m_name, m_endpoint, m_method, m_template, m_label_path, m_confidence_path;
  std::string m_training, m_format = "csv-table", m_labeled, m_labeled_format;
  std::vector<std::string> m_headers;
  std::size_t m_batch = 0;
  model_register->add_option("--project", m_project, "Project id")->required();
  model_register->add_option("--spec", m_spec, "Model spec JSON file; flags below override its fields");
  model_register->add_option("--name", m_name, "Model name");
  model_register->add_option("--endpoint", m_endpoint, "Prediction endpoint URL");
  model_register->add_option("--method", m_method, "POST or GET");
  model_register->add_option("--header", m_headers, "Request header 'Name: value' (repeatable)");
  model_register->add_option("--template", m_template, "Request body template with {{SAMPLES}} or {{SAMPLE}}");
  model_register->add_option("--label-path", m_label_path, "JSONPath to the predicted labels");
  model_register->add_option("--confidence-path", m_confidence_path, "JSONPath to confidences");
  model_register->add_option("--batch-limit", m_batch, "Samples per request");
  model_register->add_option("--training", m_training, "Training data file")->required()->check(CLI::ExistingFile);
  model_register->add_option("--format", m_format, "csv-table, text-lines or timeseries-csv");
  model_register->add_option("--labeled", m_labeled, "Labeled evaluation data file")->check(CLI::ExistingFile);
  model_register->add_option("--labeled-format", m_labeled_format, "Format of the labeled data (default: --format)");
  model_register->callback([&] {
    Json spec = m_spec.empty() ? Json::object() : json_argument("@" + m_spec, "model spec");
    if (!m_name.empty()) spec["name"] = m_name;
    if (!m_endpoint.empty()) spec["endpoint_url"] = m_endpoint;
    if (!m_method.empty()) spec["http_method"] = m_method;
    if (!m_template.empty()) spec["request_template"] = m_template;
    if (!m_label_path.empty()) spec["label_path"] = m_label_path;
    if (!m_confidence_path.empty()) spec["confidence_path"] = m_confidence_path;
    if (m_batch > 0) spec["batch_limit"] = m_batch;
    if (!m_headers.empty()) {
      Json headers = Json::array();
      for (const auto& h : m_headers) {
        const auto colon = h.find(':');
        if (colon == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "header must be 'Name: value'");
        std::string value = h.substr(colon + 1);
        value.erase(0, value.find_first_not_of(' '));
        headers.push_back(Json::array({h.substr(0, colon), value}));
      }
      spec["headers"] = headers;
    }
    Json body{{"model", spec}, {"training", {{"format", m_format}, {"content", read_file(m_training)}}}};
    if (!m_labeled.empty()) {
      body["labeled_eval"] = Json{{"format", m_labeled_format.empty() ? m_format : m_labeled_format},
                                  {"content", read_file(m_labeled)}};
    }
    exit_code = report(s, backend.call({"POST", "/projects/" + m_project + "/subjects", {}, body.dump()}),
                       [](const Json& subj) {
                         const auto& props = subj.at("data_properties");
                         std::cout << "subject " << show(subj.at("id")) << "  model " << show(subj.at("model_id"))
                                   << "  modality " << show(props.value("modality", Json())) << "  columns "
                                   << props.value("columns", Json::array()).size() << "\n";
                       });
  });

  // config create
  auto* config = app.add_subcommand("config", "Create run configurations");
  config->require_subcommand(1);
  auto* config_create = config->add_subcommand("create", "Select properties and bind their parameters");
  std::string c_subject, c_file, c_params, c_inputs;
  std::vector<std::string> c_properties;
  std::optional<std::size_t> c_limit;
  std::optional<std::uint64_t> c_seed;
  config_create->add_option("--subject", c_subject, "Test subject id")->required();
  config_create->add_option("--property", c_properties, "Property id (repeatable, or comma separated)")
      ->delimiter(',');
  config_create->add_option("--file", c_file, "Configuration JSON file; flags override its fields");
  config_create->add_option("--params", c_params, "Parameter values {property: {name: value}} as JSON or @file");
  config_create->add_option("--inputs", c_inputs, "Shared inputs (protected_attributes, ...) as JSON or @file");
  config_create->add_option("--limit", c_limit, "Generation limit (source samples per property)");
  config_create->add_option("--seed", c_seed, "Random seed");
  config_create->callback([&] {
    Json body = c_file.empty() ? Json::object() : json_argument("@" + c_file, "configuration");
    if (!c_properties.empty()) body["selected_properties"] = c_properties;
    if (!c_params.empty()) body["parameter_values"] = json_argument(c_params, "--params");
    if (!c_inputs.empty()) body["data_specific"] = json_argument(c_inputs, "--inputs");
    if (c_limit) body["generation_limit"] = *c_limit;
    if (c_seed) body["seed"] = *c_seed;
    exit_code = report(s, backend.call({"POST", "/subjects/" + c_subject + "/configs", {}, body.dump()}),
                       [](const Json& cfg) {
                         std::cout << "config " << show(cfg.at("id")) << "  properties";
                         for (const auto& p : cfg.at("selected_properties")) std::cout << " " << show(p);
                         std::cout << "\n";
                       });
  });

  // run ...
  auto* run = app.add_subcommand("run", "Execute and inspect test runs");
  run->require_subcommand(1);
  auto* run_exec = run->add_subcommand("exec", "Execute a configuration and wait for it to finish");
  std::string r_config, r_key;
  bool r_force = false, r_no_wait = false;
  double r_timeout = 600, r_poll = 0.5;
  run_exec->add_option("--config", r_config, "Run configuration id")->required();
  run_exec->add_option("--idempotency-key", r_key, "Retries with the same key reuse the collection");
  run_exec->add_flag("--force", r_force, "Run even if the model fails its health probe");
  run_exec->add_flag("--no-wait", r_no_wait, "Return after starting (remote mode only)");
  run_exec->add_option("--timeout", r_timeout, "Seconds to wait for completion")->check(CLI::PositiveNumber);
  run_exec->add_option("--poll", r_poll, "Seconds between status polls")->check(CLI::PositiveNumber);
  run_exec->callback([&] {
    const Json body{{"idempotency_key", r_key}, {"force", r_force}};
    const ApiResponse started = backend.call({"POST", "/configs/" + r_config + "/run", {}, body.dump()});
    if (started.status >= 400) {
      exit_code = report(s, started, [](const Json&) {});
      return;
    }
    const std::string id = started.body.at("collection_id");
    if (r_no_wait && backend.remote()) {
      exit_code = report(s, started, [&](const Json&) { std::cout << "collection " << id << " started\n"; });
      return;
    }
    if (!s.json) std::cout << "collection " << id << " started\n";
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(r_timeout);
    std::string last_line;
    ApiResponse status;
    while (true) {
      status = backend.call({"GET", "/collections/" + id + "/status", {}, ""});
      if (status.status >= 400) {
        exit_code = report(s, status, [](const Json&) {});
        return;
      }
      const std::string state = status.body.at("state");
      if (!s.json) {
        std::ostringstream line;
        for (const auto& r : status.body.at("runs")) {
          line << show(r.at("property_id")) << " " << show(r.at("status").at("executed")) << "/"
               << show(r.at("status").at("generated")) << "  ";
        }
        if (line.str() != last_line) std::cout << "  " << state << "  " << line.str() << "\n";
        last_line = line.str();
      }
      if (terminal_state(state)) break;
      if (std::chrono::steady_clock::now() > deadline) {
        std::cerr << "error: collection " << id << " still running after " << r_timeout << " s\n";
        exit_code = 4;
        return;
      }
      std::this_thread::sleep_for(std::chrono::duration<double>(r_poll));
    }
    exit_code = report(s, status, print_status);
    if (exit_code == 0 && status.body.at("state") != "completed") exit_code = 3;
  });

  std::string r_collection, r_run;
  auto* run_status = run->add_subcommand("status", "Show a collection's progress");
  run_status->add_option("collection", r_collection)->required();
  run_status->callback([&] {
    exit_code = report(s, backend.call({"GET", "/collections/" + r_collection + "/status", {}, ""}), print_status);
  });

  auto* run_metrics = run->add_subcommand("metrics", "Show a run's metrics, verdicts and recommendation");
  run_metrics->add_option("run", r_run)->required();
  run_metrics->callback([&] {
    exit_code = report(s, backend.call({"GET", "/runs/" + r_run + "/metrics", {}, ""}), print_metrics);
  });

  std::size_t r_offset = 0, r_limit = 10;
  auto* run_failures = run->add_subcommand("failures", "Page through a run's failing test cases");
  run_failures->add_option("run", r_run)->required();
  run_failures->add_option("--offset", r_offset, "First failure to show");
  run_failures->add_option("--limit", r_limit, "Failures per page");
  run_failures->callback([&] {
    exit_code = report(s,
                       backend.call({"GET",
                                     "/runs/" + r_run + "/failures",
                                     {{"offset", std::to_string(r_offset)}, {"limit", std::to_string(r_limit)}},
                                     ""}),
                       print_failures);
  });

  std::string r_project;
  std::vector<std::string> r_collections;
  auto* run_compare = run->add_subcommand("compare", "Compare metrics across collections");
  run_compare->add_option("--project", r_project, "Project id")->required();
  run_compare->add_option("collections", r_collections, "Collection ids")->required();
  run_compare->callback([&] {
    std::string list;
    for (const auto& c : r_collections) list += (list.empty() ? "" : ",") + c;
    exit_code = report(s, backend.call({"GET", "/projects/" + r_project + "/compare", {{"collections", list}}, ""}),
                       print_compare);
  });

  auto* run_cancel = run->add_subcommand("cancel", "Cancel a running collection");
  run_cancel->add_option("collection", r_collection)->required();
  run_cancel->callback([&] {
    exit_code = report(s, backend.call({"DELETE", "/collections/" + r_collection, {}, ""}), [](const Json& b) {
      std::cout << "collection " << show(b.at("collection_id")) << "  " << show(b.at("state")) << "\n";
    });
  });

  bool r_persist = false;
  auto* run_reeval = run->add_subcommand("reevaluate", "Re-predict a run's stored cases and compare results");
  run_reeval->add_option("run", r_run)->required();
  run_reeval->add_flag("--persist", r_persist, "Store the new results and recompute metrics");
  run_reeval->callback([&] {
    exit_code = report(s,
                       backend.call({"POST", "/runs/" + r_run + "/reevaluate", {}, Json{{"persist", r_persist}}.dump()}),
                       [](const Json& b) {
                         std::cout << show(b.at("identical")) << " of " << show(b.at("cases"))
                                   << " cases reproduced identically";
                         if (!b.at("changed").empty()) std::cout << "; changed: " << b.at("changed").dump();
                         std::cout << "\n";
                       });
  });

  // properties
  app.add_subcommand("properties", "List the property catalog")->callback([&] {
    exit_code = report(s, backend.call({"GET", "/properties", {}, ""}), [](const Json& list) {
      for (const auto& p : list) {
        std::cout << show(p.at("id")) << "  (" << show(p.at("modality")) << ")  " << show(p.at("title")) << "\n";
        for (const auto& param : p.at("parameter_defs")) {
          std::cout << "    " << show(param.at("name")) << " = " << show(param.at("default")) << "\n";
        }
      }
    });
  });

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API over the local store");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host, "Bind address")->envname("MODELPROBE_HOST");
  serve->add_option("--port", port, "Port (0 picks a free one)")->envname("MODELPROBE_PORT");
  serve->callback([&] {
    auto store = modelprobe::open_file_store(s.store);
    modelprobe::ensure_builtin_catalog(*store);
    modelprobe::service::OrchestratorOptions options;
    options.gateway.limiter = std::make_shared<modelprobe::gateway::RequestLimiter>(s.concurrency);
    modelprobe::service::Orchestrator orchestrator(store, options);
    const std::size_t recovered = orchestrator.recover_interrupted();
    modelprobe::service::Api api(orchestrator);
    modelprobe::service::ApiServer server(api);
    const int bound = server.start(host, port);
    if (recovered) std::cout << "marked " << recovered << " interrupted collection(s) as errored\n";
    std::cout << "listening on http://" << host << ":" << bound << std::endl;
    wait_for_signal();
    server.stop();
  });

  // mock-model serve
  auto* mock = app.add_subcommand("mock-model", "Deterministic stand-in models");
  mock->require_subcommand(1);
  auto* mock_serve = mock->add_subcommand("serve", "Serve a mock model over HTTP");
  std::string kind, mock_params, samples_path = "$.instances";
  int mock_port = 0;
  std::string mock_host = "127.0.0.1";
  mock_serve->add_option("--kind", kind, "Model kind")->required();
  mock_serve->add_option("--port", mock_port, "Port (0 picks a free one)");
  mock_serve->add_option("--host", mock_host, "Bind address");
  mock_serve->add_option("--params", mock_params, "Model parameters as JSON or @file");
  mock_serve->add_option("--samples-path", samples_path, "JSONPath to the samples in request bodies");
  mock_serve->callback([&] {
    const Json params = mock_params.empty() ? Json::object() : json_argument(mock_params, "--params");
    modelprobe::gateway::MockModelServer server(modelprobe::gateway::MockModel::from_name(kind, params), samples_path);
    const int bound = server.start(mock_host, mock_port);
    std::cout << "mock model " << kind << " listening on http://" << mock_host << ":" << bound << "/predict"
              << std::endl;
    wait_for_signal();
    server.stop();
  });
  mock->add_subcommand("kinds", "List mock model kinds")->callback([&] {
    for (auto k : modelprobe::gateway::mock_kind_names()) std::cout << k << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << modelprobe::error_code_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
