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

#include "modelprobe/service/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>

#include "modelprobe/common/error.hpp"
#include "modelprobe/common/ids.hpp"
#include "modelprobe/common/random.hpp"
#include "modelprobe/datamodel/catalog.hpp"

namespace modelprobe::service {

struct Orchestrator::Control {
  std::string collection_id;
  std::atomic<bool> cancel{false};
  std::thread coordinator;
  std::mutex mu;
  std::condition_variable cv;
  bool done = false;
};

namespace {

struct RunContext {
  Run run;
  RunCollection collection;
  RunConfiguration config;
  TestSubject subject;
  PropertyDefinition property;
};

RunContext context_of(const Store& store, std::string_view run_id) {
  RunContext ctx;
  ctx.run = store.get_run(run_id);
  ctx.collection = store.get_collection(ctx.run.run_collection_id);
  ctx.config = store.get_config(ctx.collection.run_configuration_id);
  ctx.subject = store.get_subject(ctx.config.test_subject_id);
  ctx.property = store.get_property(ctx.run.property_id);
  return ctx;
}

std::shared_ptr<const testers::Tester> tester_of(const PropertyDefinition& def) {
  auto tester = testers::find_tester(def.tester);
  if (!tester) fail(ErrorCode::kFailedPrecondition, "no tester named '" + def.tester + "' is registered");
  return tester;
}

std::vector<TestResult> judge_batch(const testers::Tester& tester, std::span<const TestCase> cases,
                                    const gateway::PredictorHandle& predictor, const testers::TesterInput& input) {
  const auto outcomes = testers::predict_cases(cases, predictor);
  std::vector<TestResult> out;
  out.reserve(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    TestResult r;
    try {
      r = tester.judge(cases[i], outcomes[i], input);
    } catch (const std::exception& e) {
      r = TestResult{};
      r.verdict = Verdict::kError;
      r.detail = std::string("judge failed: ") + e.what();
      for (const auto& o : outcomes[i]) r.predictions.push_back(o.prediction);
    }
    r.test_case_id = cases[i].id;
    r.run_id = cases[i].run_id;
    out.push_back(std::move(r));
  }
  return out;
}

std::string recommendation_for(const PropertyDefinition& def, const std::string& verdict) {
  const auto it = def.recommendations.find(verdict);
  return it != def.recommendations.end() && it->is_string() ? it->get<std::string>() : std::string();
}

std::map<std::string, double> generation_metrics(const Json& artifacts) {
  std::map<std::string, double> out;
  if (const auto it = artifacts.find("generation_metrics"); it != artifacts.end()) {
    for (auto m = it->begin(); m != it->end(); ++m) out[m.key()] = metric_value_from_json(m.value());
  }
  return out;
}

}  // namespace

void to_json(Json& j, const RunStatus& v) {
  j = Json{{"run_id", v.run_id},       {"property_id", v.property_id}, {"state", to_string(v.state)},
           {"status", v.status},       {"verdict", v.verdict},         {"error", v.error}};
}

void to_json(Json& j, const CollectionStatus& v) {
  j = Json{{"collection_id", v.collection_id}, {"state", to_string(v.state)}, {"runs", v.runs}};
}

void to_json(Json& j, const FailurePage& v) {
  Json items = Json::array();
  for (const auto& item : v.items) items.push_back(Json{{"test_case", item.test_case}, {"result", item.result}});
  j = Json{{"run_id", v.run_id}, {"offset", v.offset}, {"limit", v.limit}, {"total", v.total}, {"items", items}};
}

void to_json(Json& j, const Reevaluation& v) {
  j = Json{{"run_id", v.run_id},
           {"cases", v.cases},
           {"identical", v.identical},
           {"changed", v.changed},
           {"persisted", v.persisted}};
}

std::uint64_t property_seed(std::uint64_t config_seed, std::string_view property_id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : property_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(config_seed, h);
}

Orchestrator::Orchestrator(std::shared_ptr<Store> store, OrchestratorOptions options)
    : store_(std::move(store)), options_(std::move(options)) {
  require(store_ != nullptr, "orchestrator needs a store");
  if (!options_.transport) options_.transport = gateway::make_http_transport();
  if (options_.batch_cases == 0) options_.batch_cases = 1;
}

Orchestrator::~Orchestrator() {
  std::vector<std::shared_ptr<Control>> all;
  {
    std::lock_guard lock(mu_);
    for (auto& [id, c] : controls_) all.push_back(c);
  }
  for (auto& c : all) {
    c->cancel = true;
    if (c->coordinator.joinable()) c->coordinator.join();
  }
}

std::size_t Orchestrator::recover_interrupted() {
  std::size_t count = 0;
  for (const auto& project : store_->list_projects()) {
    for (auto c : store_->list_collections(project.id)) {
      if (is_terminal(c.state) || control_for(c.id)) continue;
      for (const auto& run_id : c.runs) {
        auto run = store_->find_run(run_id);
        if (!run || is_terminal(run->state)) continue;
        run->state = CollectionState::kErrored;
        run->verdict = "error";
        run->error = "interrupted before completion";
        run->status = store_->status(run_id);
        run->finished_at = now_millis();
        store_->put_run(*run);
      }
      c.state = CollectionState::kErrored;
      c.error = "interrupted before completion";
      c.finished_at = now_millis();
      store_->put_collection(c);
      ++count;
    }
  }
  return count;
}

gateway::PredictorHandle Orchestrator::predictor_for(const TestSubject& subject) const {
  return gateway::PredictorHandle::connect(store_->get_model(subject.model_id), options_.transport,
                                           options_.gateway);
}

testers::TesterInput Orchestrator::tester_input(const RunConfiguration& config, const TestSubject& subject,
                                                const PropertyDefinition& def) const {
  testers::TesterInput in;
  in.property = def;
  const Json given = config.parameter_values.contains(def.id) ? config.parameter_values.at(def.id) : Json::object();
  in.parameters = bind_parameters(def, given);
  in.data_specific = config.data_specific;
  in.generation_limit = config.generation_limit;
  in.seed = property_seed(config.seed, def.id);
  const DataRef* training = subject.find_data(DataKind::kTraining);
  if (!training) fail(ErrorCode::kFailedPrecondition, "test subject has no training data");
  in.training = store_->read_data(*training);
  in.training_format = training->format;
  if (const DataRef* labeled = subject.find_data(DataKind::kLabeledEval)) {
    in.labeled = store_->read_data(*labeled);
    in.labeled_format = labeled->format;
  }
  return in;
}

std::string Orchestrator::execute_run(const RunRequest& request) {
  const RunConfiguration config = store_->get_config(request.run_configuration_id);
  const TestSubject subject = store_->get_subject(config.test_subject_id);
  if (!subject.find_data(DataKind::kTraining)) {
    fail(ErrorCode::kFailedPrecondition, "test subject has no training data");
  }
  require(!config.selected_properties.empty(), "configuration selects no property");
  for (const auto& id : config.selected_properties) {
    const PropertyDefinition def = store_->get_property(id);
    const Json given = config.parameter_values.contains(id) ? config.parameter_values.at(id) : Json::object();
    bind_parameters(def, given);
    tester_of(def);
  }

  std::lock_guard lock(mu_);
  if (!request.idempotency_key.empty()) {
    for (const auto& c : store_->list_collections(subject.project_id)) {
      if (c.idempotency_key == request.idempotency_key && c.run_configuration_id == config.id) return c.id;
    }
  }
  const gateway::PredictorHandle predictor = predictor_for(subject);
  if (!request.force && !predictor.probe()) {
    fail(ErrorCode::kUnavailable, "model endpoint is unreachable", "retry with force to run anyway");
  }

  RunCollection collection;
  collection.project_id = subject.project_id;
  collection.run_configuration_id = config.id;
  collection.state = CollectionState::kRunning;
  collection.started_at = now_millis();
  collection.idempotency_key = request.idempotency_key;
  collection = store_->put_collection(collection);
  for (const auto& id : config.selected_properties) {
    Run run;
    run.run_collection_id = collection.id;
    run.property_id = id;
    run.state = CollectionState::kPending;
    collection.runs.push_back(store_->put_run(run).id);
  }
  collection = store_->put_collection(collection);

  auto control = std::make_shared<Control>();
  control->collection_id = collection.id;
  controls_[collection.id] = control;
  control->coordinator = std::thread([this, control, collection, config, subject, predictor] {
    std::vector<std::thread> workers;
    for (const auto& run_id : collection.runs) {
      workers.emplace_back([&, run_id] { work(control, run_id, config, subject, predictor); });
    }
    for (auto& w : workers) w.join();
    RunCollection done = store_->get_collection(collection.id);
    bool all_errored = true;
    for (const auto& run_id : done.runs) all_errored = all_errored && store_->get_run(run_id).state == CollectionState::kErrored;
    if (control->cancel) {
      done.state = CollectionState::kCancelled;
    } else if (all_errored) {
      done.state = CollectionState::kErrored;
      done.error = "every run failed";
    } else {
      done.state = CollectionState::kCompleted;
    }
    done.finished_at = now_millis();
    store_->put_collection(done);
    std::lock_guard done_lock(control->mu);
    control->done = true;
    control->cv.notify_all();
  });
  return collection.id;
}

void Orchestrator::work(const std::shared_ptr<Control>& control, std::string run_id, const RunConfiguration& config,
                        const TestSubject& subject, const gateway::PredictorHandle& predictor) const {
  Run run = store_->get_run(run_id);
  PropertyDefinition def;
  try {
    run.state = CollectionState::kRunning;
    run.started_at = now_millis();
    store_->put_run(run);
    if (control->cancel) {
      run.state = CollectionState::kCancelled;
      run.finished_at = now_millis();
      store_->put_run(run);
      return;
    }
    def = store_->get_property(run.property_id);
    const auto tester = tester_of(def);
    const testers::TesterInput input = tester_input(config, subject, def);
    testers::Generation generation = tester->generate(input, predictor);
    run.warnings = generation.warnings;
    run.artifacts = generation.artifacts;
    Json gm = Json::object();
    for (const auto& [k, v] : generation.metrics) gm[k] = metric_value_to_json(v);
    run.artifacts["generation_metrics"] = gm;
    if (generation.artifacts.contains("skipped")) {
      run.state = CollectionState::kCompleted;
      run.verdict = "skipped";
      run.explanation = "Skipped: " + generation.artifacts.at("skipped").get<std::string>() + ".";
      run.finished_at = now_millis();
      store_->put_run(run);
      return;
    }
    const auto cases = store_->append_cases(run.id, std::move(generation.cases));
    store_->put_run(run);
    bool cancelled = false;
    for (std::size_t start = 0; start < cases.size(); start += options_.batch_cases) {
      if (control->cancel) {
        cancelled = true;
        break;
      }
      const std::size_t n = std::min(options_.batch_cases, cases.size() - start);
      const auto results = judge_batch(*tester, std::span(cases).subspan(start, n), predictor, input);
      store_->append_results(run.id, results);
    }
    finish_run(run, *tester, input);
    if (cancelled) {
      run.state = CollectionState::kCancelled;
      run.verdict.clear();
      run.recommendation.clear();
    } else {
      run.state = CollectionState::kCompleted;
    }
    run.finished_at = now_millis();
    store_->put_run(run);
  } catch (const std::exception& e) {
    run.state = CollectionState::kErrored;
    run.verdict = "error";
    run.error = e.what();
    run.recommendation = recommendation_for(def, "error");
    run.status = store_->status(run.id);
    run.finished_at = now_millis();
    store_->put_run(run);
  }
}

void Orchestrator::finish_run(Run& run, const testers::Tester& tester, const testers::TesterInput& input) const {
  const auto cases = store_->list_cases(run.id);
  const auto results = store_->list_results(run.id);
  const testers::Summary summary = tester.summarize(cases, results, input, run.artifacts);
  auto values = generation_metrics(run.artifacts);
  for (const auto& [k, v] : summary.metrics) values[k] = v;
  run.status = store_->status(run.id);
  run.metrics = testers::finalize_metrics(input.property, values, run.status, input.parameters);
  run.verdict = testers::run_verdict(run.metrics, run.status);
  run.recommendation = recommendation_for(input.property, run.verdict);
  run.explanation = summary.explanation;
  run.grid = summary.grid;
}

std::shared_ptr<Orchestrator::Control> Orchestrator::control_for(std::string_view collection_id) const {
  std::lock_guard lock(mu_);
  const auto it = controls_.find(collection_id);
  return it == controls_.end() ? nullptr : it->second;
}

CollectionStatus Orchestrator::poll_status(std::string_view collection_id) const {
  const RunCollection c = store_->get_collection(collection_id);
  CollectionStatus out;
  out.collection_id = c.id;
  out.state = c.state;
  for (const auto& run_id : c.runs) {
    const Run run = store_->get_run(run_id);
    RunStatus rs;
    rs.run_id = run.id;
    rs.property_id = run.property_id;
    rs.state = run.state;
    rs.status = store_->status(run.id);
    rs.verdict = run.verdict;
    rs.error = run.error;
    out.runs.push_back(std::move(rs));
  }
  return out;
}

void Orchestrator::cancel_run(std::string_view collection_id) {
  RunCollection c = store_->get_collection(collection_id);
  if (c.state == CollectionState::kCancelled) return;
  if (is_terminal(c.state)) {
    fail(ErrorCode::kFailedPrecondition, "collection is terminal", std::string(to_string(c.state)));
  }
  const auto control = control_for(collection_id);
  if (!control) {
    c.state = CollectionState::kCancelled;
    c.finished_at = now_millis();
    store_->put_collection(c);
    return;
  }
  control->cancel = true;
  std::unique_lock lock(control->mu);
  control->cv.wait(lock, [&] { return control->done; });
}

bool Orchestrator::wait(std::string_view collection_id, std::chrono::milliseconds timeout) {
  const auto control = control_for(collection_id);
  if (!control) return is_terminal(store_->get_collection(collection_id).state);
  std::unique_lock lock(control->mu);
  return control->cv.wait_for(lock, timeout, [&] { return control->done; });
}

Json Orchestrator::metric_report(std::string_view run_id) const {
  const Run run = store_->get_run(run_id);
  const auto def = store_->find_property(run.property_id);
  Json metrics = Json::array();
  for (const auto& m : run.metrics) {
    const MetricDef* md = def ? def->find_metric(m.name) : nullptr;
    metrics.push_back(Json{{"name", m.name},
                           {"value", metric_value_to_json(m.value)},
                           {"verdict", to_string(m.verdict)},
                           {"recommendation", m.recommendation},
                           {"description", md ? md->description : ""},
                           {"better", md ? md->better : ""}});
  }
  return Json{{"run_id", run.id},
              {"collection_id", run.run_collection_id},
              {"property_id", run.property_id},
              {"property_title", def ? def->title : run.property_id},
              {"state", to_string(run.state)},
              {"verdict", run.verdict},
              {"status", store_->status(run.id)},
              {"metrics", metrics},
              {"recommendation", run.recommendation},
              {"explanation", run.explanation},
              {"grid", run.grid},
              {"warnings", run.warnings},
              {"error", run.error}};
}

FailurePage Orchestrator::get_failures(std::string_view run_id, std::size_t offset, std::size_t limit) const {
  const Run run = store_->get_run(run_id);
  require(limit >= 1 && limit <= 1000, "limit must lie in [1, 1000]");
  std::map<std::string, TestCase> cases;
  for (auto& c : store_->list_cases(run.id)) cases.emplace(c.id, std::move(c));
  std::vector<FailureItem> failing;
  for (auto& r : store_->list_results(run.id)) {
    if (r.verdict != Verdict::kFail) continue;
    auto it = cases.find(r.test_case_id);
    if (it != cases.end()) failing.push_back({it->second, std::move(r)});
  }
  std::sort(failing.begin(), failing.end(),
            [](const FailureItem& a, const FailureItem& b) { return a.test_case.id < b.test_case.id; });
  FailurePage page;
  page.run_id = run.id;
  page.offset = offset;
  page.limit = limit;
  page.total = failing.size();
  for (std::size_t i = offset; i < failing.size() && i < offset + limit; ++i) page.items.push_back(failing[i]);
  return page;
}

Reevaluation Orchestrator::reevaluate(std::string_view run_id, bool persist) {
  const RunContext ctx = context_of(*store_, run_id);
  if (!is_terminal(ctx.run.state)) fail(ErrorCode::kFailedPrecondition, "run is still in progress");
  const auto tester = tester_of(ctx.property);
  const auto input = tester_input(ctx.config, ctx.subject, ctx.property);
  const auto predictor = predictor_for(ctx.subject);
  const auto cases = store_->list_cases(ctx.run.id);
  std::map<std::string, TestResult> previous;
  for (auto& r : store_->list_results(ctx.run.id)) previous.emplace(r.test_case_id, std::move(r));
  Reevaluation out;
  out.run_id = ctx.run.id;
  out.cases = cases.size();
  std::vector<TestResult> fresh;
  for (std::size_t start = 0; start < cases.size(); start += options_.batch_cases) {
    const std::size_t n = std::min(options_.batch_cases, cases.size() - start);
    for (auto& r : judge_batch(*tester, std::span(cases).subspan(start, n), predictor, input)) {
      const auto it = previous.find(r.test_case_id);
      if (it != previous.end() && it->second == r) {
        ++out.identical;
      } else {
        out.changed.push_back(r.test_case_id);
      }
      fresh.push_back(std::move(r));
    }
  }
  if (persist) {
    store_->append_results(ctx.run.id, fresh);
    recompute_metrics(ctx.run.id);
    out.persisted = true;
  }
  return out;
}

Run Orchestrator::recompute_metrics(std::string_view run_id) {
  RunContext ctx = context_of(*store_, run_id);
  if (!is_terminal(ctx.run.state)) fail(ErrorCode::kFailedPrecondition, "run is still in progress");
  if (ctx.run.verdict == "skipped") return ctx.run;
  const auto tester = tester_of(ctx.property);
  const auto input = tester_input(ctx.config, ctx.subject, ctx.property);
  finish_run(ctx.run, *tester, input);
  if (ctx.run.state == CollectionState::kCancelled) {
    ctx.run.verdict.clear();
    ctx.run.recommendation.clear();
  }
  return store_->put_run(ctx.run);
}

}  // namespace modelprobe::service
