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

#include "modelprobe/testers/tester.hpp"

#include <cmath>
#include <mutex>
#include <unordered_map>

#include "modelprobe/common/error.hpp"
#include "modelprobe/datamodel/catalog.hpp"
#include "modelprobe/testers/builtin.hpp"

namespace modelprobe::testers {
namespace {

struct Registry {
  std::mutex mu;
  std::map<std::string, std::shared_ptr<const Tester>, std::less<>> testers;
  bool builtins_loaded = false;
};

Registry& registry() {
  static Registry r;
  return r;
}

void load_builtins_locked(Registry& r) {
  if (r.builtins_loaded) return;
  r.builtins_loaded = true;
  for (auto& [name, tester] : builtin_testers()) r.testers.emplace(name, std::move(tester));
}

double ratio(std::size_t a, std::size_t b) {
  return b == 0 ? std::nan("") : static_cast<double>(a) / static_cast<double>(b);
}

double status_metric(std::string_view source, const StatusSnapshot& s) {
  if (source == "status:fail_rate") return ratio(s.failed, s.passed + s.failed);
  if (source == "status:pass_rate") return ratio(s.passed, s.passed + s.failed);
  if (source == "status:error_rate") return ratio(s.errored, s.executed);
  if (source == "status:executed") return static_cast<double>(s.executed);
  if (source == "status:generated") return static_cast<double>(s.generated);
  fail(ErrorCode::kInvalidArgument, "unknown metric source '" + std::string(source) + "'");
}

}  // namespace

void register_tester(const std::string& name, std::shared_ptr<const Tester> tester) {
  require(tester != nullptr, "tester must not be null");
  auto& r = registry();
  std::lock_guard lock(r.mu);
  load_builtins_locked(r);
  r.testers[name] = std::move(tester);
}

std::shared_ptr<const Tester> find_tester(std::string_view name) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  load_builtins_locked(r);
  auto it = r.testers.find(name);
  return it == r.testers.end() ? nullptr : it->second;
}

std::vector<std::string> tester_names() {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  load_builtins_locked(r);
  std::vector<std::string> names;
  for (const auto& [name, _] : r.testers) names.push_back(name);
  return names;
}

std::vector<RunMetric> finalize_metrics(const PropertyDefinition& def, const std::map<std::string, double>& values,
                                        const StatusSnapshot& status, const Json& parameters) {
  std::vector<RunMetric> out;
  for (const auto& m : def.metric_defs) {
    RunMetric rm;
    rm.name = m.name;
    if (m.source == "tester") {
      auto it = values.find(m.name);
      rm.value = it == values.end() ? std::nan("") : it->second;
    } else {
      rm.value = status_metric(m.source, status);
    }
    rm.verdict = evaluate_metric(m, rm.value, parameters);
    if (rm.verdict != MetricVerdict::kInformational && def.recommendations.is_object()) {
      const char* key = rm.verdict == MetricVerdict::kPass ? "pass" : "fail";
      rm.recommendation = def.recommendations.value(key, std::string());
    }
    out.push_back(std::move(rm));
  }
  return out;
}

std::string run_verdict(const std::vector<RunMetric>& metrics, const StatusSnapshot& status) {
  if (status.executed == 0 || status.errored == status.executed) return "error";
  bool has_rule = false;
  for (const auto& m : metrics) {
    if (m.verdict == MetricVerdict::kInformational) continue;
    has_rule = true;
    if (m.verdict == MetricVerdict::kFail) return "fail";
  }
  if (!has_rule && status.failed > 0) return "fail";
  return "pass";
}

std::vector<std::vector<gateway::PredictionOutcome>> predict_cases(std::span<const TestCase> cases,
                                                                  const gateway::PredictorHandle& predictor) {
  std::vector<gateway::Sample> unique;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<std::size_t>> slots(cases.size());
  for (std::size_t c = 0; c < cases.size(); ++c) {
    for (const auto& s : cases[c].samples) {
      auto [it, inserted] = index.emplace(s.dump(), unique.size());
      if (inserted) unique.push_back(s);
      slots[c].push_back(it->second);
    }
  }
  const auto outcomes = predictor.predict_batch(unique);
  std::vector<std::vector<gateway::PredictionOutcome>> out(cases.size());
  for (std::size_t c = 0; c < cases.size(); ++c) {
    for (std::size_t i : slots[c]) out[c].push_back(outcomes[i]);
  }
  return out;
}

StatusSnapshot count_status(std::size_t generated, std::span<const TestResult> results) {
  StatusSnapshot s;
  s.generated = generated;
  for (const auto& r : results) {
    ++s.executed;
    switch (r.verdict) {
      case Verdict::kPass: ++s.passed; break;
      case Verdict::kFail: ++s.failed; break;
      case Verdict::kError: ++s.errored; break;
    }
  }
  return s;
}

LocalRun run_locally(const Tester& tester, const TesterInput& input, const gateway::PredictorHandle& predictor) {
  LocalRun run;
  run.generation = tester.generate(input, predictor);
  auto& cases = run.generation.cases;
  for (std::size_t i = 0; i < cases.size(); ++i) cases[i].id = "case-" + std::to_string(i);
  const auto outcomes = predict_cases(cases, predictor);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    TestResult r = tester.judge(cases[i], outcomes[i], input);
    r.test_case_id = cases[i].id;
    run.results.push_back(std::move(r));
  }
  run.summary = tester.summarize(cases, run.results, input, run.generation.artifacts);
  run.status = count_status(cases.size(), run.results);
  auto values = run.generation.metrics;
  for (const auto& [k, v] : run.summary.metrics) values[k] = v;
  run.metrics = finalize_metrics(input.property, values, run.status, input.parameters);
  run.verdict = run.generation.artifacts.contains("skipped") ? "skipped" : run_verdict(run.metrics, run.status);
  return run;
}

Json count_grid(const std::vector<std::pair<std::string, std::string>>& pairs, std::string row_title,
                std::string column_title) {
  std::vector<std::string> rows, cols;
  std::map<std::pair<std::string, std::string>, double> counts;
  auto add = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  for (const auto& [r, c] : pairs) {
    add(rows, r);
    add(cols, c);
    counts[{r, c}] += 1.0;
  }
  std::sort(rows.begin(), rows.end());
  std::sort(cols.begin(), cols.end());
  Json values = Json::array();
  for (const auto& r : rows) {
    double total = 0.0;
    for (const auto& c : cols) total += counts[{r, c}];
    Json line = Json::array();
    for (const auto& c : cols) line.push_back(total > 0 ? counts[{r, c}] / total : 0.0);
    values.push_back(line);
  }
  return Json{{"row_title", row_title}, {"column_title", column_title}, {"rows", rows}, {"columns", cols},
              {"values", values}};
}

}  // namespace modelprobe::testers
