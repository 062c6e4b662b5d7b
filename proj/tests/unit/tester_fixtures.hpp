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

// Building blocks for the tester suites: catalog lookups, bound inputs and
// in-process predictors over the mock models.

#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <span>
#include <string>

#include "modelprobe/common/error.hpp"
#include "modelprobe/datamodel/catalog.hpp"
#include "modelprobe/gateway/mock_models.hpp"
#include "modelprobe/testers/tester.hpp"

namespace modelprobe::testing {

inline PropertyDefinition builtin(const std::string& id) {
  for (auto& p : builtin_properties()) {
    if (p.id == id) return p;
  }
  fail(ErrorCode::kNotFound, "no built-in property " + id);
}

inline testers::TesterInput tester_input(const std::string& property_id, std::string training,
                                         Json data_specific = Json::object(), Json parameters = Json::object()) {
  testers::TesterInput in;
  in.property = builtin(property_id);
  in.parameters = bind_parameters(in.property, parameters);
  in.data_specific = std::move(data_specific);
  in.training = std::move(training);
  return in;
}

// Counts every sample it is asked about.
inline gateway::PredictorHandle mock_handle(const std::string& kind, Json params = Json::object(),
                                            std::shared_ptr<std::atomic<std::size_t>> calls = nullptr) {
  auto model = gateway::MockModel::from_name(kind, std::move(params));
  return gateway::PredictorHandle::from_function(kind, [model, calls](const gateway::Sample& s) {
    if (calls) ++*calls;
    return gateway::PredictionOutcome{gateway::mock_predict(model, s), ""};
  });
}

// Writes down everything a tester is handed.
class SpyTester final : public testers::Tester {
 public:
  testers::Generation generate(const testers::TesterInput& input,
                               const gateway::PredictorHandle& predictor) const override {
    record(Json(input.property).dump());
    record(input.parameters.dump());
    record(input.data_specific.dump());
    record(input.training);
    record(input.labeled.value_or(""));
    record(predictor.describe().dump());
    const Json sample = Json{{"x", 0.7}};
    for (const auto& o : predictor.predict_batch(std::span(&sample, 1))) {
      record(o.error);
      if (o.prediction) record(Json(*o.prediction).dump());
    }
    testers::Generation g;
    TestCase c;
    c.samples = {sample};
    c.role_tags = {"original"};
    g.cases.push_back(c);
    return g;
  }
  TestResult judge(const TestCase& c, std::span<const gateway::PredictionOutcome> outcomes,
                   const testers::TesterInput&) const override {
    TestResult r;
    r.test_case_id = c.id;
    for (const auto& o : outcomes) {
      record(o.error);
      if (o.prediction) record(Json(*o.prediction).dump());
      r.predictions.push_back(o.prediction);
    }
    r.verdict = Verdict::kPass;
    return r;
  }
  testers::Summary summarize(std::span<const TestCase>, std::span<const TestResult> results,
                             const testers::TesterInput&, const Json& artifacts) const override {
    record(artifacts.dump());
    for (const auto& r : results) record(Json(r).dump());
    return {};
  }

  std::string seen() const {
    std::lock_guard lock(mu_);
    return seen_;
  }

 private:
  void record(const std::string& s) const {
    std::lock_guard lock(mu_);
    seen_ += s + "\n";
  }
  mutable std::mutex mu_;
  mutable std::string seen_;
};

}  // namespace modelprobe::testing
