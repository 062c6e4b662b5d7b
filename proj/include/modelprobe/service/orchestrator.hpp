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

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "modelprobe/common/json.hpp"
#include "modelprobe/datamodel/store.hpp"
#include "modelprobe/gateway/gateway.hpp"
#include "modelprobe/testers/tester.hpp"

namespace modelprobe::service {

struct OrchestratorOptions {
  // Defaults to the HTTP transport.
  std::shared_ptr<gateway::Transport> transport;
  gateway::GatewayOptions gateway;
  // Cases predicted between two cancellation checks.
  std::size_t batch_cases = 16;
};

struct RunRequest {
  std::string run_configuration_id;
  std::string idempotency_key;
  bool force = false;  // skip the health probe
};

struct RunStatus {
  std::string run_id;
  std::string property_id;
  CollectionState state = CollectionState::kPending;
  StatusSnapshot status;
  std::string verdict;
  std::string error;
};

struct CollectionStatus {
  std::string collection_id;
  CollectionState state = CollectionState::kPending;
  std::vector<RunStatus> runs;
};

struct FailureItem {
  TestCase test_case;
  TestResult result;
};

struct FailurePage {
  std::string run_id;
  std::size_t offset = 0;
  std::size_t limit = 0;
  std::size_t total = 0;  // failing cases in the run
  std::vector<FailureItem> items;
};

struct Reevaluation {
  std::string run_id;
  std::size_t cases = 0;
  std::size_t identical = 0;
  std::vector<std::string> changed;  // case ids whose result differs
  bool persisted = false;
};

void to_json(Json& j, const RunStatus& v);
void to_json(Json& j, const CollectionStatus& v);
void to_json(Json& j, const FailurePage& v);
void to_json(Json& j, const Reevaluation& v);

// Per-property tester seed: stable across processes for a given
// configuration seed and property id.
std::uint64_t property_seed(std::uint64_t config_seed, std::string_view property_id);

// Runs configurations in the background, one worker thread per selected
// property. Cases and results are persisted as they are produced, so status
// polls read the store.
class Orchestrator {
 public:
  explicit Orchestrator(std::shared_ptr<Store> store, OrchestratorOptions options = {});
  ~Orchestrator();  // cancels and waits for every collection
  Orchestrator(const Orchestrator&) = delete;
  Orchestrator& operator=(const Orchestrator&) = delete;

  // Marks collections an earlier process left running as errored. Call
  // only when no other process is executing against the same store.
  // Returns the number of collections touched.
  std::size_t recover_interrupted();

  // Returns the collection id. A repeated idempotency key for the same
  // configuration returns the earlier collection.
  std::string execute_run(const RunRequest& request);

  CollectionStatus poll_status(std::string_view collection_id) const;

  // Cooperative: workers stop at the next batch boundary, keep what they
  // persisted and end as cancelled. Blocks until they have stopped.
  // Cancelling a cancelled collection is a no-op; any other terminal state
  // is an error.
  void cancel_run(std::string_view collection_id);

  // False on timeout.
  bool wait(std::string_view collection_id,
            std::chrono::milliseconds timeout = std::chrono::milliseconds(120000));

  // Metric values, verdicts, recommendation, explanation and grid.
  Json metric_report(std::string_view run_id) const;

  FailurePage get_failures(std::string_view run_id, std::size_t offset, std::size_t limit) const;

  // Predicts every stored case again and judges it with the stored tester
  // state. With persist set, the new results are appended and the run's
  // metrics recomputed.
  Reevaluation reevaluate(std::string_view run_id, bool persist = false);

  // Recomputes metrics, verdict and grid of a finished run from its stored
  // cases and latest results.
  Run recompute_metrics(std::string_view run_id);

  Store& store() const noexcept { return *store_; }

 private:
  struct Control;

  gateway::PredictorHandle predictor_for(const TestSubject& subject) const;
  testers::TesterInput tester_input(const RunConfiguration& config, const TestSubject& subject,
                                    const PropertyDefinition& def) const;
  void work(const std::shared_ptr<Control>& control, std::string run_id, const RunConfiguration& config,
            const TestSubject& subject, const gateway::PredictorHandle& predictor) const;
  void finish_run(Run& run, const testers::Tester& tester, const testers::TesterInput& input) const;
  std::shared_ptr<Control> control_for(std::string_view collection_id) const;

  std::shared_ptr<Store> store_;
  OrchestratorOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Control>, std::less<>> controls_;
};

}  // namespace modelprobe::service
