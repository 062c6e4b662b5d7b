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

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>

#include "modelprobe/common/error.hpp"
#include "modelprobe/common/ids.hpp"
#include "modelprobe/datamodel/store.hpp"

namespace modelprobe {

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::kNotFound, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& p, std::string_view content) {
  fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kInternal, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) fail(ErrorCode::kInternal, "short write to " + tmp.string());
  }
  fs::rename(tmp, p);
}

void append_text(const fs::path& p, std::string_view content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::app);
  if (!out) fail(ErrorCode::kInternal, "cannot append to " + p.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) fail(ErrorCode::kInternal, "short append to " + p.string());
}

// Complete lines only: a torn trailing record from a crash is skipped.
std::vector<Json> read_jsonl(const fs::path& p) {
  std::vector<Json> out;
  if (!fs::exists(p)) return out;
  const std::string text = slurp(p);
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) break;
    const std::string_view line(text.data() + start, nl - start);
    if (!line.empty()) out.push_back(Json::parse(line));
    start = nl + 1;
  }
  return out;
}

template <typename T>
std::string jsonl(const std::vector<T>& items) {
  std::string out;
  for (const auto& item : items) {
    out += Json(item).dump();
    out += '\n';
  }
  return out;
}

std::string extension_for(DataFormat f) {
  switch (f) {
    case DataFormat::kCsvTable:
    case DataFormat::kTimeseriesCsv: return ".csv";
    case DataFormat::kTextLines: return ".txt";
  }
  return ".dat";
}

template <typename Map>
auto find_in(const Map& m, std::string_view key) -> std::optional<typename Map::mapped_type> {
  auto it = m.find(std::string(key));
  if (it == m.end()) return std::nullopt;
  return it->second;
}

struct RunCases {
  std::vector<TestCase> cases;
  std::map<std::string, std::size_t> position;  // case id -> index
  std::map<std::string, TestResult> latest;     // case id -> most recent result
};

class FileStore final : public Store {
 public:
  explicit FileStore(fs::path root) : root_(std::move(root)) {
    fs::create_directories(root_);
    load();
  }

  // --- projects ---------------------------------------------------------------------

  Project create_project(const std::string& name) override {
    require(!name.empty(), "project name must not be empty");
    std::unique_lock lock(mu_);
    for (const auto& [id, p] : projects_) {
      if (p.name == name) fail(ErrorCode::kConflict, "project '" + name + "' already exists");
    }
    Project p{new_id(), name, {}, now_millis()};
    projects_[p.id] = p;
    save_project(p);
    return p;
  }

  std::optional<Project> find_project(std::string_view id) const override {
    std::shared_lock lock(mu_);
    return find_in(projects_, id);
  }

  std::optional<Project> find_project_by_name(std::string_view name) const override {
    std::shared_lock lock(mu_);
    for (const auto& [id, p] : projects_) {
      if (p.name == name) return p;
    }
    return std::nullopt;
  }

  std::vector<Project> list_projects() const override {
    std::shared_lock lock(mu_);
    std::vector<Project> out;
    for (const auto& [id, p] : projects_) out.push_back(p);
    return out;
  }

  void delete_project(std::string_view id) override {
    std::unique_lock lock(mu_);
    const std::string pid(id);
    if (!projects_.erase(pid)) fail(ErrorCode::kNotFound, "unknown project " + pid);
    std::erase_if(models_, [&](const auto& e) { return e.second.first == pid; });
    std::erase_if(subjects_, [&](const auto& e) { return e.second.project_id == pid; });
    std::erase_if(configs_, [&](const auto& e) { return e.second.first == pid; });
    std::erase_if(collections_, [&](const auto& e) { return e.second.project_id == pid; });
    std::vector<std::string> dropped;
    for (const auto& [rid, entry] : runs_) {
      if (entry.first == pid) dropped.push_back(rid);
    }
    for (const auto& rid : dropped) {
      runs_.erase(rid);
      cases_.erase(rid);
    }
    fs::remove_all(root_ / pid);
  }

  // --- models and data ------------------------------------------------------------------

  gateway::ModelSpec put_model(const std::string& project_id, gateway::ModelSpec spec) override {
    std::unique_lock lock(mu_);
    require_project_locked(project_id);
    if (spec.id.empty()) spec.id = new_id();
    models_[spec.id] = {project_id, spec};
    save_index(project_id, "models", models_of(project_id));
    return spec;
  }

  std::optional<gateway::ModelSpec> find_model(std::string_view id) const override {
    std::shared_lock lock(mu_);
    auto it = models_.find(std::string(id));
    if (it == models_.end()) return std::nullopt;
    return it->second.second;
  }

  std::vector<gateway::ModelSpec> list_models(std::string_view project_id) const override {
    std::shared_lock lock(mu_);
    return models_of(std::string(project_id));
  }

  DataRef put_data(const std::string& project_id, DataRef ref, std::string_view content,
                   std::size_t row_count) override {
    std::unique_lock lock(mu_);
    require_project_locked(project_id);
    if (ref.id.empty()) ref.id = new_id();
    const fs::path rel = fs::path(project_id) / "data" / (ref.id + extension_for(ref.format));
    write_atomic(root_ / rel, content);
    ref.location = rel.generic_string();
    ref.row_count = row_count;
    return ref;
  }

  std::string read_data(const DataRef& ref) const override {
    const fs::path p = root_ / ref.location;
    if (ref.location.empty() || !fs::exists(p)) {
      fail(ErrorCode::kNotFound, "data " + ref.id + " is missing at '" + ref.location + "'");
    }
    return slurp(p);
  }

  // --- subjects ---------------------------------------------------------------------------

  TestSubject put_subject(TestSubject subject) override {
    std::unique_lock lock(mu_);
    Project& project = require_project_locked(subject.project_id);
    if (subject.id.empty()) subject.id = new_id();
    subjects_[subject.id] = subject;
    if (std::find(project.test_subjects.begin(), project.test_subjects.end(), subject.id) ==
        project.test_subjects.end()) {
      project.test_subjects.push_back(subject.id);
      save_project(project);
    }
    std::vector<TestSubject> all;
    for (const auto& [id, s] : subjects_) {
      if (s.project_id == subject.project_id) all.push_back(s);
    }
    save_index(subject.project_id, "subjects", all);
    return subject;
  }

  std::optional<TestSubject> find_subject(std::string_view id) const override {
    std::shared_lock lock(mu_);
    return find_in(subjects_, id);
  }

  std::vector<TestSubject> list_subjects(std::string_view project_id) const override {
    std::shared_lock lock(mu_);
    std::vector<TestSubject> out;
    for (const auto& [id, s] : subjects_) {
      if (s.project_id == project_id) out.push_back(s);
    }
    return out;
  }

  // --- properties -------------------------------------------------------------------------

  void put_property(const PropertyDefinition& def) override {
    std::unique_lock lock(mu_);
    auto it = std::find_if(properties_.begin(), properties_.end(),
                           [&](const PropertyDefinition& p) { return p.id == def.id; });
    if (it == properties_.end()) {
      properties_.push_back(def);
    } else {
      *it = def;
    }
    write_atomic(root_ / "properties.jsonl", jsonl(properties_));
  }

  std::optional<PropertyDefinition> find_property(std::string_view id) const override {
    std::shared_lock lock(mu_);
    for (const auto& p : properties_) {
      if (p.id == id) return p;
    }
    return std::nullopt;
  }

  std::vector<PropertyDefinition> list_properties() const override {
    std::shared_lock lock(mu_);
    return properties_;
  }

  // --- configurations ---------------------------------------------------------------------

  RunConfiguration put_config(RunConfiguration config) override {
    std::unique_lock lock(mu_);
    auto sit = subjects_.find(config.test_subject_id);
    if (sit == subjects_.end()) fail(ErrorCode::kNotFound, "unknown test subject " + config.test_subject_id);
    const std::string pid = sit->second.project_id;
    if (config.id.empty()) config.id = new_id();
    configs_[config.id] = {pid, config};
    std::vector<RunConfiguration> all;
    for (const auto& [id, e] : configs_) {
      if (e.first == pid) all.push_back(e.second);
    }
    save_index(pid, "configs", all);
    return config;
  }

  std::optional<RunConfiguration> find_config(std::string_view id) const override {
    std::shared_lock lock(mu_);
    auto it = configs_.find(std::string(id));
    if (it == configs_.end()) return std::nullopt;
    return it->second.second;
  }

  // --- collections and runs ----------------------------------------------------------------

  RunCollection put_collection(RunCollection collection) override {
    std::unique_lock lock(mu_);
    require_project_locked(collection.project_id);
    if (collection.id.empty()) collection.id = new_id();
    collections_[collection.id] = collection;
    std::vector<RunCollection> all;
    for (const auto& [id, c] : collections_) {
      if (c.project_id == collection.project_id) all.push_back(c);
    }
    save_index(collection.project_id, "collections", all);
    return collection;
  }

  std::optional<RunCollection> find_collection(std::string_view id) const override {
    std::shared_lock lock(mu_);
    return find_in(collections_, id);
  }

  std::vector<RunCollection> list_collections(std::string_view project_id) const override {
    std::shared_lock lock(mu_);
    std::vector<RunCollection> out;
    for (const auto& [id, c] : collections_) {
      if (c.project_id == project_id) out.push_back(c);
    }
    return out;
  }

  Run put_run(Run run) override {
    std::unique_lock lock(mu_);
    auto cit = collections_.find(run.run_collection_id);
    if (cit == collections_.end()) fail(ErrorCode::kNotFound, "unknown run collection " + run.run_collection_id);
    const std::string pid = cit->second.project_id;
    if (run.id.empty()) run.id = new_id();
    runs_[run.id] = {pid, run};
    std::vector<Run> all;
    for (const auto& [id, e] : runs_) {
      if (e.first == pid) all.push_back(e.second);
    }
    save_index(pid, "runs", all);
    return run;
  }

  std::optional<Run> find_run(std::string_view id) const override {
    std::shared_lock lock(mu_);
    auto it = runs_.find(std::string(id));
    if (it == runs_.end()) return std::nullopt;
    return it->second.second;
  }

  // --- cases and results --------------------------------------------------------------------

  std::vector<TestCase> append_cases(const std::string& run_id, std::vector<TestCase> cases) override {
    std::unique_lock lock(mu_);
    const std::string pid = project_of_run_locked(run_id);
    for (auto& c : cases) {
      require(!c.samples.empty(), "a test case needs at least one sample");
      require(c.role_tags.size() == c.samples.size(), "role_tags must match samples");
      if (c.id.empty()) c.id = new_id();
      c.run_id = run_id;
    }
    append_text(root_ / pid / "cases" / (run_id + ".jsonl"), jsonl(cases));
    RunCases& rc = cases_[run_id];
    for (const auto& c : cases) {
      rc.position[c.id] = rc.cases.size();
      rc.cases.push_back(c);
    }
    return cases;
  }

  void append_results(const std::string& run_id, std::span<const TestResult> results) override {
    std::unique_lock lock(mu_);
    const std::string pid = project_of_run_locked(run_id);
    RunCases& rc = cases_[run_id];
    std::vector<TestResult> stamped(results.begin(), results.end());
    for (auto& r : stamped) {
      if (!rc.position.contains(r.test_case_id)) {
        fail(ErrorCode::kNotFound, "result for unknown test case " + r.test_case_id);
      }
      r.run_id = run_id;
    }
    append_text(root_ / pid / "results" / (run_id + ".jsonl"), jsonl(stamped));
    for (auto& r : stamped) rc.latest[r.test_case_id] = std::move(r);
  }

  std::vector<TestCase> list_cases(std::string_view run_id) const override {
    std::shared_lock lock(mu_);
    auto it = cases_.find(std::string(run_id));
    if (it == cases_.end()) return {};
    return it->second.cases;
  }

  std::vector<TestResult> list_results(std::string_view run_id) const override {
    std::shared_lock lock(mu_);
    std::vector<TestResult> out;
    auto it = cases_.find(std::string(run_id));
    if (it == cases_.end()) return out;
    for (const auto& c : it->second.cases) {
      auto r = it->second.latest.find(c.id);
      if (r != it->second.latest.end()) out.push_back(r->second);
    }
    return out;
  }

  StatusSnapshot status(std::string_view run_id) const override {
    std::shared_lock lock(mu_);
    if (!runs_.contains(std::string(run_id))) fail(ErrorCode::kNotFound, "unknown run " + std::string(run_id));
    StatusSnapshot s;
    auto it = cases_.find(std::string(run_id));
    if (it == cases_.end()) return s;
    s.generated = it->second.cases.size();
    for (const auto& [cid, r] : it->second.latest) {
      ++s.executed;
      switch (r.verdict) {
        case Verdict::kPass: ++s.passed; break;
        case Verdict::kFail: ++s.failed; break;
        case Verdict::kError: ++s.errored; break;
      }
    }
    return s;
  }

 private:
  Project& require_project_locked(const std::string& id) {
    auto it = projects_.find(id);
    if (it == projects_.end()) fail(ErrorCode::kNotFound, "unknown project " + id);
    return it->second;
  }

  std::string project_of_run_locked(const std::string& run_id) const {
    auto it = runs_.find(run_id);
    if (it == runs_.end()) fail(ErrorCode::kNotFound, "unknown run " + run_id);
    return it->second.first;
  }

  std::vector<gateway::ModelSpec> models_of(const std::string& pid) const {
    std::vector<gateway::ModelSpec> out;
    for (const auto& [id, e] : models_) {
      if (e.first == pid) out.push_back(e.second);
    }
    return out;
  }

  void save_project(const Project& p) { write_atomic(root_ / p.id / "project.json", Json(p).dump(2) + "\n"); }

  template <typename T>
  void save_index(const std::string& pid, const char* kind, const std::vector<T>& items) {
    write_atomic(root_ / pid / kind / "index.jsonl", jsonl(items));
  }

  void load() {
    for (const auto& j : read_jsonl(root_ / "properties.jsonl")) properties_.push_back(j.get<PropertyDefinition>());
    for (const auto& entry : fs::directory_iterator(root_)) {
      if (!entry.is_directory() || !fs::exists(entry.path() / "project.json")) continue;
      const auto project = Json::parse(slurp(entry.path() / "project.json")).get<Project>();
      const fs::path dir = entry.path();
      projects_[project.id] = project;
      for (const auto& j : read_jsonl(dir / "models" / "index.jsonl")) {
        auto m = j.get<gateway::ModelSpec>();
        models_[m.id] = {project.id, m};
      }
      for (const auto& j : read_jsonl(dir / "subjects" / "index.jsonl")) {
        auto s = j.get<TestSubject>();
        subjects_[s.id] = s;
      }
      for (const auto& j : read_jsonl(dir / "configs" / "index.jsonl")) {
        auto c = j.get<RunConfiguration>();
        configs_[c.id] = {project.id, c};
      }
      for (const auto& j : read_jsonl(dir / "collections" / "index.jsonl")) {
        auto c = j.get<RunCollection>();
        collections_[c.id] = c;
      }
      for (const auto& j : read_jsonl(dir / "runs" / "index.jsonl")) {
        auto r = j.get<Run>();
        runs_[r.id] = {project.id, r};
        RunCases& rc = cases_[r.id];
        for (const auto& jc : read_jsonl(dir / "cases" / (r.id + ".jsonl"))) {
          auto c = jc.get<TestCase>();
          rc.position[c.id] = rc.cases.size();
          rc.cases.push_back(std::move(c));
        }
        for (const auto& jr : read_jsonl(dir / "results" / (r.id + ".jsonl"))) {
          auto res = jr.get<TestResult>();
          if (rc.position.contains(res.test_case_id)) rc.latest[res.test_case_id] = std::move(res);
        }
      }
    }
  }

  fs::path root_;
  mutable std::shared_mutex mu_;
  std::map<std::string, Project> projects_;
  std::map<std::string, std::pair<std::string, gateway::ModelSpec>> models_;
  std::map<std::string, TestSubject> subjects_;
  std::map<std::string, std::pair<std::string, RunConfiguration>> configs_;
  std::map<std::string, RunCollection> collections_;
  std::map<std::string, std::pair<std::string, Run>> runs_;
  std::map<std::string, RunCases> cases_;
  std::vector<PropertyDefinition> properties_;
};

template <typename T>
T required(std::optional<T> v, std::string_view what, std::string_view id) {
  if (!v) fail(ErrorCode::kNotFound, "unknown " + std::string(what) + " " + std::string(id));
  return std::move(*v);
}

}  // namespace

Project Store::get_project(std::string_view id) const { return required(find_project(id), "project", id); }
gateway::ModelSpec Store::get_model(std::string_view id) const { return required(find_model(id), "model", id); }
TestSubject Store::get_subject(std::string_view id) const { return required(find_subject(id), "test subject", id); }
PropertyDefinition Store::get_property(std::string_view id) const {
  return required(find_property(id), "property", id);
}
RunConfiguration Store::get_config(std::string_view id) const {
  return required(find_config(id), "run configuration", id);
}
RunCollection Store::get_collection(std::string_view id) const {
  return required(find_collection(id), "run collection", id);
}
Run Store::get_run(std::string_view id) const { return required(find_run(id), "run", id); }

std::shared_ptr<Store> open_file_store(const std::filesystem::path& root) {
  return std::make_shared<FileStore>(root);
}

}  // namespace modelprobe
