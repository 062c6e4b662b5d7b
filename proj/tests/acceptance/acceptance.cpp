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

// End-to-end acceptance checks. Prints one PASS/FAIL line per check and
// exits non-zero when any fails. Usage: modelprobe_acceptance PATH_TO_CLI

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "modelprobe/datamodel/catalog.hpp"
#include "modelprobe/datamodel/operations.hpp"
#include "modelprobe/service/api.hpp"
#include "modelprobe/synth/paths.hpp"
#include "modelprobe/testers/tabular.hpp"
#include "modelprobe/testers/text.hpp"
#include "modelprobe/testers/timeseries.hpp"
#include "test_support.hpp"
#include "tester_fixtures.hpp"

namespace modelprobe::acceptance {
namespace {

using modelprobe::testing::categorical_column;
using modelprobe::testing::mock_handle;
using modelprobe::testing::numeric_column;
using modelprobe::testing::oracle_mi;
using modelprobe::testing::oracle_path;
using modelprobe::testing::tester_input;
using synth::Row;
using synth::Table;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Collects failed expectations; the first message is the one reported.
struct Expect {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void that(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void note(const std::string& s) { notes.push_back(s); }
  Outcome outcome() const {
    std::string detail;
    for (const auto& n : notes) detail += (detail.empty() ? "" : ", ") + n;
    if (!failures.empty()) detail = failures.front() + (failures.size() > 1 ? " (+" + std::to_string(failures.size() - 1) + " more)" : "");
    return {failures.empty(), detail};
  }
};

std::string num(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- planted bias ------------------------------------------------------------------

std::string planted_training(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::ostringstream out;
  out.precision(17);
  out << "group,score,x\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << "ABC"[uniform_index(rng, 3)] << "," << uniform_real(rng, 0, 1) << "," << uniform_real(rng, 0, 1) << "\n";
  }
  return out.str();
}

Outcome planted_bias_oracle() {
  Expect e;
  const auto t0 = std::chrono::steady_clock::now();
  auto in = tester_input("individual-discrimination", planted_training(600, 3),
                         Json{{"protected_attributes", Json::array({"group"})}});
  in.generation_limit = 200;
  in.seed = 17;
  const auto predictor = mock_handle("planted-bias");
  const auto run = testers::run_locally(*testers::make_individual_discrimination_tester(), in, predictor);

  // The same seeded synthetic table, regenerated, then every (row, other
  // category) pair judged by the rule itself.
  const auto source = testers::tabular_source_rows(in, predictor);
  e.that(source.synthetic, "rows are not synthetic");
  e.that(source.rows.size() == 200, "expected 200 synthetic rows, got " + std::to_string(source.rows.size()));
  const std::size_t g = *source.schema.index_of("group");
  const std::size_t s = *source.schema.index_of("score");
  const auto favorable = [&](const std::string& group, double score) { return group == "A" || score > 0.5; };
  std::size_t pairs = 0, flips = 0;
  for (const Row& row : source.rows) {
    const std::string& group = std::get<std::string>(row[g]);
    for (const auto& other : source.schema.columns[g].categories) {
      if (other == group) continue;
      ++pairs;
      flips += favorable(group, std::get<double>(row[s])) != favorable(other, std::get<double>(row[s]));
    }
  }
  const double oracle = static_cast<double>(flips) / static_cast<double>(pairs);
  const double got = run.summary.metrics.at("flip_rate");
  e.that(run.status.executed == pairs, "executed " + std::to_string(run.status.executed) + " of " +
                                           std::to_string(pairs) + " pairs");
  e.that(got == oracle, "flip_rate " + num(got) + " != oracle " + num(oracle));
  const double secs = seconds_since(t0);
  e.that(secs < 10.0, "took " + num(secs) + " s");
  e.note("flip_rate " + num(got) + " = " + std::to_string(flips) + "/" + std::to_string(pairs));
  return e.outcome();
}

// --- disparate impact ------------------------------------------------------------------

Outcome disparate_impact_arithmetic() {
  Expect e;
  std::vector<bool> minority, favorable;
  for (int i = 0; i < 100; ++i) {
    minority.push_back(true);
    favorable.push_back(i < 40);
  }
  for (int i = 0; i < 100; ++i) {
    minority.push_back(false);
    favorable.push_back(i < 50);
  }
  const auto m = testers::group_metrics(minority, favorable);
  e.that(std::fabs(m.disparate_impact - 0.8) <= 1e-9, "DI " + num(m.disparate_impact));
  e.that(std::fabs(m.demographic_parity + 0.1) <= 1e-9, "DP " + num(m.demographic_parity));
  const auto def = modelprobe::testing::builtin("group-discrimination");
  const Json bound = bind_parameters(def, Json::object());
  e.that(bound.at("di_range") == Json::array({0.8, 1.25}), "default range " + bound.at("di_range").dump());
  e.that(evaluate_metric(*def.find_metric("disparate_impact"), m.disparate_impact, bound) == MetricVerdict::kPass,
         "verdict is not pass");
  e.note("DI " + num(m.disparate_impact) + ", DP " + num(m.demographic_parity) + ", pass");
  return e.outcome();
}

// --- sampler fidelity -------------------------------------------------------------------

Table mixed_table(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Table t;
  t.schema.columns = {categorical_column("group", {"A", "B", "C"}), numeric_column("age", 18, 90),
                      categorical_column("y", {"no", "yes"}), numeric_column("score", 0, 1)};
  const std::vector<double> group_p{0.5, 0.3, 0.2};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = sample_discrete(rng, group_p);
    const double age = std::clamp(uniform_real(rng, 18.0, 60.0) + 15.0 * static_cast<double>(g), 18.0, 90.0);
    const bool yes = uniform_real(rng, 0.0, 1.0) < (age > 45 ? 0.8 : 0.2);
    t.rows.push_back({std::string(1, static_cast<char>('A' + g)), age, std::string(yes ? "yes" : "no"),
                      uniform_real(rng, 0.0, 1.0)});
  }
  return t;
}

Outcome sampler_fidelity() {
  Expect e;
  const auto t0 = std::chrono::steady_clock::now();
  const auto model = synth::fit_distribution_model(mixed_table(20000, 8));
  const Table sampled{model.schema, synth::sample_joint(model, 10000, 99)};
  double worst = 0.0;
  for (std::size_t c = 0; c < model.schema.columns.size(); ++c) {
    const auto& marginal = model.marginals[c];
    std::vector<double> freq(marginal.state_count(), 0.0);
    for (std::size_t st : synth::discretize(marginal, sampled, c)) freq[st] += 1.0 / 10000.0;
    double l1 = 0.0;
    for (std::size_t i = 0; i < freq.size(); ++i) l1 += std::fabs(freq[i] - marginal.probabilities[i]);
    worst = std::max(worst, l1);
    e.that(l1 <= 0.05, model.schema.columns[c].name + " L1 " + num(l1));
  }

  Table pair;
  pair.schema.columns = {categorical_column("c1", {"0", "1"}), categorical_column("c2", {"0", "1"})};
  for (int i = 0; i < 100; ++i) pair.rows.push_back({std::string(i % 2 ? "1" : "0"), std::string(i % 2 ? "1" : "0")});
  const auto rows = synth::sample_joint(synth::fit_distribution_model(pair), 10000, 5);
  double agree = 0.0;
  for (const auto& r : rows) agree += r[0] == r[1] ? 1.0 : 0.0;
  agree /= static_cast<double>(rows.size());
  e.that(agree >= 0.97, "agreement " + num(agree));
  const double secs = seconds_since(t0);
  e.that(secs < 20.0, "took " + num(secs) + " s");
  e.note("max L1 " + num(worst) + ", agreement " + num(agree));
  return e.outcome();
}

// --- Chow-Liu -------------------------------------------------------------------------------

bool has_edge(const synth::JointDistributionModel& m, const std::string& a, const std::string& b) {
  return std::any_of(m.edges.begin(), m.edges.end(), [&](const synth::DependencyEdge& d) {
    return (d.parent == a && d.child == b) || (d.parent == b && d.child == a);
  });
}

Outcome chow_liu_brute_force() {
  Expect e;
  Rng rng(23);
  int fixtures = 0;
  for (int trial = 0; trial < 40; ++trial, ++fixtures) {
    const double pab = uniform_real(rng, 0, 1), pbc = uniform_real(rng, 0, 1), pac = uniform_real(rng, 0, 1);
    const std::size_t k = 2 + trial % 3;
    std::vector<std::string> cats;
    for (std::size_t i = 0; i < k; ++i) cats.push_back(std::to_string(i));
    Table t;
    t.schema.columns = {categorical_column("a", cats), categorical_column("b", cats), categorical_column("c", cats)};
    std::vector<std::string> va, vb, vc;
    for (int i = 0; i < 400; ++i) {
      const std::size_t a = uniform_index(rng, k);
      const std::size_t b = uniform_real(rng, 0, 1) < pab ? a : uniform_index(rng, k);
      std::size_t c = uniform_index(rng, k);
      if (uniform_real(rng, 0, 1) < pbc) {
        c = b;
      } else if (uniform_real(rng, 0, 1) < pac) {
        c = a;
      }
      va.push_back(std::to_string(a));
      vb.push_back(std::to_string(b));
      vc.push_back(std::to_string(c));
      t.rows.push_back({va.back(), vb.back(), vc.back()});
    }
    const double ab = oracle_mi(va, vb), bc = oracle_mi(vb, vc), ac = oracle_mi(va, vc);
    const double best = std::max({ab + bc, ab + ac, bc + ac});
    const auto model = synth::fit_distribution_model(t);
    double chosen = 0.0;
    if (has_edge(model, "a", "b")) chosen += ab;
    if (has_edge(model, "b", "c")) chosen += bc;
    if (has_edge(model, "a", "c")) chosen += ac;
    e.that(model.edges.size() == 2, "fixture " + std::to_string(trial) + " is not a spanning tree");
    e.that(std::fabs(chosen - best) <= 1e-9,
           "fixture " + std::to_string(trial) + " total MI " + num(chosen) + " < best " + num(best));
  }
  e.note(std::to_string(fixtures) + " fixtures, 3 candidate trees each");
  return e.outcome();
}

// --- path coverage ----------------------------------------------------------------------------

Outcome path_coverage() {
  Expect e;
  const synth::TableSchema schema{{numeric_column("x", 0, 1), categorical_column("g", {"A", "B"})}};
  // Training mass is spread over [0, 1]; the model answers "1" only above
  // 0.9999, so random draws almost never reach that leaf.
  Rng rng(4);
  Table training{schema, {}};
  for (int i = 0; i < 2000; ++i) {
    training.rows.push_back({uniform_real(rng, 0, 1), std::string(uniform_index(rng, 2) ? "B" : "A")});
  }
  Table probe{schema, {}};
  for (int i = 0; i < 400; ++i) {
    probe.rows.push_back({uniform_real(rng, 0.9997, 1.0), std::string(uniform_index(rng, 2) ? "B" : "A")});
  }
  const auto model = synth::fit_distribution_model(training);
  const auto predictor = mock_handle("threshold", Json{{"threshold", 0.9999}});
  const auto tree = synth::fit_surrogate(probe, predictor, {}, 7);
  const auto paths = synth::extract_paths(tree);
  e.that(tree.leaves().size() >= 2 && tree.leaves().size() <= 16,
         "surrogate has " + std::to_string(tree.leaves().size()) + " leaves");

  const std::size_t budget = 16 * 30;
  const auto gen = synth::generate_for_paths(paths, model, budget, 11);
  std::vector<std::size_t> counts(paths.size(), 0);
  std::size_t sound = 0;
  for (std::size_t i = 0; i < gen.rows.size(); ++i) {
    ++counts[gen.row_path[i]];
    sound += oracle_path(schema, paths[gen.row_path[i]], gen.rows[i]);
  }
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  e.that(gen.rows.size() == budget, "generated " + std::to_string(gen.rows.size()) + " rows");
  e.that(*hi - *lo <= 1, "per-path counts differ by " + std::to_string(*hi - *lo));
  e.that(sound == gen.rows.size(), std::to_string(gen.rows.size() - sound) + " rows violate their path");
  const double guided = synth::path_coverage(gen.rows, tree, &model);
  const double random = synth::path_coverage(synth::sample_joint(model, budget, 11), tree, &model);
  e.that(guided == 1.0, "guided coverage " + num(guided));
  e.that(random < guided, "random coverage " + num(random) + " not below guided " + num(guided));
  e.note(std::to_string(paths.size()) + " paths, counts " + std::to_string(*lo) + ".." + std::to_string(*hi) +
         ", coverage guided " + num(guided) + " vs random " + num(random));
  return e.outcome();
}

// --- time series --------------------------------------------------------------------------------

std::string trend_csv(std::size_t n) {
  std::ostringstream out;
  out.precision(17);
  out << "timestamp,value\n";
  for (std::size_t i = 0; i < n; ++i) out << 1700000000 + 3600 * i << "," << i + std::sin(0.7 * i) << "\n";
  return out.str();
}

Outcome timeseries_matrix() {
  Expect e;
  struct Row {
    std::string property, model, verdict;
    bool zero_delta;
  };
  const std::vector<Row> matrix{{"small-linear-change", "last-value", "pass", true},
                                {"large-linear-change", "normalizing", "fail", false},
                                {"unordered-data", "order-sensitive", "fail", false},
                                {"unordered-data", "mean", "pass", true}};
  const std::string csv = trend_csv(120);
  for (const auto& m : matrix) {
    auto in = tester_input(m.property, csv);
    in.seed = 5;
    const auto run = testers::run_locally(*testers::find_tester(m.property), in, mock_handle(m.model));
    const std::string tag = m.property + "/" + m.model;
    e.that(run.status.errored == 0 && run.status.executed > 0, tag + " had errors");
    e.that(run.verdict == m.verdict, tag + " verdict " + run.verdict);
    if (m.zero_delta) {
      for (const auto& r : run.results) {
        const double d = r.evaluation.at("delta_r").get<double>();
        e.that(std::fabs(d) <= 1e-9, tag + " delta_r " + num(d));
      }
    }
    e.note(tag + " " + run.verdict);
  }
  return e.outcome();
}

// --- text -----------------------------------------------------------------------------------------

Outcome text_determinism_and_oracle() {
  Expect e;
  const std::vector<std::string> sentences{"a good story told well", "nothing good happened here today",
                                           "plain words with no keyword", "good good good"};
  for (const auto& s : sentences) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      for (std::size_t level : {1, 2, 3}) {
        const auto a = testers::apply_typo(s, level, seed), b = testers::apply_typo(s, level, seed);
        const auto c = testers::apply_noise(s, level, seed), d = testers::apply_noise(s, level, seed);
        e.that(a.text == b.text && Json(a.operations) == Json(b.operations), "typo not deterministic on '" + s + "'");
        e.that(c.text == d.text && Json(c.operations) == Json(d.operations), "noise not deterministic on '" + s + "'");
      }
    }
  }

  std::string corpus;
  for (int i = 0; i < 40; ++i) {
    corpus += i % 2 ? "a good story told well number " + std::to_string(i) + "\n"
                    : "plain story number " + std::to_string(i) + "\n";
  }
  const auto has_keyword = [](const std::string& text) { return text.find("good") != std::string::npos; };

  auto typo_in = tester_input("typo-sensitivity", corpus, Json::object(), Json{{"level", 2}});
  typo_in.seed = 3;
  typo_in.generation_limit = 40;
  const auto typo = testers::run_locally(*testers::find_tester("typo-sensitivity"), typo_in, mock_handle("keyword-text"));
  const auto originals = testers::read_corpus(corpus);
  std::size_t oracle_flips = 0;
  for (const auto& c : typo.generation.cases) {
    // Replay the recorded edits on the untouched corpus sentence.
    const std::string& original = originals.at(c.reference.at("corpus_index").get<std::size_t>());
    const auto ops = c.reference.at("operations").get<std::vector<testers::EditOperation>>();
    const std::string replayed = testers::replay_operations(original, ops);
    e.that(replayed == c.samples[1].get<std::string>(), "replay differs from the stored transformed text");
    oracle_flips += has_keyword(original) != has_keyword(replayed);
  }
  const double expected = static_cast<double>(oracle_flips) / static_cast<double>(typo.generation.cases.size());
  e.that(typo.summary.metrics.at("flip_rate") == expected,
         "typo flip_rate " + num(typo.summary.metrics.at("flip_rate")) + " != replay oracle " + num(expected));

  auto noise_in = tester_input("noise-sensitivity", corpus, Json::object(), Json{{"level", 3}});
  noise_in.seed = 3;
  noise_in.generation_limit = 40;
  const auto noise =
      testers::run_locally(*testers::find_tester("noise-sensitivity"), noise_in, mock_handle("keyword-text"));
  e.that(noise.summary.metrics.at("flip_rate") == 0.0, "noise flip_rate " + num(noise.summary.metrics.at("flip_rate")));
  e.note("typo flip_rate " + num(expected) + " (" + std::to_string(oracle_flips) + " replayed flips), noise 0");
  return e.outcome();
}

// --- correctness --------------------------------------------------------------------------------------

Outcome correctness_metrics() {
  Expect e;
  const std::vector<std::string> gold{"1", "1", "1", "1", "1", "0", "0", "0", "0", "0"};
  const std::vector<std::string> pred{"1", "1", "1", "1", "0", "1", "0", "0", "0", "0"};
  const auto m = testers::classification_metrics(gold, pred);
  for (const auto& [name, v] : std::vector<std::pair<std::string, double>>{
           {"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"F", m.f_score}}) {
    e.that(std::fabs(v - 0.8) <= 1e-9, name + " " + num(v));
  }
  // By hand: precision a 1/2, b 1/2, c 1/2; recall a 1/2, b 1/2, c 1/2.
  const std::vector<std::string> g3{"a", "b", "b", "c", "c", "a"};
  const std::vector<std::string> p3{"a", "b", "a", "c", "b", "c"};
  const auto m3 = testers::classification_metrics(g3, p3);
  e.that(std::fabs(m3.accuracy - 0.5) <= 1e-9, "3-class accuracy " + num(m3.accuracy));
  e.that(std::fabs(m3.precision - 0.5) <= 1e-9, "3-class precision " + num(m3.precision));
  e.that(std::fabs(m3.recall - 0.5) <= 1e-9, "3-class recall " + num(m3.recall));
  e.that(std::fabs(m3.f_score - 0.5) <= 1e-9, "3-class F " + num(m3.f_score));
  e.note("binary 0.8 x4, macro 0.5 x4");
  return e.outcome();
}

// --- CLI end to end -------------------------------------------------------------------------------

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult cli(const std::string& binary, const std::vector<std::string>& args) {
  std::string command = quote(binary);
  for (const auto& a : args) command += " " + quote(a);
  command += " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return {};
  CliResult r;
  char buffer[4096];
  std::size_t n = 0;
  while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) r.out.append(buffer, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// A long-running CLI process whose first output line carries its URL.
class Server {
 public:
  Server(const std::string& binary, const std::vector<std::string>& args) {
    int fds[2];
    if (pipe(fds) != 0) return;
    pid_ = fork();
    if (pid_ == 0) {
      dup2(fds[1], STDOUT_FILENO);
      close(fds[0]);
      close(fds[1]);
      std::vector<char*> argv{const_cast<char*>(binary.c_str())};
      for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
      argv.push_back(nullptr);
      execv(binary.c_str(), argv.data());
      _exit(127);
    }
    close(fds[1]);
    FILE* out = fdopen(fds[0], "r");
    char line[512] = {0};
    if (out && fgets(line, sizeof line, out)) {
      const std::string text(line);
      const auto at = text.find("http://");
      if (at != std::string::npos) url_ = text.substr(at, text.find_first_of(" \n", at) - at);
    }
    if (out) fclose(out);
  }
  ~Server() {
    if (pid_ > 0) {
      kill(pid_, SIGTERM);
      int status = 0;
      waitpid(pid_, &status, 0);
    }
  }
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  const std::string& url() const { return url_; }

 private:
  pid_t pid_ = -1;
  std::string url_;
};

std::string write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  const auto path = dir / name;
  std::ofstream(path, std::ios::binary) << content;
  return path.string();
}

std::string bias_csv(std::size_t n) {
  std::ostringstream out;
  out << "group,score,x,label\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>((i * 37) % 100) / 100.0;
    out << "ABC"[i % 3] << "," << static_cast<double>((i * 53) % 100) / 100.0 << "," << x << "," << (x > 0.5 ? 1 : 0)
        << "\n";
  }
  return out.str();
}

Outcome cli_end_to_end(const std::string& binary) {
  Expect e;
  const auto t0 = std::chrono::steady_clock::now();
  modelprobe::testing::TempDir dir;
  const std::string store = (dir.path() / "store").string();

  Server tabular(binary, {"mock-model", "serve", "--kind", "planted-bias", "--port", "0"});
  Server text(binary, {"mock-model", "serve", "--kind", "keyword-text", "--port", "0"});
  Server forecast(binary, {"mock-model", "serve", "--kind", "last-value", "--port", "0"});
  Server api(binary, {"--store", store, "serve", "--port", "0"});
  if (tabular.url().empty() || text.url().empty() || forecast.url().empty() || api.url().empty()) {
    return {false, "a server did not start"};
  }

  std::string transcript;
  const auto call = [&](std::vector<std::string> args) -> Json {
    args.insert(args.begin(), {"--server", api.url(), "--json"});
    const auto r = cli(binary, args);
    transcript += r.out;
    if (r.exit_code != 0) throw std::runtime_error(args[3] + " exited " + std::to_string(r.exit_code) + ": " + r.out);
    return Json::parse(r.out);
  };

  try {
    const std::string project = call({"project", "create", "acceptance"}).at("id");

    struct Subject {
      std::string url, format, file;
      std::vector<std::string> properties;
      Json inputs;
      Json params = Json::object();
    };
    std::string corpus;
    for (int i = 0; i < 30; ++i) corpus += i % 2 ? "a good day number " + std::to_string(i) + "\n" : "plain line " + std::to_string(i) + "\n";
    const std::vector<Subject> subjects{
        {tabular.url(), "csv-table", write_file(dir.path(), "bias.csv", bias_csv(90)),
         {"group-discrimination", "individual-discrimination", "adversarial-robustness"},
         Json{{"protected_attributes", {"group"}}, {"favorable_label", "favorable"},
              {"minority_group", "group == 'B'"}, {"label_column", "label"}},
         Json{{"group-discrimination", {{"row_source", "training"}}},
              {"individual-discrimination", {{"row_source", "training"}}},
              {"adversarial-robustness", {{"row_source", "training"}}}}},
        {text.url(), "text-lines", write_file(dir.path(), "corpus.txt", corpus),
         {"typo-sensitivity", "noise-sensitivity"}, Json::object()},
        {forecast.url(), "timeseries-csv", write_file(dir.path(), "series.csv", trend_csv(120)),
         {"small-linear-change", "unordered-data", "large-linear-change"}, Json::object()},
    };

    std::size_t polls = 0, runs = 0, reevaluated = 0;
    for (const auto& s : subjects) {
      const Json subject = call({"model", "register", "--project", project, "--name", s.format, "--endpoint", s.url,
                                 "--header", "Authorization: Bearer e2e-secret", "--training", s.file, "--format",
                                 s.format});
      std::string properties;
      for (const auto& p : s.properties) properties += (properties.empty() ? "" : ",") + p;
      const Json config = call({"config", "create", "--subject", subject.at("id"), "--property", properties,
                                "--inputs", s.inputs.dump(), "--params", s.params.dump(), "--limit", "40",
                                "--seed", "9"});
      const std::string collection =
          call({"run", "exec", "--config", config.at("id"), "--no-wait"}).at("collection_id");

      Json status;
      while (true) {
        status = call({"run", "status", collection});
        ++polls;
        for (const auto& r : status.at("runs")) {
          StatusSnapshot snap = r.at("status").get<StatusSnapshot>();
          e.that(snap.consistent(), "inconsistent status " + r.at("status").dump());
        }
        const std::string state = status.at("state");
        if (state == "completed" || state == "errored" || state == "cancelled") break;
        if (seconds_since(t0) > 120.0) throw std::runtime_error("collection still running after 120 s");
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
      }
      e.that(status.at("state") == "completed", s.format + " collection " + status.at("state").get<std::string>());
      for (const auto& r : status.at("runs")) {
        ++runs;
        e.that(r.at("state") == "completed", r.at("property_id").get<std::string>() + " run " +
                                                 r.at("state").get<std::string>() + " " + r.value("error", ""));
        const Json again = call({"run", "reevaluate", r.at("run_id")});
        e.that(again.at("identical") == again.at("cases") && again.at("changed").empty(),
               r.at("property_id").get<std::string>() + " reevaluation changed " + again.at("changed").dump());
        reevaluated += again.at("cases").get<std::size_t>();
      }
    }
    e.that(transcript.find("e2e-secret") == std::string::npos, "CLI output carries the model header value");
    const double secs = seconds_since(t0);
    e.that(secs <= 120.0, "took " + num(secs) + " s");
    e.note(std::to_string(runs) + " runs, " + std::to_string(polls) + " polls, " + std::to_string(reevaluated) +
           " cases reproduced, " + num(secs) + " s");
  } catch (const std::exception& ex) {
    e.that(false, ex.what());
  }
  return e.outcome();
}

// --- privacy ------------------------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Outcome privacy_boundary() {
  Expect e;
  constexpr const char* kSecret = "sk-acceptance-42";
  modelprobe::testing::TempDir dir;
  auto store = open_file_store(dir.path());
  ensure_builtin_catalog(*store);
  auto spy = std::make_shared<modelprobe::testing::SpyTester>();
  testers::register_tester("acceptance-spy", spy);
  PropertyDefinition def = modelprobe::testing::builtin("correctness");
  def.id = "acceptance-spy";
  def.tester = "acceptance-spy";
  register_property_definition(*store, def);

  auto mock = std::make_shared<gateway::MockTransport>(gateway::MockModel::from_name("threshold"));
  const std::string project = store->create_project("private").id;
  gateway::ModelSpec spec;
  spec.name = "guarded";
  spec.endpoint_url = "http://mock.invalid/predict";
  spec.headers = {{"X-Api-Key", kSecret}};
  const auto subject = register_test_subject(*store, project, spec, DataFormat::kCsvTable, "x,label\n0.2,0\n0.8,1\n");
  RunConfiguration config;
  config.test_subject_id = subject;
  config.selected_properties = {"acceptance-spy", "correctness"};
  config = create_run_configuration(*store, config);

  service::OrchestratorOptions options;
  options.transport = mock;
  service::Orchestrator orchestrator(store, options);
  service::Api api(orchestrator);
  const auto started = api.handle({"POST", "/configs/" + config.id + "/run", {}, "{}"});
  if (started.status != 202) return {false, "run not started: " + started.body.dump()};
  const std::string collection = started.body.at("collection_id");
  e.that(orchestrator.wait(collection), "collection did not finish");

  bool injected = false;
  for (const auto& [name, value] : mock->last_headers()) injected = injected || value == kSecret;
  e.that(injected, "header was not sent to the model");
  const std::string seen = spy->seen();
  e.that(!seen.empty(), "spy saw nothing");
  e.that(seen.find(kSecret) == std::string::npos, "tester saw the header value");
  e.that(seen.find("X-Api-Key") == std::string::npos, "tester saw the header name");

  std::string responses;
  for (const auto& run_id : store->get_collection(collection).runs) {
    responses += api.handle({"GET", "/runs/" + run_id + "/metrics", {}, ""}).body.dump();
    responses += api.handle({"GET", "/runs/" + run_id + "/failures", {}, ""}).body.dump();
  }
  responses += api.handle({"GET", "/collections/" + collection, {}, ""}).body.dump();
  responses += api.handle({"GET", "/projects/" + project + "/collections", {}, ""}).body.dump();
  e.that(responses.find(kSecret) == std::string::npos, "an API response carries the header value");

  std::size_t files = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir.path())) {
    if (!entry.is_regular_file()) continue;
    ++files;
    const bool has = slurp(entry.path()).find(kSecret) != std::string::npos;
    const bool model_index = entry.path().parent_path().filename() == "models";
    e.that(has == model_index, "unexpected secret placement in " + entry.path().filename().string());
  }
  e.note("spy, API responses and " + std::to_string(files) + " store files checked");
  return e.outcome();
}

}  // namespace
}  // namespace modelprobe::acceptance

int main(int argc, char** argv) {
  using namespace modelprobe::acceptance;
  if (argc < 2) {
    std::cerr << "usage: " << argv[0] << " PATH_TO_MODELPROBE_CLI\n";
    return 2;
  }
  const std::string cli_binary = argv[1];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"planted-bias flip rate equals brute-force oracle", planted_bias_oracle},
      {"disparate impact arithmetic", disparate_impact_arithmetic},
      {"sampler fidelity", sampler_fidelity},
      {"Chow-Liu tree maximizes total mutual information", chow_liu_brute_force},
      {"path-guided generation and coverage", path_coverage},
      {"time-series metamorphic matrix", timeseries_matrix},
      {"text transform determinism and replay oracle", text_determinism_and_oracle},
      {"correctness metrics", correctness_metrics},
      {"CLI end to end against mock servers", [&] { return cli_end_to_end(cli_binary); }},
      {"privacy boundary", privacy_boundary},
  };
  int failed = 0;
  for (const auto& [name, check] : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  [" << o.detail << "; "
              << num(std::round(seconds_since(t0) * 100) / 100) << " s]" << std::endl;
  }
  std::cout << (checks.size() - failed) << "/" << checks.size() << " acceptance checks passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
