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

#include "modelprobe/testers/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "modelprobe/common/csv.hpp"
#include "modelprobe/common/error.hpp"
#include "modelprobe/synth/distribution.hpp"
#include "modelprobe/synth/paths.hpp"
#include "modelprobe/synth/surrogate.hpp"
#include "modelprobe/testers/group_expression.hpp"

namespace modelprobe::testers {
namespace {

using synth::Row;
using synth::TableSchema;

// Upper bound on training rows labeled by the black box to fit the surrogate.
constexpr std::size_t kSurrogateRowCap = 5000;

double safe_div(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

std::vector<std::string> protected_attributes(const TesterInput& input) {
  std::vector<std::string> out;
  const Json& v = input.data_specific.contains("protected_attributes")
                      ? input.data_specific.at("protected_attributes")
                      : Json();
  if (v.is_string()) out.push_back(v.get<std::string>());
  if (v.is_array()) {
    for (const auto& a : v) {
      require(a.is_string(), "protected_attributes must be column names");
      out.push_back(a.get<std::string>());
    }
  }
  if (out.empty()) fail(ErrorCode::kInvalidArgument, "protected_attributes must name at least one column");
  return out;
}

std::string string_input(const TesterInput& input, const char* key) {
  if (!input.data_specific.contains(key) || !input.data_specific.at(key).is_string()) {
    fail(ErrorCode::kInvalidArgument, std::string("missing input '") + key + "'");
  }
  return input.data_specific.at(key).get<std::string>();
}

std::vector<std::size_t> pick_rows(std::size_t available, std::size_t limit, std::uint64_t seed) {
  std::vector<std::size_t> idx;
  if (available <= limit) {
    for (std::size_t i = 0; i < available; ++i) idx.push_back(i);
    return idx;
  }
  Rng rng(seed);
  idx = sample_without_replacement(rng, available, limit);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::map<std::string, const TestCase*> case_index(std::span<const TestCase> cases) {
  std::map<std::string, const TestCase*> m;
  for (const auto& c : cases) m[c.id] = &c;
  return m;
}

// Shared judging for (original, transformed) pairs: fail iff labels differ.
TestResult judge_pair(const TestCase& c, std::span<const gateway::PredictionOutcome> outcomes) {
  TestResult r;
  r.test_case_id = c.id;
  r.run_id = c.run_id;
  for (const auto& o : outcomes) r.predictions.push_back(o.prediction);
  if (outcomes.size() != 2 || !outcomes[0].ok() || !outcomes[1].ok()) {
    r.verdict = Verdict::kError;
    for (const auto& o : outcomes) {
      if (!o.ok()) r.detail = o.error;
    }
    if (r.detail.empty()) r.detail = "expected two predictions";
    return r;
  }
  const auto& a = outcomes[0].prediction->label;
  const auto& b = outcomes[1].prediction->label;
  r.verdict = a == b ? Verdict::kPass : Verdict::kFail;
  r.detail = a == b ? "labels agree (" + a + ")" : "label changed from " + a + " to " + b;
  r.evaluation = Json{{"original_label", a}, {"transformed_label", b}};
  return r;
}

double flip_rate_of(std::span<const TestResult> results) {
  std::size_t judged = 0, failed = 0;
  for (const auto& r : results) {
    if (r.verdict == Verdict::kError) continue;
    ++judged;
    if (r.verdict == Verdict::kFail) ++failed;
  }
  return judged == 0 ? std::nan("") : static_cast<double>(failed) / static_cast<double>(judged);
}

std::string percent(double x) {
  if (std::isnan(x)) return "n/a";
  return format_number(std::round(x * 1000.0) / 10.0) + "%";
}

// Protected-attribute categories x predicted labels over every judged sample.
Json protected_grid(std::span<const TestCase> cases, std::span<const TestResult> results,
                    const std::vector<std::string>& attributes) {
  const auto index = case_index(cases);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& r : results) {
    auto it = index.find(r.test_case_id);
    if (it == index.end()) continue;
    const TestCase& c = *it->second;
    for (std::size_t i = 0; i < c.samples.size() && i < r.predictions.size(); ++i) {
      if (!r.predictions[i]) continue;
      for (const auto& a : attributes) {
        if (!c.samples[i].contains(a)) continue;
        const Json& v = c.samples[i].at(a);
        pairs.emplace_back(a + "=" + (v.is_string() ? v.get<std::string>() : v.dump()), r.predictions[i]->label);
      }
    }
  }
  return count_grid(pairs, "protected attribute value", "predicted label");
}

void add_source_metrics(Generation& g, const SourceRows& src) {
  g.metrics["path_coverage"] = src.path_coverage;
  g.warnings.insert(g.warnings.end(), src.warnings.begin(), src.warnings.end());
  g.artifacts = src.artifacts;
  g.artifacts["synthetic"] = src.synthetic;
  g.source_samples = src.rows.size();
}

// --- correctness -----------------------------------------------------------------------

class CorrectnessTester final : public Tester {
 public:
  Generation generate(const TesterInput& input, const gateway::PredictorHandle&) const override {
    Generation g;
    std::string content;
    if (input.labeled) {
      content = *input.labeled;
    } else {
      content = input.training;
      g.warnings.push_back("no labeled-eval data attached; using the training data as labeled rows");
    }
    const std::string gold = input.parameters.value("gold_column", std::string("label"));
    const CsvTable csv = parse_csv(content);
    const auto gold_index = csv.column_index(gold);
    if (!gold_index) fail(ErrorCode::kInvalidArgument, "missing gold column '" + gold + "'");
    const synth::Table table = synth::table_from_csv(csv, tabular_schema_options(input, gold));
    for (std::size_t i : pick_rows(table.size(), input.generation_limit, input.seed)) {
      TestCase c;
      c.samples = {synth::row_to_sample(table.schema, table.rows[i])};
      c.role_tags = {"original"};
      c.reference = Json{{"gold", csv.rows[i][*gold_index]}, {"row", i}};
      g.cases.push_back(std::move(c));
    }
    g.source_samples = g.cases.size();
    return g;
  }

  TestResult judge(const TestCase& c, std::span<const gateway::PredictionOutcome> outcomes,
                   const TesterInput&) const override {
    TestResult r;
    r.test_case_id = c.id;
    r.run_id = c.run_id;
    for (const auto& o : outcomes) r.predictions.push_back(o.prediction);
    if (outcomes.size() != 1 || !outcomes[0].ok()) {
      r.verdict = Verdict::kError;
      r.detail = outcomes.empty() ? "no prediction" : outcomes[0].error;
      return r;
    }
    const std::string gold = c.reference.value("gold", std::string());
    const std::string& predicted = outcomes[0].prediction->label;
    r.verdict = predicted == gold ? Verdict::kPass : Verdict::kFail;
    r.detail = predicted == gold ? "matches gold label" : "predicted " + predicted + ", gold " + gold;
    r.evaluation = Json{{"gold", gold}, {"predicted", predicted}};
    return r;
  }

  Summary summarize(std::span<const TestCase> cases, std::span<const TestResult> results, const TesterInput&,
                    const Json&) const override {
    const auto index = case_index(cases);
    std::vector<std::string> gold, predicted;
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& r : results) {
      if (r.verdict == Verdict::kError || r.predictions.empty() || !r.predictions[0]) continue;
      auto it = index.find(r.test_case_id);
      if (it == index.end()) continue;
      gold.push_back(it->second->reference.value("gold", std::string()));
      predicted.push_back(r.predictions[0]->label);
      pairs.emplace_back(gold.back(), predicted.back());
    }
    Summary s;
    if (gold.empty()) {
      for (const char* m : {"accuracy", "precision", "recall", "f_score"}) s.metrics[m] = std::nan("");
      s.explanation = "No row could be judged.";
      return s;
    }
    const auto m = classification_metrics(gold, predicted);
    s.metrics = {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f_score", m.f_score}};
    const auto correct = static_cast<std::size_t>(std::llround(m.accuracy * static_cast<double>(gold.size())));
    s.explanation = std::to_string(correct) + " of " + std::to_string(gold.size()) +
                    " labeled rows were predicted correctly (accuracy " + percent(m.accuracy) +
                    "). Precision, recall and F-score are macro-averaged over " + std::to_string(m.labels.size()) +
                    " labels.";
    s.grid = count_grid(pairs, "gold label", "predicted label");
    return s;
  }
};

// --- group discrimination --------------------------------------------------------------

class GroupDiscriminationTester final : public Tester {
 public:
  Generation generate(const TesterInput& input, const gateway::PredictorHandle& predictor) const override {
    const auto attributes = protected_attributes(input);
    const auto expr = GroupExpression::parse(string_input(input, "minority_group"));
    string_input(input, "favorable_label");
    const SourceRows src = tabular_source_rows(input, predictor);
    Generation g;
    add_source_metrics(g, src);
    if (src.rows.empty()) fail(ErrorCode::kFailedPrecondition, "no rows to test");
    TestCase c;
    for (const auto& row : src.rows) {
      c.samples.push_back(synth::row_to_sample(src.schema, row));
      c.role_tags.push_back(expr.matches(c.samples.back()) ? "minority" : "majority");
    }
    c.reference = Json{{"minority_group", expr.to_string()}, {"protected_attributes", attributes}};
    g.cases.push_back(std::move(c));
    return g;
  }

  TestResult judge(const TestCase& c, std::span<const gateway::PredictionOutcome> outcomes,
                   const TesterInput& input) const override {
    TestResult r;
    r.test_case_id = c.id;
    r.run_id = c.run_id;
    std::size_t missing = 0;
    std::vector<bool> minority, favorable;
    const std::string fav = string_input(input, "favorable_label");
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      r.predictions.push_back(outcomes[i].prediction);
      if (!outcomes[i].ok()) {
        ++missing;
        continue;
      }
      minority.push_back(c.role_tags.at(i) == "minority");
      favorable.push_back(outcomes[i].prediction->label == fav);
    }
    if (missing > 0 || outcomes.size() != c.samples.size()) {
      r.verdict = Verdict::kError;
      r.detail = "predictions failed for " + std::to_string(missing) + " of " + std::to_string(c.samples.size()) +
                 " samples";
      return r;
    }
    const GroupMetrics m = group_metrics(minority, favorable);
    r.evaluation = Json{{"disparate_impact", metric_value_to_json(m.disparate_impact)},
                        {"demographic_parity", metric_value_to_json(m.demographic_parity)},
                        {"minority_favorable_rate", metric_value_to_json(m.minority_rate)},
                        {"majority_favorable_rate", metric_value_to_json(m.majority_rate)},
                        {"minority_size", m.minority_size},
                        {"majority_size", m.majority_size}};
    if (!m.defined) {
      r.verdict = Verdict::kError;
      r.detail = m.minority_size == 0 || m.majority_size == 0 ? "undefined DI: a group is empty"
                                                               : "undefined DI: no favorable predictions";
      return r;
    }
    const Json range = input.parameters.value("di_range", Json::array({0.8, 1.25}));
    const double lo = range.at(0).get<double>();
    const double hi = range.at(1).get<double>();
    const bool inside = m.disparate_impact >= lo && m.disparate_impact <= hi;
    r.verdict = inside ? Verdict::kPass : Verdict::kFail;
    r.detail = "DI " + format_number(m.disparate_impact) + (inside ? " inside " : " outside ") + "[" +
               format_number(lo) + ", " + format_number(hi) + "]";
    return r;
  }

  Summary summarize(std::span<const TestCase> cases, std::span<const TestResult> results, const TesterInput& input,
                    const Json&) const override {
    Summary s;
    const char* names[] = {"disparate_impact", "demographic_parity", "minority_favorable_rate",
                           "majority_favorable_rate"};
    for (const char* n : names) s.metrics[n] = std::nan("");
    for (const auto& r : results) {
      if (!r.evaluation.contains("disparate_impact")) continue;
      for (const char* n : names) s.metrics[n] = metric_value_from_json(r.evaluation.at(n));
      const auto min_n = r.evaluation.value("minority_size", 0);
      const auto maj_n = r.evaluation.value("majority_size", 0);
      s.explanation = "Favorable rate " + percent(s.metrics["minority_favorable_rate"]) + " in the minority group (" +
                      std::to_string(min_n) + " rows) against " + percent(s.metrics["majority_favorable_rate"]) +
                      " in the majority group (" + std::to_string(maj_n) + " rows): disparate impact " +
                      format_number(s.metrics["disparate_impact"]) + ". " + r.detail + ".";
    }
    if (s.explanation.empty()) s.explanation = "Disparate impact could not be computed.";
    s.grid = protected_grid(cases, results, protected_attributes(input));
    return s;
  }
};

// --- individual discrimination ------------------------------------------------------------

class IndividualDiscriminationTester final : public Tester {
 public:
  Generation generate(const TesterInput& input, const gateway::PredictorHandle& predictor) const override {
    const auto attributes = protected_attributes(input);
    const SourceRows src = tabular_source_rows(input, predictor);
    Generation g;
    add_source_metrics(g, src);
    for (auto& p : individual_pairs(src.schema, src.rows, attributes)) {
      const std::size_t col = src.schema.require_index(p.attribute);
      TestCase c;
      c.samples = {synth::row_to_sample(src.schema, p.original), synth::row_to_sample(src.schema, p.transformed)};
      c.role_tags = {"original", "transformed"};
      c.reference = Json{{"source", p.source},
                         {"changed_attribute", p.attribute},
                         {"original_value", synth::cell_text(p.original[col])},
                         {"transformed_value", synth::cell_text(p.transformed[col])}};
      g.cases.push_back(std::move(c));
    }
    if (g.cases.empty()) fail(ErrorCode::kFailedPrecondition, "nothing to test: no protected attribute has two categories");
    return g;
  }

  TestResult judge(const TestCase& c, std::span<const gateway::PredictionOutcome> outcomes,
                   const TesterInput&) const override {
    return judge_pair(c, outcomes);
  }

  Summary summarize(std::span<const TestCase> cases, std::span<const TestResult> results, const TesterInput& input,
                    const Json&) const override {
    Summary s;
    s.metrics["flip_rate"] = flip_rate_of(results);
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_attribute;  // failed, judged
    const auto index = case_index(cases);
    for (const auto& r : results) {
      if (r.verdict == Verdict::kError) continue;
      auto it = index.find(r.test_case_id);
      if (it == index.end()) continue;
      auto& [failed, judged] = per_attribute[it->second->reference.value("changed_attribute", std::string())];
      ++judged;
      if (r.verdict == Verdict::kFail) ++failed;
    }
    s.explanation = "Changing only a protected attribute flipped the prediction in " +
                    percent(s.metrics["flip_rate"]) + " of pairs.";
    for (const auto& [a, fj] : per_attribute) {
      s.explanation += " " + a + ": " + std::to_string(fj.first) + " of " + std::to_string(fj.second) + ".";
    }
    s.grid = protected_grid(cases, results, protected_attributes(input));
    return s;
  }
};

// --- adversarial robustness ----------------------------------------------------------------

class RobustnessTester final : public Tester {
 public:
  Generation generate(const TesterInput& input, const gateway::PredictorHandle& predictor) const override {
    const double epsilon = input.parameters.value("epsilon", 0.05);
    const std::size_t k = input.parameters.value("neighbors_per_sample", std::size_t{4});
    require(epsilon > 0.0 && epsilon <= 0.5, "epsilon must lie in (0, 0.5]");
    require(k >= 1, "neighbors_per_sample must be >= 1");
    const CsvTable csv = parse_csv(input.training);
    const TableSchema schema = synth::infer_schema(csv, tabular_schema_options(input));
    Generation g;
    if (std::none_of(schema.columns.begin(), schema.columns.end(), [](const auto& c) { return c.is_numeric(); })) {
      g.artifacts["skipped"] = "no numeric column to perturb";
      g.warnings.push_back("property not applicable: no numeric column to perturb");
      g.metrics["path_coverage"] = std::nan("");
      return g;
    }
    const SourceRows src = tabular_source_rows(input, predictor);
    add_source_metrics(g, src);
    for (std::size_t i = 0; i < src.rows.size(); ++i) {
      Rng rng(neighbor_seed(input.seed, i));
      const auto neighbors = robustness_neighbors(src.schema, src.rows[i], epsilon, k, rng);
      for (std::size_t j = 0; j < neighbors.size(); ++j) {
        TestCase c;
        c.samples = {synth::row_to_sample(src.schema, src.rows[i]), synth::row_to_sample(src.schema, neighbors[j])};
        c.role_tags = {"original", "transformed"};
        c.reference = Json{{"source", i}, {"neighbor", j}, {"epsilon", epsilon}};
        g.cases.push_back(std::move(c));
      }
    }
    return g;
  }

  TestResult judge(const TestCase& c, std::span<const gateway::PredictionOutcome> outcomes,
                   const TesterInput&) const override {
    return judge_pair(c, outcomes);
  }

  Summary summarize(std::span<const TestCase>, std::span<const TestResult> results, const TesterInput& input,
                    const Json& artifacts) const override {
    Summary s;
    if (artifacts.contains("skipped")) {
      s.metrics["flip_rate"] = std::nan("");
      s.explanation = "Skipped: " + artifacts.at("skipped").get<std::string>() + ".";
      return s;
    }
    s.metrics["flip_rate"] = flip_rate_of(results);
    s.explanation = "Neighbors within " + percent(input.parameters.value("epsilon", 0.05)) +
                    " of each numeric column's range changed the prediction in " + percent(s.metrics["flip_rate"]) +
                    " of pairs.";
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& r : results) {
      if (r.verdict == Verdict::kError) continue;
      pairs.emplace_back(r.evaluation.value("original_label", std::string()),
                         r.evaluation.value("transformed_label", std::string()));
    }
    s.grid = count_grid(pairs, "original label", "neighbor label");
    return s;
  }
};

}  // namespace

ClassificationMetrics classification_metrics(std::span<const std::string> gold, std::span<const std::string> predicted) {
  require(gold.size() == predicted.size(), "gold and predicted labels differ in length");
  ClassificationMetrics m;
  std::set<std::string> labels(gold.begin(), gold.end());
  labels.insert(predicted.begin(), predicted.end());
  m.labels.assign(labels.begin(), labels.end());
  if (gold.empty()) return m;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) correct += gold[i] == predicted[i];
  m.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
  for (const auto& label : m.labels) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool g = gold[i] == label, p = predicted[i] == label;
      tp += g && p;
      fp += !g && p;
      fn += g && !p;
    }
    const double precision = safe_div(tp, tp + fp);
    const double recall = safe_div(tp, tp + fn);
    m.precision += precision;
    m.recall += recall;
    m.f_score += safe_div(2.0 * precision * recall, precision + recall);
  }
  const double n = static_cast<double>(m.labels.size());
  m.precision /= n;
  m.recall /= n;
  m.f_score /= n;
  return m;
}

GroupMetrics group_metrics(const std::vector<bool>& minority, const std::vector<bool>& favorable) {
  require(minority.size() == favorable.size(), "group and outcome vectors differ in length");
  GroupMetrics m;
  for (std::size_t i = 0; i < minority.size(); ++i) {
    if (minority[i]) {
      ++m.minority_size;
      m.minority_favorable += favorable[i];
    } else {
      ++m.majority_size;
      m.majority_favorable += favorable[i];
    }
  }
  const double nan = std::nan("");
  m.minority_rate = m.minority_size ? static_cast<double>(m.minority_favorable) / static_cast<double>(m.minority_size) : nan;
  m.majority_rate = m.majority_size ? static_cast<double>(m.majority_favorable) / static_cast<double>(m.majority_size) : nan;
  m.demographic_parity = m.minority_rate - m.majority_rate;
  if (m.minority_size == 0 || m.majority_size == 0 || (m.minority_favorable == 0 && m.majority_favorable == 0)) {
    m.disparate_impact = nan;
    m.defined = false;
    return m;
  }
  m.defined = true;
  m.disparate_impact = m.majority_favorable == 0 ? std::numeric_limits<double>::infinity()
                                                 : m.minority_rate / m.majority_rate;
  return m;
}

std::vector<ProtectedPair> individual_pairs(const TableSchema& schema, std::span<const Row> rows,
                                            const std::vector<std::string>& attributes) {
  std::vector<std::size_t> columns;
  for (const auto& a : attributes) {
    const std::size_t c = schema.require_index(a);
    if (schema.columns[c].is_numeric()) {
      fail(ErrorCode::kInvalidArgument, "protected attribute '" + a + "' must be categorical");
    }
    columns.push_back(c);
  }
  std::vector<ProtectedPair> pairs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      const std::size_t c = columns[k];
      const std::string current = synth::cell_text(rows[i][c]);
      for (const auto& alt : schema.columns[c].categories) {
        if (alt == current) continue;
        ProtectedPair p;
        p.source = i;
        p.attribute = attributes[k];
        p.original = rows[i];
        p.transformed = rows[i];
        p.transformed[c] = alt;
        pairs.push_back(std::move(p));
      }
    }
  }
  return pairs;
}

std::vector<Row> robustness_neighbors(const TableSchema& schema, const Row& row, double epsilon, std::size_t count,
                                      Rng& rng) {
  std::vector<Row> out;
  for (std::size_t n = 0; n < count; ++n) {
    Row r = row;
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      const auto& col = schema.columns[c];
      if (!col.is_numeric()) continue;
      const double radius = epsilon * col.range();
      const double moved = synth::cell_number(row[c]) + uniform_real(rng, -radius, radius);
      r[c] = std::clamp(moved, col.min, col.max);
    }
    out.push_back(std::move(r));
  }
  return out;
}

synth::SchemaOptions tabular_schema_options(const TesterInput& input, const std::string& extra_exclude) {
  synth::SchemaOptions opts;
  const Json& v = input.data_specific.contains("protected_attributes") ? input.data_specific.at("protected_attributes")
                                                                       : Json();
  if (v.is_string()) opts.force_categorical.insert(v.get<std::string>());
  if (v.is_array()) {
    for (const auto& a : v) {
      if (a.is_string()) opts.force_categorical.insert(a.get<std::string>());
    }
  }
  if (input.data_specific.contains("label_column") && input.data_specific.at("label_column").is_string()) {
    opts.exclude.insert(input.data_specific.at("label_column").get<std::string>());
  }
  if (!extra_exclude.empty()) opts.exclude.insert(extra_exclude);
  return opts;
}

SourceRows tabular_source_rows(const TesterInput& input, const gateway::PredictorHandle& predictor) {
  const synth::Table table = synth::table_from_csv(parse_csv(input.training), tabular_schema_options(input));
  if (table.size() == 0) fail(ErrorCode::kFailedPrecondition, "empty training data");
  SourceRows src;
  src.schema = table.schema;
  src.path_coverage = std::nan("");
  const std::size_t limit = input.generation_limit;
  const std::string source = input.parameters.value("row_source", std::string("synthetic"));
  if (source == "training") {
    for (std::size_t i : pick_rows(table.size(), limit, input.seed)) src.rows.push_back(table.rows[i]);
    return src;
  }
  require(source == "synthetic", "row_source must be 'synthetic' or 'training'");
  src.synthetic = true;
  synth::JointDistributionModel model = synth::fit_distribution_model(table);
  if (input.data_specific.contains("udc") && !input.data_specific.at("udc").is_null()) {
    model = synth::apply_udc(model, synth::UserDefinedConstraint::parse(input.data_specific.at("udc")));
  }
  src.artifacts["distribution_model"] = model;
  const std::uint64_t sample_seed = derive_seed(input.seed, 3);
  if (!input.parameters.value("path_guided", true)) {
    src.rows = synth::sample_joint(model, limit, sample_seed);
    return src;
  }

  synth::Table labeled{table.schema, {}};
  for (std::size_t i : pick_rows(table.size(), kSurrogateRowCap, derive_seed(input.seed, 1))) {
    labeled.rows.push_back(table.rows[i]);
  }
  const synth::SurrogateTree tree = synth::fit_surrogate(labeled, predictor, {}, derive_seed(input.seed, 2));
  src.artifacts["surrogate"] = tree;
  const auto paths = synth::extract_paths(tree);
  try {
    auto gen = synth::generate_for_paths(paths, model, limit, sample_seed);
    src.rows = std::move(gen.rows);
    src.warnings = std::move(gen.warnings);
    Json allocation = Json::array();
    for (const auto& a : gen.allocation) {
      allocation.push_back({{"path", paths[a.path_index].to_string()},
                            {"satisfiable", a.satisfiable},
                            {"quota", a.quota},
                            {"emitted", a.emitted},
                            {"fallback_rows", a.fallback_rows}});
    }
    src.artifacts["path_allocation"] = allocation;
  } catch (const Error& e) {
    src.warnings.push_back(std::string("path-guided generation unavailable (") + e.what() +
                           "); sampled from the joint distribution instead");
    src.rows = synth::sample_joint(model, limit, sample_seed);
  }
  src.path_coverage = synth::path_coverage(src.rows, tree, &model);
  return src;
}

std::shared_ptr<const Tester> make_correctness_tester() { return std::make_shared<CorrectnessTester>(); }
std::shared_ptr<const Tester> make_group_discrimination_tester() {
  return std::make_shared<GroupDiscriminationTester>();
}
std::shared_ptr<const Tester> make_individual_discrimination_tester() {
  return std::make_shared<IndividualDiscriminationTester>();
}
std::shared_ptr<const Tester> make_robustness_tester() { return std::make_shared<RobustnessTester>(); }

}  // namespace modelprobe::testers
