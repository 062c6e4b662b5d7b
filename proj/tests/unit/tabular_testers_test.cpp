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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "modelprobe/common/random.hpp"
#include "modelprobe/testers/tabular.hpp"
#include "test_support.hpp"
#include "tester_fixtures.hpp"

namespace modelprobe::testers {
namespace {

using modelprobe::testing::categorical_column;
using modelprobe::testing::mock_handle;
using modelprobe::testing::numeric_column;
using modelprobe::testing::tester_input;

// group alternates A/B; score walks 0.00 .. 0.99 in a fixed scramble.
std::string planted_bias_csv(std::size_t n) {
  std::ostringstream out;
  out << "group,score,x\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << (i % 2 ? "B" : "A") << "," << static_cast<double>((i * 37) % 100) / 100.0 << "," << i % 7 << "\n";
  }
  return out.str();
}

struct OracleCounts {
  double tp = 0, fp = 0, fn = 0;
};

// Macro precision/recall/F1 written out per label, independent of the
// implementation's single pass.
std::vector<double> oracle_macro(const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
  std::set<std::string> labels(gold.begin(), gold.end());
  labels.insert(pred.begin(), pred.end());
  double p = 0, r = 0, f = 0;
  for (const auto& l : labels) {
    OracleCounts c;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (pred[i] == l && gold[i] == l) c.tp++;
      if (pred[i] == l && gold[i] != l) c.fp++;
      if (pred[i] != l && gold[i] == l) c.fn++;
    }
    const double pl = c.tp + c.fp > 0 ? c.tp / (c.tp + c.fp) : 0.0;
    const double rl = c.tp + c.fn > 0 ? c.tp / (c.tp + c.fn) : 0.0;
    p += pl;
    r += rl;
    f += pl + rl > 0 ? 2 * pl * rl / (pl + rl) : 0.0;
  }
  const double k = static_cast<double>(labels.size());
  return {p / k, r / k, f / k};
}

TEST(ClassificationMetricsTest, BinaryConfusionMatrix) {
  // TP=4, FP=1, FN=1, TN=4 with "1" as the positive label.
  std::vector<std::string> gold{"1", "1", "1", "1", "1", "0", "0", "0", "0", "0"};
  std::vector<std::string> pred{"1", "1", "1", "1", "0", "1", "0", "0", "0", "0"};
  const auto m = classification_metrics(gold, pred);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.8);
  EXPECT_DOUBLE_EQ(m.precision, 0.8);
  EXPECT_DOUBLE_EQ(m.recall, 0.8);
  EXPECT_DOUBLE_EQ(m.f_score, 0.8);
}

TEST(ClassificationMetricsTest, ThreeClassMacroAverage) {
  // Precision per class: a 1/2, b 1/2, c 1/2 -> 0.5.
  std::vector<std::string> gold{"a", "b", "b", "c", "c", "a"};
  std::vector<std::string> pred{"a", "b", "a", "c", "b", "c"};
  const auto m = classification_metrics(gold, pred);
  EXPECT_DOUBLE_EQ(m.precision, 0.5);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.5);
  EXPECT_EQ(m.labels, (std::vector<std::string>{"a", "b", "c"}));
}

TEST(ClassificationMetricsTest, NeverPredictedLabelCountsAsZero) {
  const auto m = classification_metrics(std::vector<std::string>{"x", "y"}, std::vector<std::string>{"x", "x"});
  EXPECT_DOUBLE_EQ(m.precision, (0.5 + 0.0) / 2);
  EXPECT_DOUBLE_EQ(m.recall, (1.0 + 0.0) / 2);
}

TEST(ClassificationMetricsTest, MatchesOracleOnRandomLabels) {
  Rng rng(11);
  const std::vector<std::string> alphabet{"p", "q", "r", "s"};
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 40);
    std::vector<std::string> gold, pred;
    for (std::size_t i = 0; i < n; ++i) {
      gold.push_back(alphabet[uniform_index(rng, 3)]);
      pred.push_back(alphabet[uniform_index(rng, 4)]);
    }
    const auto m = classification_metrics(gold, pred);
    const auto o = oracle_macro(gold, pred);
    EXPECT_NEAR(m.precision, o[0], 1e-12);
    EXPECT_NEAR(m.recall, o[1], 1e-12);
    EXPECT_NEAR(m.f_score, o[2], 1e-12);
    for (double v : {m.accuracy, m.precision, m.recall, m.f_score}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

std::pair<std::vector<bool>, std::vector<bool>> groups(std::size_t min_n, std::size_t min_fav, std::size_t maj_n,
                                                       std::size_t maj_fav) {
  std::vector<bool> minority, favorable;
  for (std::size_t i = 0; i < min_n; ++i) {
    minority.push_back(true);
    favorable.push_back(i < min_fav);
  }
  for (std::size_t i = 0; i < maj_n; ++i) {
    minority.push_back(false);
    favorable.push_back(i < maj_fav);
  }
  return {minority, favorable};
}

TEST(GroupMetricsTest, FortyAgainstFifty) {
  auto [m, f] = groups(100, 40, 100, 50);
  const auto g = group_metrics(m, f);
  ASSERT_TRUE(g.defined);
  EXPECT_DOUBLE_EQ(g.disparate_impact, 0.8);
  EXPECT_DOUBLE_EQ(g.demographic_parity, -0.1);
  EXPECT_EQ(evaluate_metric(*modelprobe::testing::builtin("group-discrimination").find_metric("disparate_impact"),
                            g.disparate_impact,
                            bind_parameters(modelprobe::testing::builtin("group-discrimination"), Json::object())),
            MetricVerdict::kPass);
}

TEST(GroupMetricsTest, ThirtyAgainstSixtyFails) {
  auto [m, f] = groups(100, 30, 100, 60);
  const auto g = group_metrics(m, f);
  EXPECT_DOUBLE_EQ(g.disparate_impact, 0.5);
  const auto def = modelprobe::testing::builtin("group-discrimination");
  EXPECT_EQ(evaluate_metric(*def.find_metric("disparate_impact"), g.disparate_impact, bind_parameters(def, {})),
            MetricVerdict::kFail);
}

TEST(GroupMetricsTest, UndefinedAndInfiniteCases) {
  auto [m1, f1] = groups(0, 0, 10, 5);
  EXPECT_FALSE(group_metrics(m1, f1).defined);
  EXPECT_TRUE(std::isnan(group_metrics(m1, f1).disparate_impact));
  auto [m2, f2] = groups(10, 0, 10, 0);
  EXPECT_FALSE(group_metrics(m2, f2).defined);
  auto [m3, f3] = groups(10, 3, 10, 0);
  EXPECT_TRUE(group_metrics(m3, f3).defined);
  EXPECT_TRUE(std::isinf(group_metrics(m3, f3).disparate_impact));
}

TEST(GroupMetricsTest, InvariantUnderRowOrderAndReciprocalUnderGroupSwap) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 60);
    std::vector<bool> minority(n), favorable(n);
    for (std::size_t i = 0; i < n; ++i) {
      minority[i] = uniform_index(rng, 2) == 1;
      favorable[i] = uniform_index(rng, 2) == 1;
    }
    const auto base = group_metrics(minority, favorable);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    seeded_shuffle(order, rng);
    std::vector<bool> pm(n), pf(n), swapped(n);
    for (std::size_t i = 0; i < n; ++i) {
      pm[i] = minority[order[i]];
      pf[i] = favorable[order[i]];
      swapped[i] = !minority[i];
    }
    const auto permuted = group_metrics(pm, pf);
    EXPECT_EQ(permuted.defined, base.defined);
    if (base.defined) EXPECT_DOUBLE_EQ(permuted.disparate_impact, base.disparate_impact);
    const auto flipped = group_metrics(swapped, favorable);
    if (base.defined && std::isfinite(base.disparate_impact) && base.disparate_impact > 0) {
      EXPECT_NEAR(flipped.disparate_impact * base.disparate_impact, 1.0, 1e-12);
    }
  }
}

TEST(IndividualPairsTest, OneRowThreeCategoriesGivesTwoPairs) {
  synth::TableSchema schema{{categorical_column("group", {"A", "B", "C"}), numeric_column("score", 0, 1)}};
  std::vector<synth::Row> rows{{std::string("A"), 0.3}};
  const auto pairs = individual_pairs(schema, rows, {"group"});
  ASSERT_EQ(pairs.size(), 2u);
  std::set<std::string> seen;
  for (const auto& p : pairs) {
    EXPECT_EQ(std::get<std::string>(p.original[0]), "A");
    EXPECT_EQ(std::get<double>(p.transformed[1]), 0.3);
    seen.insert(std::get<std::string>(p.transformed[0]));
  }
  EXPECT_EQ(seen, (std::set<std::string>{"B", "C"}));
}

TEST(IndividualPairsTest, NumericProtectedAttributeIsRejected) {
  synth::TableSchema schema{{numeric_column("age", 0, 90)}};
  std::vector<synth::Row> rows{{30.0}};
  EXPECT_THROW(individual_pairs(schema, rows, {"age"}), Error);
}

TEST(RobustnessNeighborsTest, StayInsideDomainAndBall) {
  synth::TableSchema schema{{numeric_column("x", 0, 10), categorical_column("c", {"u", "v"}), numeric_column("y", -1, 1)}};
  Rng rng(3);
  for (double x : {0.0, 5.0, 10.0}) {
    synth::Row row{x, std::string("v"), 1.0};
    const auto ns = robustness_neighbors(schema, row, 0.1, 20, rng);
    ASSERT_EQ(ns.size(), 20u);
    for (const auto& n : ns) {
      const double nx = std::get<double>(n[0]), ny = std::get<double>(n[2]);
      EXPECT_GE(nx, 0.0);
      EXPECT_LE(nx, 10.0);
      EXPECT_LE(std::abs(nx - x), 0.1 * 10 + 1e-12);
      EXPECT_GE(ny, -1.0);
      EXPECT_LE(ny, 1.0);
      EXPECT_LE(std::abs(ny - 1.0), 0.1 * 2 + 1e-12);
      EXPECT_EQ(std::get<std::string>(n[1]), "v");
    }
  }
}

TEST(RobustnessNeighborsTest, ReplayableFromSeed) {
  synth::TableSchema schema{{numeric_column("x", 0, 1)}};
  synth::Row row{0.5};
  Rng a(neighbor_seed(9, 4)), b(neighbor_seed(9, 4));
  const auto first = robustness_neighbors(schema, row, 0.05, 4, a);
  const auto second = robustness_neighbors(schema, row, 0.05, 4, b);
  EXPECT_EQ(first, second);
}

TEST(CorrectnessTesterTest, ThresholdModelOnLabeledRows) {
  // Gold labels follow x > 0.5 except for two rows, so accuracy is 8/10.
  std::string labeled = "x,label\n0.1,0\n0.2,0\n0.3,0\n0.4,1\n0.45,0\n0.6,1\n0.7,1\n0.8,1\n0.9,0\n0.95,1\n";
  auto in = tester_input("correctness", "x,label\n0.1,0\n0.9,1\n");
  in.labeled = labeled;
  const auto run = run_locally(*make_correctness_tester(), in, mock_handle("threshold"));
  EXPECT_EQ(run.status.generated, 10u);
  EXPECT_EQ(run.status.passed, 8u);
  ASSERT_EQ(run.summary.metrics.count("accuracy"), 1u);
  EXPECT_DOUBLE_EQ(run.summary.metrics.at("accuracy"), 0.8);
  for (const auto& c : run.generation.cases) EXPECT_FALSE(c.samples[0].contains("label"));
}

TEST(CorrectnessTesterTest, MissingGoldColumn) {
  auto in = tester_input("correctness", "x\n0.1\n");
  EXPECT_THROW(make_correctness_tester()->generate(in, mock_handle("threshold")), Error);
}

Json bias_inputs() {
  return Json{{"protected_attributes", Json::array({"group"})},
              {"favorable_label", "favorable"},
              {"minority_group", "group == 'B'"}};
}

TEST(GroupDiscriminationTesterTest, TrainingRowsMatchOracle) {
  const std::string csv = planted_bias_csv(200);
  auto in = tester_input("group-discrimination", csv, bias_inputs(), Json{{"row_source", "training"}});
  in.generation_limit = 1000;
  const auto run = run_locally(*make_group_discrimination_tester(), in, mock_handle("planted-bias"));
  ASSERT_EQ(run.generation.cases.size(), 1u);
  std::size_t b = 0, b_fav = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    if (i % 2 == 0) continue;
    ++b;
    b_fav += static_cast<double>((i * 37) % 100) / 100.0 > 0.5;
  }
  const double expected = static_cast<double>(b_fav) / static_cast<double>(b);
  EXPECT_DOUBLE_EQ(run.summary.metrics.at("disparate_impact"), expected);
  EXPECT_DOUBLE_EQ(run.summary.metrics.at("majority_favorable_rate"), 1.0);
  EXPECT_EQ(run.verdict, "fail");
}

TEST(GroupDiscriminationTesterTest, SyntheticRowsAgreeWithDirectPredictions) {
  auto in = tester_input("group-discrimination", planted_bias_csv(300), bias_inputs());
  in.generation_limit = 120;
  in.seed = 17;
  const auto model = gateway::MockModel::from_name("planted-bias");
  const auto run = run_locally(*make_group_discrimination_tester(), in, mock_handle("planted-bias"));
  ASSERT_EQ(run.generation.cases.size(), 1u);
  const auto& c = run.generation.cases[0];
  EXPECT_LE(c.samples.size(), 120u);
  std::vector<bool> minority, favorable;
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    minority.push_back(c.samples[i].at("group") == "B");
    EXPECT_EQ(c.role_tags[i], minority.back() ? "minority" : "majority");
    favorable.push_back(gateway::mock_predict(model, c.samples[i]).label == "favorable");
  }
  const auto g = group_metrics(minority, favorable);
  if (g.defined) EXPECT_DOUBLE_EQ(run.summary.metrics.at("disparate_impact"), g.disparate_impact);
  EXPECT_TRUE(run.status.consistent());
}

TEST(GroupDiscriminationTesterTest, ConstantModelIsUndefined) {
  auto in = tester_input("group-discrimination", planted_bias_csv(40), bias_inputs(), Json{{"row_source", "training"}});
  const auto run = run_locally(*make_group_discrimination_tester(), in, mock_handle("constant"));
  EXPECT_EQ(run.status.errored, 1u);
  EXPECT_EQ(run.verdict, "error");
  EXPECT_NE(run.results[0].detail.find("undefined DI"), std::string::npos);
}

TEST(IndividualDiscriminationTesterTest, FlipRateMatchesOracle) {
  const std::size_t n = 150;
  auto in = tester_input("individual-discrimination", planted_bias_csv(n), bias_inputs(),
                         Json{{"row_source", "training"}});
  in.generation_limit = 1000;
  const auto run = run_locally(*make_individual_discrimination_tester(), in, mock_handle("planted-bias"));
  // Changing A<->B flips the outcome exactly when the score alone would not
  // earn the favorable label.
  std::size_t flips = 0;
  for (std::size_t i = 0; i < n; ++i) flips += static_cast<double>((i * 37) % 100) / 100.0 <= 0.5;
  EXPECT_EQ(run.generation.cases.size(), n);
  EXPECT_EQ(run.status.failed, flips);
  EXPECT_DOUBLE_EQ(run.summary.metrics.at("flip_rate"), static_cast<double>(flips) / static_cast<double>(n));
}

TEST(IndividualDiscriminationTesterTest, UnbiasedModelNeverFlips) {
  auto in = tester_input("individual-discrimination", planted_bias_csv(60), bias_inputs(),
                         Json{{"row_source", "training"}});
  const auto run = run_locally(*make_individual_discrimination_tester(), in,
                               mock_handle("threshold", Json{{"column", "score"}}));
  EXPECT_EQ(run.status.failed, 0u);
  EXPECT_DOUBLE_EQ(run.summary.metrics.at("flip_rate"), 0.0);
}

TEST(RobustnessTesterTest, CasesPerRowAndReplay) {
  auto in = tester_input("adversarial-robustness", "x,c\n0.1,u\n0.49,v\n0.51,u\n0.9,v\n", Json::object(),
                         Json{{"row_source", "training"}, {"epsilon", 0.05}, {"neighbors_per_sample", 3}});
  in.seed = 21;
  const auto tester = make_robustness_tester();
  const auto first = run_locally(*tester, in, mock_handle("threshold"));
  const auto second = run_locally(*tester, in, mock_handle("threshold"));
  EXPECT_EQ(first.generation.cases.size(), 12u);
  ASSERT_EQ(first.generation.cases.size(), second.generation.cases.size());
  for (std::size_t i = 0; i < first.generation.cases.size(); ++i) {
    EXPECT_EQ(first.generation.cases[i].samples, second.generation.cases[i].samples);
  }
  // Far from the threshold nothing can flip: only rows 0.49 and 0.51 may.
  for (std::size_t i = 0; i < first.results.size(); ++i) {
    const double x = first.generation.cases[i].samples[0].at("x").get<double>();
    if (std::abs(x - 0.5) > 0.05 * 0.8) EXPECT_EQ(first.results[i].verdict, Verdict::kPass);
  }
}

TEST(RobustnessTesterTest, NoNumericColumnIsSkipped) {
  auto in = tester_input("adversarial-robustness", "c,d\nu,p\nv,q\n");
  const auto run = run_locally(*make_robustness_tester(), in, mock_handle("constant"));
  EXPECT_TRUE(run.generation.cases.empty());
  EXPECT_EQ(run.verdict, "skipped");
}

TEST(TesterRegistryTest, EveryBuiltinPropertyHasATester) {
  for (const auto& p : builtin_properties()) EXPECT_NE(find_tester(p.tester), nullptr) << p.id;
  EXPECT_EQ(find_tester("no-such-tester"), nullptr);
}

TEST(PredictCasesTest, IdenticalSamplesArePredictedOnce) {
  auto calls = std::make_shared<std::atomic<std::size_t>>(0);
  std::vector<TestCase> cases(3);
  cases[0].samples = {Json{{"x", 1}}, Json{{"x", 2}}};
  cases[1].samples = {Json{{"x", 2}}};
  cases[2].samples = {Json{{"x", 1}}, Json{{"x", 3}}};
  const auto out = predict_cases(cases, mock_handle("threshold", Json::object(), calls));
  EXPECT_EQ(calls->load(), 3u);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].size(), 2u);
  EXPECT_EQ(out[1][0].prediction->label, out[0][1].prediction->label);
}

TEST(RunVerdictTest, Rules) {
  StatusSnapshot none{};
  EXPECT_EQ(run_verdict({}, none), "error");
  StatusSnapshot all_err{3, 3, 0, 0, 3};
  EXPECT_EQ(run_verdict({}, all_err), "error");
  StatusSnapshot some_fail{3, 3, 2, 1, 0};
  EXPECT_EQ(run_verdict({}, some_fail), "fail");
  std::vector<RunMetric> ok{{"m", 0.1, MetricVerdict::kPass, ""}};
  EXPECT_EQ(run_verdict(ok, some_fail), "pass");
  ok.push_back({"n", 2.0, MetricVerdict::kFail, ""});
  EXPECT_EQ(run_verdict(ok, some_fail), "fail");
}

TEST(CountGridTest, RowsNormalized) {
  const Json g = count_grid({{"a", "x"}, {"a", "y"}, {"a", "y"}, {"b", "x"}}, "r", "c");
  EXPECT_EQ(g["rows"], Json::array({"a", "b"}));
  EXPECT_EQ(g["columns"], Json::array({"x", "y"}));
  EXPECT_DOUBLE_EQ(g["values"][0][0].get<double>(), 1.0 / 3);
  EXPECT_DOUBLE_EQ(g["values"][1][0].get<double>(), 1.0);
}

}  // namespace
}  // namespace modelprobe::testers
