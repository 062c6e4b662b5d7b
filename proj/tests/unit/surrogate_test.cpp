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

#include "modelprobe/common/error.hpp"
#include "modelprobe/gateway/mock_models.hpp"
#include "modelprobe/synth/surrogate.hpp"
#include "test_support.hpp"

namespace modelprobe::synth {
namespace {

using gateway::MockModel;
using gateway::MockModelKind;
using gateway::PredictorHandle;
using modelprobe::testing::categorical_column;
using modelprobe::testing::numeric_column;

Table fixture(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Table t;
  t.schema.columns = {numeric_column("x", 0, 1), categorical_column("group", {"A", "B"}),
                      numeric_column("score", 0, 1), numeric_column("noise", -1, 1)};
  for (std::size_t i = 0; i < n; ++i) {
    t.rows.push_back({uniform_real(rng, 0, 1), std::string(uniform_index(rng, 2) ? "B" : "A"),
                      uniform_real(rng, 0, 1), uniform_real(rng, -1, 1)});
  }
  return t;
}

PredictorHandle local(const MockModel& model, const TableSchema&) {
  return PredictorHandle::from_function(std::string(gateway::mock_kind_name(model.kind())),
                                        [model](const gateway::Sample& s) {
                                          return gateway::PredictionOutcome{gateway::mock_predict(model, s), ""};
                                        });
}

TEST(SurrogateTest, ConstantModelGivesSingleLeaf) {
  const auto t = fixture(500, 1);
  const auto tree = fit_surrogate(t, local(MockModel(MockModelKind::kConstant), t.schema), {}, 7);
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_TRUE(tree.nodes()[0].leaf);
  EXPECT_EQ(tree.nodes()[0].label, "no");
  EXPECT_EQ(tree.fidelity(), 1.0);
  EXPECT_EQ(tree.depth(), 0u);
}

TEST(SurrogateTest, ThresholdModelIsRecovered) {
  const auto t = fixture(2000, 2);
  const auto tree = fit_surrogate(t, local(MockModel(MockModelKind::kThreshold), t.schema), {}, 7);
  EXPECT_EQ(tree.depth(), 1u);
  const auto& root = tree.nodes()[0];
  ASSERT_FALSE(root.leaf);
  EXPECT_EQ(t.schema.columns[root.column].name, "x");
  EXPECT_GE(root.threshold, 0.45);
  EXPECT_LE(root.threshold, 0.55);
  EXPECT_GE(tree.fidelity(), 0.95);
}

TEST(SurrogateTest, PlantedBiasSplitsOnProtectedColumn) {
  const auto t = fixture(2000, 3);
  const auto tree = fit_surrogate(t, local(MockModel(MockModelKind::kPlantedBias), t.schema), {}, 7);
  const auto cols = tree.split_columns();
  EXPECT_NE(std::find(cols.begin(), cols.end(), "group"), cols.end());
  EXPECT_GE(tree.fidelity(), 0.95);
}

TEST(SurrogateTest, RespectsDepthAndLeafSize) {
  const auto t = fixture(1500, 4);
  std::vector<std::string> labels;
  Rng rng(1);
  for (std::size_t i = 0; i < t.size(); ++i) labels.push_back(std::to_string(uniform_index(rng, 3)));
  SurrogateOptions opt;
  opt.max_depth = 3;
  opt.min_leaf = 50;
  const auto tree = fit_cart(t, labels, opt, 5);
  EXPECT_LE(tree.depth(), 3u);
  for (std::size_t leaf : tree.leaves()) EXPECT_GE(tree.nodes()[leaf].support, 50u);
}

TEST(SurrogateTest, RouterIsTotal) {
  // Every schema-valid row, including unseen categories, lands on exactly one leaf.
  const auto t = fixture(2000, 5);
  const auto tree = fit_surrogate(t, local(MockModel(MockModelKind::kPlantedBias), t.schema), {}, 7);
  const auto leaves = tree.leaves();
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const std::string g = i % 10 == 0 ? "Z" : (uniform_index(rng, 2) ? "A" : "B");
    const Row row{uniform_real(rng, 0, 1), g, uniform_real(rng, 0, 1), uniform_real(rng, -1, 1)};
    const std::size_t leaf = tree.route(row);
    EXPECT_EQ(std::count(leaves.begin(), leaves.end(), leaf), 1);
  }
}

TEST(SurrogateTest, AbortsWhenTooManyPredictionsFail) {
  const auto t = fixture(200, 6);
  int calls = 0;
  auto flaky = PredictorHandle::from_function("flaky", [&calls](const gateway::Sample&) {
    return ++calls % 5 == 0 ? gateway::PredictionOutcome::failure("boom")
                            : gateway::PredictionOutcome{gateway::Prediction{"a", std::nullopt, {}}, ""};
  });
  try {
    fit_surrogate(t, flaky, {}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFailedPrecondition);
    EXPECT_EQ(e.detail(), "boom");
  }
}

TEST(SurrogateTest, DeterministicAndSerializable) {
  const auto t = fixture(800, 8);
  const auto model = local(MockModel(MockModelKind::kPlantedBias), t.schema);
  const auto a = fit_surrogate(t, model, {}, 3);
  const auto b = fit_surrogate(t, model, {}, 3);
  EXPECT_EQ(Json(a).dump(), Json(b).dump());
  const auto back = Json(a).get<SurrogateTree>();
  EXPECT_EQ(Json(back).dump(), Json(a).dump());
  EXPECT_EQ(back.fidelity(), a.fidelity());
}

}  // namespace
}  // namespace modelprobe::synth
