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

#include "modelprobe/common/error.hpp"
#include "modelprobe/synth/distribution.hpp"
#include "test_support.hpp"

namespace modelprobe::synth {
namespace {

using modelprobe::testing::categorical_column;
using modelprobe::testing::numeric_column;
using modelprobe::testing::oracle_mi;

Table correlated_pair(std::size_t n) {
  Table t;
  t.schema.columns = {categorical_column("c1", {"0", "1"}), categorical_column("c2", {"0", "1"})};
  for (std::size_t i = 0; i < n; ++i) {
    const std::string v = i % 2 ? "1" : "0";
    t.rows.push_back({v, v});
  }
  return t;
}

// group (A/B/C), age depends on group, y depends on age, score independent.
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

std::vector<double> state_frequencies(const ColumnMarginal& m, const Table& t, std::size_t column) {
  std::vector<double> freq(m.state_count(), 0.0);
  for (std::size_t s : discretize(m, t, column)) freq[s] += 1.0 / static_cast<double>(t.size());
  return freq;
}

double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::fabs(a[i] - b[i]);
  return d;
}

bool has_edge(const JointDistributionModel& m, const std::string& a, const std::string& b) {
  return std::any_of(m.edges.begin(), m.edges.end(), [&](const DependencyEdge& e) {
    return (e.parent == a && e.child == b) || (e.parent == b && e.child == a);
  });
}

// --- fit ------------------------------------------------------------------------------

TEST(FitDistributionTest, PerfectlyCorrelatedPairHasLn2Edge) {
  const auto model = fit_distribution_model(correlated_pair(100));
  ASSERT_EQ(model.edges.size(), 1u);
  EXPECT_TRUE(has_edge(model, "c1", "c2"));
  EXPECT_NEAR(model.edges[0].mutual_information, std::log(2.0), 0.02);
}

TEST(FitDistributionTest, SingleColumnIsRootOnly) {
  Table t;
  t.schema.columns = {categorical_column("only", {"a", "b"})};
  t.rows = {{std::string("a")}, {std::string("b")}, {std::string("a")}};
  const auto model = fit_distribution_model(t);
  EXPECT_TRUE(model.edges.empty());
  EXPECT_EQ(model.root, "only");
  EXPECT_NEAR(model.marginals[0].probabilities[0], 2.0 / 3.0, 1e-12);
}

TEST(FitDistributionTest, EqualFrequencyQuartiles) {
  Table t;
  t.schema.columns = {numeric_column("v", 1, 100)};
  for (int i = 1; i <= 100; ++i) t.rows.push_back({static_cast<double>(i)});
  const auto model = fit_distribution_model(t, FitOptions{4, 1.0});
  const auto& m = model.marginals[0];
  ASSERT_EQ(m.state_count(), 4u);
  for (double p : m.probabilities) EXPECT_NEAR(p, 0.25, 0.01);
  EXPECT_EQ(m.bins.front().lo, 1.0);
  EXPECT_EQ(m.bins.back().hi, 100.0);
}

TEST(FitDistributionTest, BinsCollapseOnRepeatedValues) {
  const auto bins = equal_frequency_bins({5, 5, 5, 5, 5, 5, 1, 9}, 4);
  for (std::size_t i = 1; i < bins.size(); ++i) EXPECT_LE(bins[i - 1].hi, bins[i].lo);
  EXPECT_LT(bins.size(), 4u);
  EXPECT_EQ(equal_frequency_bins({3, 3, 3}, 10).size(), 1u);
}

TEST(FitDistributionTest, RejectsTooFewRows) {
  Table t;
  t.schema.columns = {categorical_column("a", {"x"})};
  t.rows = {{std::string("x")}};
  EXPECT_THROW(fit_distribution_model(t), Error);
}

TEST(FitDistributionTest, MutualInformationMatchesOracle) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> a, b;
    std::vector<std::vector<double>> counts(3, std::vector<double>(4, 0.0));
    for (int i = 0; i < 200; ++i) {
      const std::size_t x = uniform_index(rng, 3);
      const std::size_t y = uniform_real(rng, 0, 1) < 0.6 ? x : uniform_index(rng, 4);
      a.push_back(std::to_string(x));
      b.push_back(std::to_string(y));
      counts[x][y] += 1.0;
    }
    EXPECT_NEAR(mutual_information(counts), oracle_mi(a, b), 1e-9);
  }
}

TEST(FitDistributionTest, ChowLiuMaximizesTotalMiOnThreeColumns) {
  // Exhaustive check over the three spanning trees of every 3-column fixture.
  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const double pab = uniform_real(rng, 0, 1), pbc = uniform_real(rng, 0, 1), pac = uniform_real(rng, 0, 1);
    Table t;
    t.schema.columns = {categorical_column("a", {"0", "1", "2"}), categorical_column("b", {"0", "1", "2"}),
                        categorical_column("c", {"0", "1", "2"})};
    std::vector<std::string> va, vb, vc;
    for (int i = 0; i < 300; ++i) {
      const std::size_t a = uniform_index(rng, 3);
      const std::size_t b = uniform_real(rng, 0, 1) < pab ? a : uniform_index(rng, 3);
      std::size_t c = uniform_index(rng, 3);
      if (uniform_real(rng, 0, 1) < pbc) c = b;
      else if (uniform_real(rng, 0, 1) < pac) c = a;
      va.push_back(std::to_string(a));
      vb.push_back(std::to_string(b));
      vc.push_back(std::to_string(c));
      t.rows.push_back({va.back(), vb.back(), vc.back()});
    }
    const double ab = oracle_mi(va, vb), bc = oracle_mi(vb, vc), ac = oracle_mi(va, vc);
    const double best = std::max({ab + bc, ab + ac, bc + ac});

    const auto model = fit_distribution_model(t);
    ASSERT_EQ(model.edges.size(), 2u);
    double chosen = 0.0;
    if (has_edge(model, "a", "b")) chosen += ab;
    if (has_edge(model, "b", "c")) chosen += bc;
    if (has_edge(model, "a", "c")) chosen += ac;
    EXPECT_NEAR(chosen, best, 1e-9) << "trial " << trial;
  }
}

TEST(FitDistributionTest, EdgesFormATreeInSamplingOrder) {
  const auto model = fit_distribution_model(mixed_table(2000, 1));
  EXPECT_EQ(model.edges.size(), model.schema.columns.size() - 1);
  const auto order = model.sampling_order();
  ASSERT_EQ(order.size(), model.schema.columns.size());
  std::vector<std::size_t> position(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
  for (const auto& e : model.edges) {
    EXPECT_LT(position[model.schema.require_index(e.parent)], position[model.schema.require_index(e.child)]);
  }
  EXPECT_EQ(model.schema.columns[order.front()].name, model.root);
}

TEST(FitDistributionTest, SmoothedConditional) {
  const auto model = fit_distribution_model(correlated_pair(100));
  const auto cond = model.conditional(model.edges[0], 0);
  // 50 matching rows, alpha = 1, two states
  EXPECT_NEAR(cond[0], 51.0 / 52.0, 1e-12);
  EXPECT_NEAR(cond[1], 1.0 / 52.0, 1e-12);
}

// --- UDC -------------------------------------------------------------------------------

TEST(UdcTest, CategoricalReplacementLeavesOthersBitwiseUnchanged) {
  Table t;
  t.schema.columns = {categorical_column("gender", {"F", "M"}), numeric_column("age", 20, 79)};
  Rng rng(2);
  for (int i = 0; i < 400; ++i) {
    t.rows.push_back({std::string(i % 3 ? "M" : "F"), uniform_real(rng, 20, 79)});
  }
  const auto model = fit_distribution_model(t);
  const auto udc = UserDefinedConstraint::parse(Json::parse(R"({"gender": {"distribution": {"F": 0.9, "M": 0.1}}})"));
  const auto out = apply_udc(model, udc);
  EXPECT_EQ(out.marginal("gender").probabilities, (std::vector<double>{0.9, 0.1}));
  EXPECT_EQ(out.marginal("age").probabilities, model.marginal("age").probabilities);
  EXPECT_TRUE(out.is_detached("gender"));
  EXPECT_TRUE(out.edges.empty());
}

TEST(UdcTest, EmptyUdcIsIdentity) {
  const auto model = fit_distribution_model(mixed_table(500, 4));
  const auto out = apply_udc(model, UserDefinedConstraint::parse(Json::object()));
  EXPECT_EQ(Json(out).dump(), Json(model).dump());
}

TEST(UdcTest, RangeKeepsIntersectingDecadesRenormalized) {
  Table t;
  t.schema.columns = {numeric_column("age", 20, 79)};
  for (int a = 20; a <= 79; ++a) t.rows.push_back({static_cast<double>(a)});
  const auto model = fit_distribution_model(t, FitOptions{6, 1.0});
  ASSERT_EQ(model.marginals[0].bins.size(), 6u);
  EXPECT_EQ(model.marginals[0].bins[4].lo, 60.0);
  EXPECT_EQ(model.marginals[0].bins[4].hi, 70.0);

  const auto out = apply_udc(model, UserDefinedConstraint::parse(Json::parse(R"({"age": {"range": [60, 80]}})")));
  const auto& m = out.marginals[0];
  ASSERT_EQ(m.bins.size(), 2u);
  EXPECT_EQ(m.bins[0].lo, 60.0);
  EXPECT_EQ(m.bins[1].lo, 70.0);
  EXPECT_NEAR(m.probabilities[0], 0.5, 1e-12);
  EXPECT_NEAR(m.probabilities[1], 0.5, 1e-12);

  for (const auto& row : sample_joint(out, 500, 9)) {
    EXPECT_GE(std::get<double>(row[0]), 60.0);
    EXPECT_LE(std::get<double>(row[0]), 80.0);
  }
}

TEST(UdcTest, Errors) {
  const auto model = fit_distribution_model(mixed_table(300, 5));
  EXPECT_THROW(apply_udc(model, UserDefinedConstraint::parse(Json::parse(R"({"age": {"range": [200, 300]}})"))),
               Error);
  EXPECT_THROW(UserDefinedConstraint::parse(Json::parse(R"({"group": {"distribution": {"A": 0.5, "B": 0.3}}})")),
               Error);
  EXPECT_THROW(apply_udc(model, UserDefinedConstraint::parse(Json::parse(R"({"nope": {"range": [1, 2]}})"))),
               Error);
  EXPECT_THROW(UserDefinedConstraint::parse(Json::parse(R"({"age": {"range": [5]}})")), Error);
  EXPECT_THROW(UserDefinedConstraint::parse(Json::parse(R"([1, 2])")), Error);
}

TEST(UdcTest, NewCategoryIsSampled) {
  const auto model = fit_distribution_model(mixed_table(300, 6));
  const auto out = apply_udc(model, UserDefinedConstraint::parse(Json::parse(R"({"group": {"distribution": {"D": 1.0}}})")));
  for (const auto& row : sample_joint(out, 50, 1)) EXPECT_EQ(std::get<std::string>(row[0]), "D");
}

TEST(UdcTest, DocumentRoundTrip) {
  const auto doc = Json::parse(R"({"gender": {"distribution": {"F": 0.9, "M": 0.1}}, "age": {"range": [60, 80]}})");
  EXPECT_EQ(UserDefinedConstraint::parse(doc).to_json(), doc);
}

// --- sampling ------------------------------------------------------------------------

TEST(SampleJointTest, DeterministicPerSeed) {
  const auto model = fit_distribution_model(mixed_table(1000, 7));
  EXPECT_EQ(sample_joint(model, 200, 42), sample_joint(model, 200, 42));
  EXPECT_NE(sample_joint(model, 200, 42), sample_joint(model, 200, 43));
}

TEST(SampleJointTest, MarginalsWithinL1) {
  const auto model = fit_distribution_model(mixed_table(20000, 8));
  Table sampled{model.schema, sample_joint(model, 10000, 99)};
  for (std::size_t c = 0; c < model.schema.columns.size(); ++c) {
    const auto freq = state_frequencies(model.marginals[c], sampled, c);
    EXPECT_LE(l1(freq, model.marginals[c].probabilities), 0.05) << model.schema.columns[c].name;
  }
}

TEST(SampleJointTest, UdcColumnFollowsUdcMarginal) {
  const auto model = fit_distribution_model(mixed_table(5000, 10));
  const auto out = apply_udc(model, UserDefinedConstraint::parse(Json::parse(R"({"group": {"distribution": {"A": 0.1, "B": 0.1, "C": 0.8}}})")));
  Table sampled{out.schema, sample_joint(out, 10000, 3)};
  EXPECT_LE(l1(state_frequencies(out.marginals[0], sampled, 0), {0.1, 0.1, 0.8}), 0.05);
}

TEST(SampleJointTest, CorrelatedPairAgreement) {
  const auto model = fit_distribution_model(correlated_pair(100));
  const auto rows = sample_joint(model, 10000, 5);
  double agree = 0.0;
  for (const auto& r : rows) agree += r[0] == r[1] ? 1.0 : 0.0;
  agree /= static_cast<double>(rows.size());
  EXPECT_GE(agree, 0.97);
  // expected agreement is the smoothed diagonal 51/52
  EXPECT_NEAR(agree, 51.0 / 52.0, 0.01);
}

TEST(SampleJointTest, NumericValuesStayInDomain) {
  const auto model = fit_distribution_model(mixed_table(1000, 11));
  for (const auto& row : sample_joint(model, 2000, 1)) {
    for (std::size_t c = 0; c < model.schema.columns.size(); ++c) {
      const auto& col = model.schema.columns[c];
      if (!col.is_numeric()) continue;
      EXPECT_GE(std::get<double>(row[c]), col.min);
      EXPECT_LE(std::get<double>(row[c]), col.max);
    }
  }
}

TEST(SampleConstrainedTest, RowsLandInsideRegion) {
  const auto model = fit_distribution_model(mixed_table(2000, 12));
  Region region = unconstrained_region(model.schema);
  region[1].interval = Interval{30.0, 40.0, true, false};
  region[0].allowed = std::set<std::string>{"B", "C"};
  region[2].excluded = {"yes"};
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const auto row = sample_constrained(model, region, rng);
    ASSERT_TRUE(row);
    EXPECT_TRUE(region_contains(model.schema, region, *row));
  }
  EXPECT_TRUE(region_satisfiable(model, region));

  region[1].interval = Interval{100.0, 200.0, false, false};
  EXPECT_FALSE(region_satisfiable(model, region));
  EXPECT_FALSE(sample_constrained(model, region, rng));
}

TEST(SerializationTest, ModelJsonRoundTrip) {
  const auto model = apply_udc(fit_distribution_model(mixed_table(800, 13)),
                               UserDefinedConstraint::parse(Json::parse(R"({"age": {"range": [30, 50]}})")));
  const Json j = model;
  const auto back = j.get<JointDistributionModel>();
  EXPECT_EQ(Json(back).dump(), j.dump());
  EXPECT_EQ(sample_joint(back, 100, 2), sample_joint(model, 100, 2));
}

}  // namespace
}  // namespace modelprobe::synth
