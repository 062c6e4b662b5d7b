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

#include "modelprobe/common/error.hpp"
#include "modelprobe/gateway/jsonpath.hpp"

namespace modelprobe::gateway {
namespace {

std::vector<Json> eval(std::string_view path, const Json& doc) {
  std::vector<Json> out;
  for (const Json* n : JsonPath::parse(path).evaluate(doc)) out.push_back(*n);
  return out;
}

const Json kDoc = Json::parse(R"({
  "predictions": [{"label": "yes", "p": 0.9}, {"label": "no", "p": 0.6}],
  "meta": {"model": {"label": "deep"}, "list": [1, 2, 3]}
})");

TEST(JsonPathTest, WildcardChildInDocumentOrder) {
  EXPECT_EQ(eval("$.predictions[*].label", kDoc), (std::vector<Json>{"yes", "no"}));
  EXPECT_EQ(eval("$.predictions[*].p", kDoc), (std::vector<Json>{0.9, 0.6}));
}

TEST(JsonPathTest, BracketAndIndexSelectors) {
  EXPECT_EQ(eval("$['predictions'][1]['label']", kDoc), (std::vector<Json>{"no"}));
  EXPECT_EQ(eval("$.meta.list[-1]", kDoc), (std::vector<Json>{3}));
  EXPECT_TRUE(eval("$.meta.list[7]", kDoc).empty());
  EXPECT_EQ(eval("$.meta.*", kDoc).size(), 2u);
}

TEST(JsonPathTest, RecursiveDescent) {
  EXPECT_EQ(eval("$..label", kDoc), (std::vector<Json>{"yes", "no", "deep"}));
  // meta -> {model, list}, model -> {"deep"}, list -> {1, 2, 3}
  EXPECT_EQ(eval("$.meta..[*]", kDoc).size(), 6u);
}

TEST(JsonPathTest, RootSelectsDocument) {
  EXPECT_EQ(eval("$", kDoc).front(), kDoc);
}

TEST(JsonPathTest, RejectsUnsupportedSyntax) {
  EXPECT_THROW(JsonPath::parse("predictions"), Error);
  EXPECT_THROW(JsonPath::parse("$.predictions[?(@.p > 0.5)]"), Error);
  EXPECT_THROW(JsonPath::parse("$.predictions[0:2]"), Error);
  EXPECT_THROW(JsonPath::parse("$.predictions["), Error);
  EXPECT_THROW(JsonPath::parse("$."), Error);
}

}  // namespace
}  // namespace modelprobe::gateway
