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

#include "modelprobe/gateway/jsonpath.hpp"

#include <cctype>
#include <charconv>

#include "modelprobe/common/error.hpp"

namespace modelprobe::gateway {
namespace {

[[noreturn]] void bad_path(std::string_view expr, std::size_t pos, const std::string& why) {
  fail(ErrorCode::kInvalidArgument,
       "jsonpath: " + why + " at offset " + std::to_string(pos) + " in '" +
           std::string(expr) + "'");
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         static_cast<unsigned char>(c) >= 0x80;
}

void collect_descendants(const Json& node, std::vector<const Json*>& out) {
  out.push_back(&node);
  if (node.is_array() || node.is_object()) {
    for (const auto& child : node) collect_descendants(child, out);
  }
}

}  // namespace

JsonPath JsonPath::parse(std::string_view expr) {
  JsonPath path;
  path.expression_ = std::string(expr);
  std::size_t i = 0;
  if (expr.empty() || expr[0] != '$') bad_path(expr, 0, "expression must start with '$'");
  ++i;

  while (i < expr.size()) {
    Step step;
    if (expr[i] == '.') {
      if (i + 1 < expr.size() && expr[i + 1] == '.') {
        step.recursive = true;
        i += 2;
        if (i < expr.size() && expr[i] == '[') {
          // handled by the bracket branch below
        } else if (i < expr.size() && expr[i] == '*') {
          step.selector = Wildcard{};
          ++i;
          path.steps_.push_back(std::move(step));
          continue;
        } else {
          const std::size_t start = i;
          while (i < expr.size() && is_name_char(expr[i])) ++i;
          if (i == start) bad_path(expr, i, "expected member name after '..'");
          step.selector = Member{std::string(expr.substr(start, i - start))};
          path.steps_.push_back(std::move(step));
          continue;
        }
      } else {
        ++i;
        if (i < expr.size() && expr[i] == '*') {
          step.selector = Wildcard{};
          ++i;
        } else {
          const std::size_t start = i;
          while (i < expr.size() && is_name_char(expr[i])) ++i;
          if (i == start) bad_path(expr, i, "expected member name after '.'");
          step.selector = Member{std::string(expr.substr(start, i - start))};
        }
        path.steps_.push_back(std::move(step));
        continue;
      }
    }

    if (i >= expr.size() || expr[i] != '[') bad_path(expr, i, "expected '.' or '['");
    ++i;
    if (i >= expr.size()) bad_path(expr, i, "unterminated '['");
    if (expr[i] == '*') {
      step.selector = Wildcard{};
      ++i;
    } else if (expr[i] == '\'' || expr[i] == '"') {
      const char quote = expr[i++];
      std::string name;
      while (i < expr.size() && expr[i] != quote) {
        if (expr[i] == '\\' && i + 1 < expr.size()) ++i;
        name.push_back(expr[i++]);
      }
      if (i >= expr.size()) bad_path(expr, i, "unterminated quoted member");
      ++i;
      step.selector = Member{std::move(name)};
    } else {
      const std::size_t start = i;
      if (expr[i] == '-') ++i;
      while (i < expr.size() && std::isdigit(static_cast<unsigned char>(expr[i]))) ++i;
      long long value = 0;
      const auto [ptr, ec] = std::from_chars(expr.data() + start, expr.data() + i, value);
      if (ec != std::errc() || ptr != expr.data() + i || i == start) {
        bad_path(expr, start, "unsupported bracket selector (only index, '*' or quoted name)");
      }
      step.selector = Index{value};
    }
    if (i >= expr.size() || expr[i] != ']') bad_path(expr, i, "expected ']'");
    ++i;
    path.steps_.push_back(std::move(step));
  }
  return path;
}

std::vector<const Json*> JsonPath::evaluate(const Json& document) const {
  std::vector<const Json*> current{&document};
  for (const Step& step : steps_) {
    std::vector<const Json*> scope;
    if (step.recursive) {
      for (const Json* node : current) collect_descendants(*node, scope);
    } else {
      scope = std::move(current);
    }
    std::vector<const Json*> next;
    for (const Json* node : scope) {
      std::visit(
          [&](const auto& sel) {
            using T = std::decay_t<decltype(sel)>;
            if constexpr (std::is_same_v<T, Member>) {
              if (node->is_object()) {
                auto it = node->find(sel.name);
                if (it != node->end()) next.push_back(&*it);
              }
            } else if constexpr (std::is_same_v<T, Index>) {
              if (node->is_array()) {
                const auto size = static_cast<long long>(node->size());
                const long long idx = sel.value < 0 ? size + sel.value : sel.value;
                if (idx >= 0 && idx < size) {
                  next.push_back(&(*node)[static_cast<std::size_t>(idx)]);
                }
              }
            } else {
              if (node->is_array() || node->is_object()) {
                for (const auto& child : *node) next.push_back(&child);
              }
            }
          },
          step.selector);
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace modelprobe::gateway
