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

#include "modelprobe/testers/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "modelprobe/common/csv.hpp"
#include "modelprobe/common/error.hpp"
#include "modelprobe/common/random.hpp"

namespace modelprobe::testers {
namespace {

// Lower rows sit half a key to the right of the row above, so (r, c) touches
// (r-1, c), (r-1, c+1), (r+1, c-1) and (r+1, c).
constexpr std::array<std::string_view, 4> kKeyboardRows{"1234567890", "qwertyuiop", "asdfghjkl", "zxcvbnm"};

constexpr std::string_view kAlphanumeric = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

const std::array<std::string, 128>& neighbor_table() {
  static const std::array<std::string, 128> table = [] {
    std::array<std::string, 128> t;
    auto at = [](int r, int c) -> char {
      if (r < 0 || r >= static_cast<int>(kKeyboardRows.size())) return 0;
      const auto row = kKeyboardRows[static_cast<std::size_t>(r)];
      if (c < 0 || c >= static_cast<int>(row.size())) return 0;
      return row[static_cast<std::size_t>(c)];
    };
    for (int r = 0; r < static_cast<int>(kKeyboardRows.size()); ++r) {
      for (int c = 0; c < static_cast<int>(kKeyboardRows[static_cast<std::size_t>(r)].size()); ++c) {
        std::string n;
        for (auto [dr, dc] : {std::pair{0, -1}, {0, 1}, {-1, 0}, {-1, 1}, {1, -1}, {1, 0}}) {
          if (char k = at(r + dr, c + dc)) n += k;
        }
        t[static_cast<unsigned char>(at(r, c))] = n;
      }
    }
    return t;
  }();
  return table;
}

bool is_ascii(char c) { return static_cast<unsigned char>(c) < 128; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

char neighbor_of(char c, Rng& rng) {
  const bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
  const auto n = keyboard_neighbors(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  const char k = n[uniform_index(rng, n.size())];
  return upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(k))) : k;
}

void apply_edit(std::string& s, const EditOperation& op) {
  switch (op.kind) {
    case EditOperation::Kind::kSwap:
    case EditOperation::Kind::kSubstitute:
    case EditOperation::Kind::kDelete:
      s.replace(op.position, op.removed.size(), op.inserted);
      break;
    case EditOperation::Kind::kInsert:
      s.insert(op.position, op.inserted);
      break;
  }
}

void unapply(std::string& s, const EditOperation& op) { s.replace(op.position, op.inserted.size(), op.removed); }

constexpr std::array<std::pair<EditOperation::Kind, std::string_view>, 4> kKinds{{
    {EditOperation::Kind::kSwap, "swap"},
    {EditOperation::Kind::kDelete, "delete"},
    {EditOperation::Kind::kInsert, "insert"},
    {EditOperation::Kind::kSubstitute, "substitute"},
}};

class TextSensitivityTester final : public Tester {
 public:
  explicit TextSensitivityTester(TextTransform transform) : transform_(std::move(transform)) {}

  Generation generate(const TesterInput& input, const gateway::PredictorHandle&) const override {
    const std::vector<std::string> corpus = read_corpus(input.labeled ? *input.labeled : input.training);
    if (corpus.empty()) fail(ErrorCode::kFailedPrecondition, "empty corpus");
    const std::size_t level = input.parameters.value("level", std::size_t{1});
    require(level >= 1, "level must be >= 1");
    Rng rng(input.seed);
    const auto picked = sample_without_replacement(rng, corpus.size(), input.generation_limit);
    Generation g;
    std::size_t short_cases = 0;
    for (std::size_t index : picked) {
      const auto& text = corpus[index];
      TransformedText t = transform_(text, level, derive_seed(input.seed, index));
      TestCase c;
      c.samples = {wrap(input, text), wrap(input, t.text)};
      c.role_tags = {"original", "transformed"};
      c.reference = Json{{"corpus_index", index},
                         {"operations", t.operations},
                         {"requested", t.requested},
                         {"shortfall", t.shortfall}};
      short_cases += t.shortfall > 0;
      g.cases.push_back(std::move(c));
    }
    if (short_cases > 0) {
      g.warnings.push_back(std::to_string(short_cases) + " sentences had fewer eligible positions than level " +
                           std::to_string(level) + "; the shortfall is logged per case");
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
    if (outcomes.size() != 2 || !outcomes[0].ok() || !outcomes[1].ok()) {
      r.verdict = Verdict::kError;
      r.detail = outcomes.size() == 2 && !outcomes[0].ok() ? outcomes[0].error
                 : outcomes.size() == 2                     ? outcomes[1].error
                                                            : "expected two predictions";
      return r;
    }
    const auto& a = outcomes[0].prediction->label;
    const auto& b = outcomes[1].prediction->label;
    r.verdict = a == b ? Verdict::kPass : Verdict::kFail;
    r.detail = a == b ? "labels agree (" + a + ")" : "label changed from " + a + " to " + b;
    r.evaluation = Json{{"original_label", a}, {"transformed_label", b}};
    return r;
  }

  Summary summarize(std::span<const TestCase>, std::span<const TestResult> results, const TesterInput& input,
                    const Json&) const override {
    std::size_t judged = 0, failed = 0;
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& r : results) {
      if (r.verdict == Verdict::kError) continue;
      ++judged;
      failed += r.verdict == Verdict::kFail;
      pairs.emplace_back(r.evaluation.value("original_label", std::string()),
                         r.evaluation.value("transformed_label", std::string()));
    }
    Summary s;
    const double rate = judged ? static_cast<double>(failed) / static_cast<double>(judged) : std::nan("");
    s.metrics["flip_rate"] = rate;
    s.explanation = std::to_string(failed) + " of " + std::to_string(judged) + " sentences changed label after " +
                    std::to_string(input.parameters.value("level", std::size_t{1})) + " edit(s) each.";
    s.grid = count_grid(pairs, "original label", "transformed label");
    return s;
  }

 private:
  static Json wrap(const TesterInput& input, const std::string& text) {
    if (input.data_specific.contains("text_field") && input.data_specific.at("text_field").is_string()) {
      return Json{{input.data_specific.at("text_field").get<std::string>(), text}};
    }
    return Json(text);
  }

  TextTransform transform_;
};

}  // namespace

std::string_view to_string(EditOperation::Kind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "?";
}

std::string_view keyboard_neighbors(char key) {
  if (!is_ascii(key)) return {};
  return neighbor_table()[static_cast<unsigned char>(key)];
}

TransformedText apply_typo(std::string_view text, std::size_t level, std::uint64_t seed) {
  TransformedText out;
  out.requested = level;
  out.text = std::string(text);
  // Eligible bytes: ASCII, inside a whitespace-delimited token of >= 3 bytes.
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < text.size();) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j - i >= 3) {
      for (std::size_t k = i; k < j; ++k) {
        if (is_ascii(text[k])) eligible.push_back(k);
      }
    }
    i = j;
  }
  Rng rng(seed);
  auto positions = sample_without_replacement(rng, eligible.size(), level);
  for (auto& p : positions) p = eligible[p];
  // Descending order keeps every lower position valid in original coordinates.
  std::sort(positions.rbegin(), positions.rend());
  std::string& s = out.text;
  for (std::size_t p : positions) {
    const char c = s[p];
    const bool has_neighbors = !keyboard_neighbors(static_cast<char>(std::tolower(static_cast<unsigned char>(c)))).empty();
    const bool can_swap = p + 1 < s.size() && !is_space(s[p + 1]) && is_ascii(s[p + 1]) && s[p + 1] != c;
    std::vector<EditOperation::Kind> kinds{EditOperation::Kind::kDelete};
    if (can_swap) kinds.push_back(EditOperation::Kind::kSwap);
    if (has_neighbors) {
      kinds.push_back(EditOperation::Kind::kInsert);
      kinds.push_back(EditOperation::Kind::kSubstitute);
    }
    std::sort(kinds.begin(), kinds.end());
    EditOperation op;
    op.kind = kinds[uniform_index(rng, kinds.size())];
    op.position = p;
    switch (op.kind) {
      case EditOperation::Kind::kSwap:
        op.removed = s.substr(p, 2);
        op.inserted = {s[p + 1], s[p]};
        break;
      case EditOperation::Kind::kDelete:
        op.removed = s.substr(p, 1);
        break;
      case EditOperation::Kind::kInsert:
        op.inserted = std::string(1, neighbor_of(c, rng));
        break;
      case EditOperation::Kind::kSubstitute:
        op.removed = s.substr(p, 1);
        op.inserted = std::string(1, neighbor_of(c, rng));
        break;
    }
    apply_edit(s, op);
    out.operations.push_back(std::move(op));
  }
  out.shortfall = level - out.operations.size();
  return out;
}

TransformedText apply_noise(std::string_view text, std::size_t level, std::uint64_t seed) {
  TransformedText out;
  out.requested = level;
  out.text = std::string(text);
  std::vector<std::size_t> boundaries{0};
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (is_space(text[i]) && (i == 0 || !is_space(text[i - 1]))) boundaries.push_back(i);
  }
  if (text.size() > 0) boundaries.push_back(text.size());
  boundaries.erase(std::unique(boundaries.begin(), boundaries.end()), boundaries.end());
  Rng rng(seed);
  std::vector<std::pair<std::size_t, char>> inserts;
  for (std::size_t k = 0; k < level; ++k) {
    const std::size_t at = boundaries[uniform_index(rng, boundaries.size())];
    inserts.emplace_back(at, kAlphanumeric[uniform_index(rng, kAlphanumeric.size())]);
  }
  std::stable_sort(inserts.begin(), inserts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [at, ch] : inserts) {
    EditOperation op;
    op.kind = EditOperation::Kind::kInsert;
    op.position = at;
    op.inserted = std::string(1, ch);
    apply_edit(out.text, op);
    out.operations.push_back(std::move(op));
  }
  return out;
}

std::string replay_operations(std::string_view original, const std::vector<EditOperation>& ops) {
  std::string s(original);
  for (const auto& op : ops) {
    require(op.position <= s.size(), "edit position out of range");
    apply_edit(s, op);
  }
  return s;
}

std::string undo_operations(std::string_view transformed, const std::vector<EditOperation>& ops) {
  std::string s(transformed);
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    require(it->position <= s.size(), "edit position out of range");
    unapply(s, *it);
  }
  return s;
}

void to_json(Json& j, const EditOperation& op) {
  j = Json{{"op", std::string(to_string(op.kind))},
           {"position", op.position},
           {"removed", op.removed},
           {"inserted", op.inserted}};
}

void from_json(const Json& j, EditOperation& op) {
  const auto name = j.at("op").get<std::string>();
  bool found = false;
  for (const auto& [k, n] : kKinds) {
    if (n == name) {
      op.kind = k;
      found = true;
    }
  }
  require(found, "unknown edit operation '" + name + "'");
  op.position = j.at("position").get<std::size_t>();
  op.removed = j.value("removed", std::string());
  op.inserted = j.value("inserted", std::string());
}

std::vector<std::string> read_corpus(std::string_view content) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto tab = line.find('\t'); tab != std::string_view::npos) line = line.substr(0, tab);
    if (!line.empty()) out.emplace_back(line);
    start = end + 1;
  }
  return out;
}

std::shared_ptr<const Tester> make_text_sensitivity_tester(TextTransform transform) {
  require(static_cast<bool>(transform), "text transform must be callable");
  return std::make_shared<TextSensitivityTester>(std::move(transform));
}

void register_text_transform(const std::string& name, TextTransform transform) {
  register_tester(name, make_text_sensitivity_tester(std::move(transform)));
}

}  // namespace modelprobe::testers
