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

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "modelprobe/common/json.hpp"
#include "modelprobe/testers/tester.hpp"

namespace modelprobe::testers {

// One logged edit. `position` is a byte offset into the text as it was
// when the edit was applied; edits are applied in log order.
struct EditOperation {
  enum class Kind { kSwap, kDelete, kInsert, kSubstitute };
  Kind kind = Kind::kDelete;
  std::size_t position = 0;
  std::string removed;   // bytes taken out (swap: the two bytes before)
  std::string inserted;  // bytes put in (swap: the two bytes after)

  friend bool operator==(const EditOperation&, const EditOperation&) = default;
};

std::string_view to_string(EditOperation::Kind kind);

struct TransformedText {
  std::string text;
  std::vector<EditOperation> operations;
  std::size_t requested = 0;
  std::size_t shortfall = 0;  // requested edits that found no eligible position
};

// `level` edits at distinct positions inside tokens of at least three
// characters, each one of: swap with the next character, deletion,
// insertion of a keyboard-adjacent character, substitution by a
// keyboard-adjacent character.
TransformedText apply_typo(std::string_view text, std::size_t level, std::uint64_t seed);

// `level` insertions of random alphanumeric characters at word boundaries
// (whitespace) or either end of the text.
TransformedText apply_noise(std::string_view text, std::size_t level, std::uint64_t seed);

std::string replay_operations(std::string_view original, const std::vector<EditOperation>& ops);
std::string undo_operations(std::string_view transformed, const std::vector<EditOperation>& ops);

// QWERTY row/column neighbors of a lower-case key; empty for keys off the
// letter and digit rows.
std::string_view keyboard_neighbors(char key);

void to_json(Json& j, const EditOperation& op);
void from_json(const Json& j, EditOperation& op);

// One sample per non-empty line; anything after a tab (a gold label) is
// dropped.
std::vector<std::string> read_corpus(std::string_view content);

// Contract for text transformations: text in, transformed text and the
// edit log out. Used by the built-in typo and noise properties and by
// plug-ins.
using TextTransform = std::function<TransformedText(std::string_view text, std::size_t level, std::uint64_t seed)>;

// Samples min(generation_limit, |corpus|) sentences without replacement;
// a case fails when the two labels differ.
std::shared_ptr<const Tester> make_text_sensitivity_tester(TextTransform transform);

// Makes `transform` available to any property whose tester is `name`.
void register_text_transform(const std::string& name, TextTransform transform);

}  // namespace modelprobe::testers
