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
#include <string>
#include <string_view>

namespace modelprobe {

// ULID-style identifiers: 26 Crockford base32 characters, 48-bit millisecond
// timestamp followed by 80 random bits. Identifiers minted by one process are
// strictly increasing, so lexicographic order equals creation order.
std::string new_id();

// Deterministic variant used by tests.
std::string make_id(std::uint64_t millis, std::uint64_t random_hi,
                    std::uint64_t random_lo);

bool is_valid_id(std::string_view id);

// Milliseconds since the Unix epoch.
std::int64_t now_millis();

// ISO-8601 UTC rendering with millisecond precision.
std::string format_timestamp(std::int64_t millis);

}  // namespace modelprobe
