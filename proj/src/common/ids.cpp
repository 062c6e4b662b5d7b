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

#include "modelprobe/common/ids.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <mutex>
#include <random>

#include "modelprobe/common/error.hpp"

namespace modelprobe {
namespace {

constexpr std::string_view kAlphabet = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";

struct IdState {
  std::mutex mu;
  std::uint64_t last_millis = 0;
  std::uint64_t hi = 0;  // top 16 of the 80 random bits
  std::uint64_t lo = 0;  // low 64 random bits
  std::mt19937_64 rng{std::random_device{}()};
};

IdState& id_state() {
  static IdState state;
  return state;
}

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kFailedPrecondition: return "failed_precondition";
    case ErrorCode::kUnavailable: return "unavailable";
    case ErrorCode::kInternal: return "internal";
  }
  return "internal";
}

std::int64_t now_millis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string make_id(std::uint64_t millis, std::uint64_t random_hi,
                    std::uint64_t random_lo) {
  // 128-bit value: [48 bits time][16 bits hi][64 bits lo], rendered as 26
  // base32 digits (130 bits, top two always zero).
  std::array<char, 26> out{};
  std::uint64_t upper = ((millis & 0xFFFFFFFFFFFFULL) << 16) | (random_hi & 0xFFFF);
  std::uint64_t lower = random_lo;
  for (int i = 25; i >= 0; --i) {
    const unsigned digit = static_cast<unsigned>(lower & 0x1F);
    out[static_cast<std::size_t>(i)] = kAlphabet[digit];
    lower = (lower >> 5) | ((upper & 0x1F) << 59);
    upper >>= 5;
  }
  return std::string(out.begin(), out.end());
}

std::string new_id() {
  IdState& st = id_state();
  std::lock_guard lock(st.mu);
  auto millis = static_cast<std::uint64_t>(now_millis());
  if (millis <= st.last_millis) {
    // Same (or regressed) millisecond: bump the random part to stay monotone.
    millis = st.last_millis;
    if (++st.lo == 0) st.hi = (st.hi + 1) & 0xFFFF;
  } else {
    st.last_millis = millis;
    st.hi = st.rng() & 0xFFFF;
    st.lo = st.rng() >> 1;  // leave headroom for increments
  }
  return make_id(millis, st.hi, st.lo);
}

bool is_valid_id(std::string_view id) {
  if (id.size() != 26) return false;
  for (char c : id) {
    if (kAlphabet.find(c) == std::string_view::npos) return false;
  }
  return id[0] <= '7';
}

std::string format_timestamp(std::int64_t millis) {
  const std::time_t secs = static_cast<std::time_t>(millis / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, static_cast<int>(millis % 1000));
  return buf;
}

}  // namespace modelprobe
