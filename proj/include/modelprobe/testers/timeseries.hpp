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
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "modelprobe/common/json.hpp"
#include "modelprobe/testers/tester.hpp"

namespace modelprobe::testers {

struct SeriesPoint {
  double timestamp = 0.0;  // epoch seconds
  double value = 0.0;

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct SeriesWindow {
  std::vector<SeriesPoint> history;
  std::vector<SeriesPoint> horizon;  // actuals

  friend bool operator==(const SeriesWindow&, const SeriesWindow&) = default;
};

enum class MetamorphicKind { kSmallLinear, kUnordered, kLargeLinear };

struct MetamorphicSpec {
  MetamorphicKind kind = MetamorphicKind::kSmallLinear;
  double alpha = 0.10;
  double beta = 0.10;
  std::optional<double> training_min;
  std::optional<double> training_max;
  std::uint64_t seed = 0;  // permutation seed for kUnordered
};

inline constexpr double kRmseFloor = 1e-12;

struct RmseGain {
  double rmse_original = 0.0;
  double rmse_transformed = 0.0;
  double delta_r = 0.0;  // (transformed - original) / max(original, kRmseFloor)
};

// Epoch seconds, or ISO-8601 date / date-time with optional fraction and
// "Z" or +hh:mm offset.
double parse_timestamp(std::string_view text);

// CSV with `timestamp` and `value` columns, returned in timestamp order.
// Duplicate timestamps are rejected.
std::vector<SeriesPoint> parse_series(std::string_view csv);

// Sliding windows of history_length + horizon_length points, starting
// every `stride` points.
std::vector<SeriesWindow> make_windows(std::span<const SeriesPoint> series, std::size_t history_length,
                                       std::size_t horizon_length, std::size_t stride);

// small_linear adds mean(first-order differences of history) / 100 to history
// and actuals; unordered permutes the history records; large_linear adds
// 10 * (training_max - training_min) to history and actuals.
SeriesWindow transform_series(const SeriesWindow& window, const MetamorphicSpec& spec);

double rmse(std::span<const double> forecast, std::span<const SeriesPoint> actuals);

RmseGain rmse_gain(std::span<const double> forecast_original, std::span<const double> forecast_transformed,
                   const SeriesWindow& window_original, const SeriesWindow& window_transformed);

// Fails when delta_r > alpha (small_linear, unordered) or delta_r < beta
// (large_linear). NaN fails.
bool metamorphic_passes(MetamorphicKind kind, double delta_r, double alpha, double beta);

// {"history": [[t, v], ...], "forecast_timestamps": [t, ...]}
Json window_request(const SeriesWindow& window);

std::shared_ptr<const Tester> make_metamorphic_tester(MetamorphicKind kind);

}  // namespace modelprobe::testers
