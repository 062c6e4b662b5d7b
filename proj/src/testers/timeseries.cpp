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

#include "modelprobe/testers/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "modelprobe/common/csv.hpp"
#include "modelprobe/common/error.hpp"
#include "modelprobe/common/random.hpp"

namespace modelprobe::testers {
namespace {

// Days since 1970-01-01 of a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

[[noreturn]] void bad_timestamp(std::string_view text) {
  fail(ErrorCode::kInvalidArgument, "unparseable timestamp '" + std::string(text) + "'");
}

unsigned digits(std::string_view s, std::size_t& i, std::size_t n, std::string_view text) {
  if (i + n > s.size()) bad_timestamp(text);
  unsigned v = 0;
  for (std::size_t k = 0; k < n; ++k, ++i) {
    if (s[i] < '0' || s[i] > '9') bad_timestamp(text);
    v = v * 10 + static_cast<unsigned>(s[i] - '0');
  }
  return v;
}

void expect(std::string_view s, std::size_t& i, char c, std::string_view text) {
  if (i >= s.size() || s[i] != c) bad_timestamp(text);
  ++i;
}

MetamorphicKind kind_of(const PropertyDefinition& def) {
  const std::string& t = def.tester;
  if (t == "small-linear-change") return MetamorphicKind::kSmallLinear;
  if (t == "unordered-data") return MetamorphicKind::kUnordered;
  if (t == "large-linear-change") return MetamorphicKind::kLargeLinear;
  fail(ErrorCode::kInvalidArgument, "no metamorphic relation for tester '" + t + "'");
}

Json actuals_json(const SeriesWindow& w) {
  Json a = Json::array();
  for (const auto& p : w.horizon) a.push_back(p.value);
  return a;
}

std::vector<SeriesPoint> points_from(const Json& request, const Json& actuals) {
  std::vector<SeriesPoint> out;
  const Json& ts = request.at("forecast_timestamps");
  for (std::size_t i = 0; i < actuals.size(); ++i) out.push_back({ts.at(i).get<double>(), actuals.at(i).get<double>()});
  return out;
}

class MetamorphicTester final : public Tester {
 public:
  explicit MetamorphicTester(MetamorphicKind kind) : kind_(kind) {}

  Generation generate(const TesterInput& input, const gateway::PredictorHandle&) const override {
    const auto training = parse_series(input.training);
    const auto series = input.labeled ? parse_series(*input.labeled) : training;
    const std::size_t history = input.parameters.value("history_length", std::size_t{48});
    const std::size_t horizon = input.parameters.value("horizon_length", std::size_t{12});
    const std::size_t stride = input.parameters.value("stride", std::size_t{12});
    const auto windows = make_windows(series, history, horizon, stride);
    if (windows.empty()) {
      fail(ErrorCode::kFailedPrecondition, "series of " + std::to_string(series.size()) +
                                               " points is shorter than one window of " +
                                               std::to_string(history + horizon));
    }
    MetamorphicSpec spec = spec_for(input);
    if (kind_ == MetamorphicKind::kLargeLinear) {
      auto [lo, hi] = std::minmax_element(training.begin(), training.end(),
                                          [](const auto& a, const auto& b) { return a.value < b.value; });
      if (!spec.training_min) spec.training_min = lo->value;
      if (!spec.training_max) spec.training_max = hi->value;
    }

    Generation g;
    std::vector<std::size_t> chosen(windows.size());
    std::iota(chosen.begin(), chosen.end(), 0);
    if (chosen.size() > input.generation_limit) {
      Rng rng(input.seed);
      chosen = sample_without_replacement(rng, windows.size(), input.generation_limit);
      std::sort(chosen.begin(), chosen.end());
      g.warnings.push_back("judging " + std::to_string(chosen.size()) + " of " + std::to_string(windows.size()) +
                           " windows (generation limit)");
    }
    for (std::size_t i : chosen) {
      spec.seed = derive_seed(input.seed, i);
      const SeriesWindow transformed = transform_series(windows[i], spec);
      TestCase c;
      c.samples = {window_request(windows[i]), window_request(transformed)};
      c.role_tags = {"original", "transformed"};
      c.reference = Json{{"window", i},
                         {"start", windows[i].history.front().timestamp},
                         {"actuals_original", actuals_json(windows[i])},
                         {"actuals_transformed", actuals_json(transformed)}};
      g.cases.push_back(std::move(c));
    }
    g.source_samples = g.cases.size();
    if (spec.training_min) {
      g.artifacts["training_min"] = *spec.training_min;
      g.artifacts["training_max"] = *spec.training_max;
    }
    return g;
  }

  TestResult judge(const TestCase& c, std::span<const gateway::PredictionOutcome> outcomes,
                   const TesterInput& input) const override {
    TestResult r;
    r.test_case_id = c.id;
    r.run_id = c.run_id;
    for (const auto& o : outcomes) r.predictions.push_back(o.prediction);
    if (outcomes.size() != 2 || !outcomes[0].ok() || !outcomes[1].ok()) {
      r.verdict = Verdict::kError;
      r.detail = outcomes.size() == 2 ? (outcomes[0].ok() ? outcomes[1].error : outcomes[0].error)
                                      : "expected two forecasts";
      return r;
    }
    const auto original = points_from(c.samples[0], c.reference.at("actuals_original"));
    const auto transformed = points_from(c.samples[1], c.reference.at("actuals_transformed"));
    const auto& fo = outcomes[0].prediction->values;
    const auto& ft = outcomes[1].prediction->values;
    if (fo.size() != original.size() || ft.size() != transformed.size()) {
      r.verdict = Verdict::kError;
      r.detail = "forecast length mismatch: got " + std::to_string(fo.size()) + " and " + std::to_string(ft.size()) +
                 " values for a horizon of " + std::to_string(original.size());
      return r;
    }
    const RmseGain gain = rmse_gain(fo, ft, SeriesWindow{{}, original}, SeriesWindow{{}, transformed});
    const MetamorphicSpec spec = spec_for(input);
    const bool ok = metamorphic_passes(kind_, gain.delta_r, spec.alpha, spec.beta);
    r.verdict = ok ? Verdict::kPass : Verdict::kFail;
    r.evaluation = Json{{"rmse_original", gain.rmse_original},
                        {"rmse_transformed", gain.rmse_transformed},
                        {"delta_r", metric_value_to_json(gain.delta_r)}};
    const bool large = kind_ == MetamorphicKind::kLargeLinear;
    r.detail = "delta_r " + format_number(gain.delta_r) + (large ? (ok ? " >= beta " : " < beta ") : (ok ? " <= alpha " : " > alpha ")) +
               format_number(large ? spec.beta : spec.alpha);
    return r;
  }

  Summary summarize(std::span<const TestCase> cases, std::span<const TestResult> results, const TesterInput& input,
                    const Json&) const override {
    std::map<std::string, const TestCase*> index;
    for (const auto& c : cases) index[c.id] = &c;
    double sum = 0.0, peak = 0.0;
    std::size_t judged = 0, failed = 0;
    std::vector<std::pair<std::string, double>> per_window;
    for (const auto& r : results) {
      if (r.verdict == Verdict::kError || !r.evaluation.contains("delta_r")) continue;
      const double d = metric_value_from_json(r.evaluation.at("delta_r"));
      sum += d;
      ++judged;
      failed += r.verdict == Verdict::kFail;
      peak = std::max(peak, std::abs(d));
      auto it = index.find(r.test_case_id);
      const std::string label =
          it == index.end() ? r.test_case_id : "window " + it->second->reference.value("window", Json(0)).dump();
      per_window.emplace_back(label, d);
    }
    Summary s;
    s.metrics["mean_delta_r"] = judged ? sum / static_cast<double>(judged) : std::nan("");
    s.metrics["failing_window_fraction"] =
        judged ? static_cast<double>(failed) / static_cast<double>(judged) : std::nan("");
    const MetamorphicSpec spec = spec_for(input);
    const bool large = kind_ == MetamorphicKind::kLargeLinear;
    s.explanation = "Mean relative RMSE change " + format_number(s.metrics["mean_delta_r"]) + " over " +
                    std::to_string(judged) + " windows; " + std::to_string(failed) + " window(s) " +
                    (large ? "stayed below beta = " + format_number(spec.beta)
                           : "exceeded alpha = " + format_number(spec.alpha)) +
                    ".";
    Json rows = Json::array(), values = Json::array();
    for (const auto& [label, d] : per_window) {
      rows.push_back(label);
      const double v = peak > 0.0 && std::isfinite(d) ? std::abs(d) / peak : (std::isfinite(d) ? 0.0 : 1.0);
      values.push_back(Json::array({std::clamp(v, 0.0, 1.0)}));
    }
    s.grid = Json{{"row_title", "window"},
                  {"column_title", "property"},
                  {"rows", rows},
                  {"columns", Json::array({input.property.id})},
                  {"values", values}};
    return s;
  }

 private:
  MetamorphicSpec spec_for(const TesterInput& input) const {
    MetamorphicSpec spec;
    spec.kind = kind_;
    spec.alpha = input.parameters.value("alpha", 0.10);
    spec.beta = input.parameters.value("beta", 0.10);
    if (input.parameters.contains("training_min") && input.parameters.at("training_min").is_number()) {
      spec.training_min = input.parameters.at("training_min").get<double>();
    }
    if (input.parameters.contains("training_max") && input.parameters.at("training_max").is_number()) {
      spec.training_max = input.parameters.at("training_max").get<double>();
    }
    return spec;
  }

  MetamorphicKind kind_;
};

}  // namespace

double parse_timestamp(std::string_view text) {
  if (auto n = parse_number(text)) return *n;
  std::size_t i = 0;
  const std::string_view s = text;
  const auto year = digits(s, i, 4, text);
  expect(s, i, '-', text);
  const auto month = digits(s, i, 2, text);
  expect(s, i, '-', text);
  const auto day = digits(s, i, 2, text);
  if (month < 1 || month > 12 || day < 1 || day > 31) bad_timestamp(text);
  double seconds = static_cast<double>(days_from_civil(year, month, day)) * 86400.0;
  if (i == s.size()) return seconds;
  if (s[i] != 'T' && s[i] != ' ') bad_timestamp(text);
  ++i;
  const auto hh = digits(s, i, 2, text);
  expect(s, i, ':', text);
  const auto mm = digits(s, i, 2, text);
  unsigned ss = 0;
  double fraction = 0.0;
  if (i < s.size() && s[i] == ':') {
    ++i;
    ss = digits(s, i, 2, text);
    if (i < s.size() && s[i] == '.') {
      ++i;
      double scale = 0.1;
      if (i >= s.size() || s[i] < '0' || s[i] > '9') bad_timestamp(text);
      while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
        fraction += (s[i++] - '0') * scale;
        scale /= 10.0;
      }
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) bad_timestamp(text);
  seconds += hh * 3600.0 + mm * 60.0 + ss + fraction;
  if (i == s.size()) return seconds;
  if (s[i] == 'Z' && i + 1 == s.size()) return seconds;
  if (s[i] != '+' && s[i] != '-') bad_timestamp(text);
  const double sign = s[i] == '+' ? 1.0 : -1.0;
  ++i;
  const auto oh = digits(s, i, 2, text);
  if (i < s.size() && s[i] == ':') ++i;
  const auto om = digits(s, i, 2, text);
  if (i != s.size()) bad_timestamp(text);
  return seconds - sign * (oh * 3600.0 + om * 60.0);
}

std::vector<SeriesPoint> parse_series(std::string_view text) {
  const CsvTable csv = parse_csv(text);
  const auto ti = csv.column_index("timestamp");
  const auto vi = csv.column_index("value");
  if (!ti || !vi) fail(ErrorCode::kInvalidArgument, "time-series data needs 'timestamp' and 'value' columns");
  std::vector<SeriesPoint> out;
  for (const auto& row : csv.rows) {
    const auto v = parse_number(row[*vi]);
    if (!v) fail(ErrorCode::kInvalidArgument, "non-numeric series value '" + row[*vi] + "'");
    out.push_back({parse_timestamp(row[*ti]), *v});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].timestamp == out[i - 1].timestamp) {
      fail(ErrorCode::kInvalidArgument, "duplicate timestamp " + format_number(out[i].timestamp));
    }
  }
  return out;
}

std::vector<SeriesWindow> make_windows(std::span<const SeriesPoint> series, std::size_t history_length,
                                       std::size_t horizon_length, std::size_t stride) {
  require(history_length >= 1 && horizon_length >= 1 && stride >= 1, "window lengths and stride must be >= 1");
  std::vector<SeriesWindow> out;
  const std::size_t span = history_length + horizon_length;
  for (std::size_t start = 0; start + span <= series.size(); start += stride) {
    SeriesWindow w;
    w.history.assign(series.begin() + static_cast<std::ptrdiff_t>(start),
                     series.begin() + static_cast<std::ptrdiff_t>(start + history_length));
    w.horizon.assign(series.begin() + static_cast<std::ptrdiff_t>(start + history_length),
                     series.begin() + static_cast<std::ptrdiff_t>(start + span));
    out.push_back(std::move(w));
  }
  return out;
}

SeriesWindow transform_series(const SeriesWindow& window, const MetamorphicSpec& spec) {
  require(!window.history.empty() && !window.horizon.empty(), "window needs history and horizon");
  SeriesWindow out = window;
  auto shift = [&](double c) {
    for (auto& p : out.history) p.value += c;
    for (auto& p : out.horizon) p.value += c;
  };
  switch (spec.kind) {
    case MetamorphicKind::kSmallLinear: {
      if (window.history.size() < 2) {
        fail(ErrorCode::kInvalidArgument, "small linear change needs at least two history points");
      }
      double diffs = 0.0;
      for (std::size_t i = 1; i < window.history.size(); ++i) {
        diffs += window.history[i].value - window.history[i - 1].value;
      }
      shift(diffs / static_cast<double>(window.history.size() - 1) / 100.0);
      break;
    }
    case MetamorphicKind::kUnordered: {
      Rng rng(spec.seed);
      seeded_shuffle(out.history, rng);
      break;
    }
    case MetamorphicKind::kLargeLinear: {
      if (!spec.training_min || !spec.training_max) {
        fail(ErrorCode::kInvalidArgument, "large linear change needs the training range");
      }
      require(*spec.training_min <= *spec.training_max, "training_min must not exceed training_max");
      shift(10.0 * (*spec.training_max - *spec.training_min));
      break;
    }
  }
  return out;
}

double rmse(std::span<const double> forecast, std::span<const SeriesPoint> actuals) {
  require(forecast.size() == actuals.size(), "forecast length differs from the horizon");
  require(!actuals.empty(), "empty horizon");
  double sum = 0.0;
  for (std::size_t i = 0; i < actuals.size(); ++i) {
    const double e = forecast[i] - actuals[i].value;
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(actuals.size()));
}

RmseGain rmse_gain(std::span<const double> forecast_original, std::span<const double> forecast_transformed,
                   const SeriesWindow& window_original, const SeriesWindow& window_transformed) {
  RmseGain g;
  g.rmse_original = rmse(forecast_original, window_original.horizon);
  g.rmse_transformed = rmse(forecast_transformed, window_transformed.horizon);
  g.delta_r = (g.rmse_transformed - g.rmse_original) / std::max(g.rmse_original, kRmseFloor);
  return g;
}

bool metamorphic_passes(MetamorphicKind kind, double delta_r, double alpha, double beta) {
  if (std::isnan(delta_r)) return false;
  return kind == MetamorphicKind::kLargeLinear ? !(delta_r < beta) : !(delta_r > alpha);
}

Json window_request(const SeriesWindow& window) {
  Json history = Json::array(), stamps = Json::array();
  for (const auto& p : window.history) history.push_back(Json::array({p.timestamp, p.value}));
  for (const auto& p : window.horizon) stamps.push_back(p.timestamp);
  return Json{{"history", history}, {"forecast_timestamps", stamps}};
}

std::shared_ptr<const Tester> make_metamorphic_tester(MetamorphicKind kind) {
  return std::make_shared<MetamorphicTester>(kind);
}

}  // namespace modelprobe::testers
