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

#include "modelprobe/datamodel/catalog.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "modelprobe/common/error.hpp"

namespace modelprobe {
namespace {

MetricDef metric(std::string name, std::string description, std::string better = "",
                 VerdictRule rule = {}) {
  MetricDef m;
  m.name = std::move(name);
  m.description = std::move(description);
  m.better = std::move(better);
  m.rule = std::move(rule);
  return m;
}

ParameterDef param(std::string name, std::string type, Json default_value, std::string help) {
  ParameterDef p;
  p.name = std::move(name);
  p.type = std::move(type);
  p.default_value = std::move(default_value);
  p.help = std::move(help);
  return p;
}

ParameterDef bounded(ParameterDef p, std::optional<double> lo, std::optional<double> hi,
                     bool lo_exclusive = false) {
  p.min = lo;
  p.max = hi;
  p.min_exclusive = lo_exclusive;
  return p;
}

ParameterDef row_source() {
  auto p = param("row_source", "string", "synthetic",
                 "Where source rows come from: rows sampled from the fitted distribution "
                 "model, or the training rows themselves.");
  p.choices = {"synthetic", "training"};
  return p;
}

ParameterDef path_guided() {
  return param("path_guided", "boolean", true,
               "Spread synthetic rows over the surrogate decision tree's paths.");
}

MetricDef path_coverage() {
  return metric("path_coverage",
                "Fraction of satisfiable surrogate-tree paths hit by the source rows "
                "(nan when rows are not synthetic).",
                "higher");
}

MetricDef flip_rate(std::string what) {
  return metric("flip_rate", "Fraction of " + what + " pairs whose predicted labels differ.", "lower");
}

Json flip_recommendations(std::string what) {
  return Json{{"pass", "No label flips observed under " + what + "."},
              {"fail", "Retrain with the failing pairs appended to the training data."},
              {"error", "Check the model endpoint; some predictions could not be obtained."}};
}

std::vector<ParameterDef> window_params() {
  return {bounded(param("history_length", "integer", 48, "Records per window history."), 1, std::nullopt),
          bounded(param("horizon_length", "integer", 12, "Records per forecast horizon."), 1, std::nullopt),
          bounded(param("stride", "integer", 12, "Records between window starts."), 1, std::nullopt)};
}

std::vector<std::string> kPairSchema{"role", "sample", "predicted"};
std::vector<std::string> kWindowSchema{"role", "history", "forecast", "actuals", "rmse", "delta_r"};

PropertyDefinition correctness() {
  PropertyDefinition p;
  p.id = p.tester = "correctness";
  p.title = "Correctness";
  p.modality = Modality::kTabular;
  p.description = "Predicted label against the gold label of labeled evaluation rows.";
  p.metric_defs = {metric("accuracy", "Correct predictions over all rows.", "higher"),
                   metric("precision", "Precision macro-averaged over labels.", "higher"),
                   metric("recall", "Recall macro-averaged over labels.", "higher"),
                   metric("f_score", "F1 macro-averaged over labels.", "higher")};
  p.parameter_defs = {param("gold_column", "string", "label", "Column holding the gold label.")};
  p.result_schema = {"sample", "gold", "predicted"};
  p.recommendations = Json{{"pass", "All evaluated rows match their gold labels."},
                           {"fail", "Inspect mislabeled rows; consider retraining on them."},
                           {"error", "Check the model endpoint; some predictions could not be obtained."}};
  return p;
}

PropertyDefinition group_discrimination() {
  PropertyDefinition p;
  p.id = p.tester = "group-discrimination";
  p.title = "Group Discrimination";
  p.modality = Modality::kTabular;
  p.description = "Disparate impact and demographic parity of favorable predictions, minority versus majority.";
  p.metric_defs = {
      metric("disparate_impact", "Favorable rate of the minority over that of the majority.", "",
             VerdictRule{VerdictRule::Kind::kRange, "di_range"}),
      metric("demographic_parity", "Favorable rate of the minority minus that of the majority."),
      metric("minority_favorable_rate", "Favorable prediction rate in the minority group."),
      metric("majority_favorable_rate", "Favorable prediction rate in the majority group."),
      path_coverage()};
  p.parameter_defs = {param("di_range", "range", Json::array({0.8, 1.25}),
                            "Fair band for disparate impact; bounds inclusive."),
                      row_source(), path_guided()};
  p.required_inputs = {"protected_attributes", "favorable_label", "minority_group"};
  p.result_schema = {"group", "sample", "predicted"};
  p.recommendations = Json{{"pass", "Disparate impact lies inside the configured range."},
                           {"fail", "Rebalance or reweigh training data for the minority group and retrain."},
                           {"error", "Disparate impact is undefined for this data; check the group definition."}};
  return p;
}

PropertyDefinition individual_discrimination() {
  PropertyDefinition p;
  p.id = p.tester = "individual-discrimination";
  p.title = "Individual Discrimination";
  p.modality = Modality::kTabular;
  p.description = "Pairs of rows differing only in one protected attribute must get the same label.";
  p.metric_defs = {flip_rate("original/transformed"), path_coverage()};
  p.parameter_defs = {row_source(), path_guided()};
  p.required_inputs = {"protected_attributes"};
  p.result_schema = {"role", "sample", "predicted", "changed_attribute"};
  p.recommendations = flip_recommendations("protected-attribute changes");
  return p;
}

PropertyDefinition adversarial_robustness() {
  PropertyDefinition p;
  p.id = p.tester = "adversarial-robustness";
  p.title = "Adversarial Robustness";
  p.modality = Modality::kTabular;
  p.description = "Neighbors inside a small box around each row must get the same label.";
  p.metric_defs = {flip_rate("original/neighbor"), path_coverage()};
  p.parameter_defs = {
      bounded(param("epsilon", "number", 0.05, "Perturbation half-width as a fraction of each numeric column's range."),
              0.0, 0.5, true),
      bounded(param("neighbors_per_sample", "integer", 4, "Neighbors generated per source row."), 1, std::nullopt),
      row_source(), path_guided()};
  p.result_schema = kPairSchema;
  p.recommendations = flip_recommendations("small numeric perturbations");
  return p;
}

PropertyDefinition text_property(std::string id, std::string title, std::string what) {
  PropertyDefinition p;
  p.id = p.tester = std::move(id);
  p.title = std::move(title);
  p.modality = Modality::kText;
  p.description = "Sentences with " + what + " must keep their label.";
  p.metric_defs = {flip_rate("original/transformed")};
  p.parameter_defs = {bounded(param("level", "integer", 1,
                                    "Number of edit operations per sentence (absolute count)."),
                              1, 100)};
  p.result_schema = {"role", "text", "predicted", "operations"};
  p.recommendations = flip_recommendations(what);
  return p;
}

PropertyDefinition timeseries_property(std::string id, std::string title, std::string description,
                                       bool large) {
  PropertyDefinition p;
  p.id = p.tester = std::move(id);
  p.title = std::move(title);
  p.modality = Modality::kTimeseries;
  p.description = std::move(description);
  const std::string threshold = large ? "beta" : "alpha";
  p.metric_defs = {
      metric("mean_delta_r", "Mean relative RMSE change over windows.", large ? "higher" : "lower",
             VerdictRule{large ? VerdictRule::Kind::kMin : VerdictRule::Kind::kMax, threshold}),
      metric("failing_window_fraction", "Fraction of judged windows that failed.", "lower")};
  p.parameter_defs = {bounded(param(threshold, "number", 0.10,
                                    large ? "Minimum relative RMSE gain a large shift must cause."
                                          : "Maximum tolerated relative RMSE gain."),
                              0.0, std::nullopt, true)};
  if (large) {
    p.parameter_defs.push_back(param("training_min", "number", Json(),
                                     "Training minimum; computed from training data when unset."));
    p.parameter_defs.push_back(param("training_max", "number", Json(),
                                     "Training maximum; computed from training data when unset."));
  }
  for (auto& w : window_params()) p.parameter_defs.push_back(std::move(w));
  p.result_schema = kWindowSchema;
  p.recommendations =
      large ? Json{{"pass", "Forecast error grows as expected on out-of-range data."},
                   {"fail", "The model hides large level shifts; check window-level normalization."},
                   {"error", "Check the model endpoint; some forecasts could not be obtained."}}
            : Json{{"pass", "Forecast error is stable under this transformation."},
                   {"fail", "Retrain with transformed windows appended to the training data."},
                   {"error", "Check the model endpoint; some forecasts could not be obtained."}};
  return p;
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

double number_of(const Json& v) { return v.get<double>(); }

}  // namespace

std::vector<PropertyDefinition> builtin_properties() {
  return {correctness(),
          group_discrimination(),
          individual_discrimination(),
          adversarial_robustness(),
          text_property("typo-sensitivity", "Typo Sensitivity", "keyboard typos"),
          text_property("noise-sensitivity", "Noise Sensitivity", "random characters inserted at word boundaries"),
          timeseries_property("small-linear-change", "Small Linear Change",
                              "Adding a small constant to history and actuals must not raise forecast error.", false),
          timeseries_property("unordered-data", "Un-ordered Data",
                              "Permuting the history records must not raise forecast error.", false),
          timeseries_property("large-linear-change", "Large Linear Change",
                              "Shifting far outside the training range must raise forecast error.", true)};
}

void validate_parameter_value(const ParameterDef& def, const Json& value) {
  auto bad = [&](const std::string& why) {
    fail(ErrorCode::kInvalidArgument, "parameter '" + def.name + "': " + why);
  };
  auto check_bounds = [&](double x) {
    if (!std::isfinite(x)) bad("must be finite");
    if (def.min && (def.min_exclusive ? !(x > *def.min) : !(x >= *def.min))) bad("below legal range");
    if (def.max && !(x <= *def.max)) bad("above legal range");
  };
  if (def.type == "number") {
    if (!value.is_number()) bad("expected a number");
    check_bounds(number_of(value));
  } else if (def.type == "integer") {
    if (!value.is_number_integer()) bad("expected an integer");
    check_bounds(number_of(value));
  } else if (def.type == "string") {
    if (!value.is_string()) bad("expected a string");
    if (!def.choices.empty()) {
      const auto s = value.get<std::string>();
      if (std::find(def.choices.begin(), def.choices.end(), s) == def.choices.end()) bad("not one of the allowed values");
    }
  } else if (def.type == "boolean") {
    if (!value.is_boolean()) bad("expected true or false");
  } else if (def.type == "range") {
    if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
      bad("expected [lo, hi]");
    }
    if (!(number_of(value[0]) < number_of(value[1]))) bad("range needs lo < hi");
  } else if (def.type == "string_list") {
    if (!value.is_array()) bad("expected a list of strings");
    for (const auto& v : value) {
      if (!v.is_string()) bad("expected a list of strings");
    }
  } else if (def.type != "json") {
    bad("unknown type '" + def.type + "'");
  }
}

void validate_property_definition(const PropertyDefinition& def) {
  if (!is_identifier(def.id)) fail(ErrorCode::kInvalidArgument, "property id must be an identifier");
  if (def.metric_defs.empty()) {
    fail(ErrorCode::kInvalidArgument, "property " + def.id + " needs at least one metric");
  }
  std::set<std::string> names;
  for (const auto& m : def.metric_defs) {
    if (!is_identifier(m.name)) fail(ErrorCode::kInvalidArgument, "metric name must be an identifier");
    if (!names.insert(m.name).second) {
      fail(ErrorCode::kInvalidArgument, "duplicate metric '" + m.name + "' in property " + def.id);
    }
    if (m.rule.kind != VerdictRule::Kind::kInformational && !def.find_parameter(m.rule.parameter)) {
      fail(ErrorCode::kInvalidArgument, "metric '" + m.name + "' refers to unknown parameter '" + m.rule.parameter + "'");
    }
    if (m.source != "tester" && m.source.rfind("status:", 0) != 0) {
      fail(ErrorCode::kInvalidArgument, "metric '" + m.name + "' has unknown source '" + m.source + "'");
    }
  }
  std::set<std::string> params;
  for (const auto& p : def.parameter_defs) {
    if (!is_identifier(p.name)) fail(ErrorCode::kInvalidArgument, "parameter name must be an identifier");
    if (!params.insert(p.name).second) {
      fail(ErrorCode::kInvalidArgument, "duplicate parameter '" + p.name + "' in property " + def.id);
    }
    if (p.default_value.is_null()) continue;
    try {
      validate_parameter_value(p, p.default_value);
    } catch (const Error& e) {
      fail(ErrorCode::kInvalidArgument, "default outside legal range: " + std::string(e.what()));
    }
  }
}

Json bind_parameters(const PropertyDefinition& def, const Json& values) {
  if (!values.is_null() && !values.is_object()) {
    fail(ErrorCode::kInvalidArgument, "parameters for " + def.id + " must be an object");
  }
  Json bound = Json::object();
  if (values.is_object()) {
    for (const auto& [name, v] : values.items()) {
      if (!def.find_parameter(name)) {
        fail(ErrorCode::kInvalidArgument, "unknown parameter '" + name + "' for property " + def.id);
      }
    }
  }
  for (const auto& p : def.parameter_defs) {
    const bool given = values.is_object() && values.contains(p.name) && !values.at(p.name).is_null();
    if (given) {
      validate_parameter_value(p, values.at(p.name));
      bound[p.name] = values.at(p.name);
    } else if (p.mandatory && p.default_value.is_null()) {
      fail(ErrorCode::kInvalidArgument, "unbound parameter '" + p.name + "' for property " + def.id);
    } else {
      bound[p.name] = p.default_value;
    }
  }
  return bound;
}

MetricVerdict evaluate_metric(const MetricDef& metric, double value, const Json& bound) {
  const VerdictRule& rule = metric.rule;
  if (rule.kind == VerdictRule::Kind::kInformational) return MetricVerdict::kInformational;
  const Json& threshold = bound.at(rule.parameter);
  if (std::isnan(value)) return MetricVerdict::kFail;
  switch (rule.kind) {
    case VerdictRule::Kind::kRange:
      return value >= number_of(threshold[0]) && value <= number_of(threshold[1]) ? MetricVerdict::kPass
                                                                                  : MetricVerdict::kFail;
    case VerdictRule::Kind::kMax:
      return value <= number_of(threshold) ? MetricVerdict::kPass : MetricVerdict::kFail;
    case VerdictRule::Kind::kMin:
      return value >= number_of(threshold) ? MetricVerdict::kPass : MetricVerdict::kFail;
    case VerdictRule::Kind::kInformational: break;
  }
  return MetricVerdict::kInformational;
}

}  // namespace modelprobe
