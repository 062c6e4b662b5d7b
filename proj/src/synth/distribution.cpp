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

#include "modelprobe/synth/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>

#include "modelprobe/common/error.hpp"

namespace modelprobe::synth {
namespace {

constexpr double kSumTolerance = 1e-9;

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

double bin_overlap_fraction(const NumericBin& bin, const Interval& iv) {
  if (bin.lo == bin.hi) return iv.contains(bin.lo) ? 1.0 : 0.0;
  const double a = std::max(bin.lo, iv.lo);
  const double b = std::min(bin.hi, iv.hi);
  if (b <= a) return 0.0;
  return (b - a) / (bin.hi - bin.lo);
}

// Weight multiplier in [0,1] of each state of a column under a region.
std::vector<double> state_mask(const ColumnMarginal& m, const ColumnRegion& region) {
  std::vector<double> mask(m.state_count(), 0.0);
  for (std::size_t s = 0; s < mask.size(); ++s) {
    if (m.kind == ColumnKind::kNumeric) {
      mask[s] = bin_overlap_fraction(m.bins[s], region.interval);
    } else {
      mask[s] = region.admits(m.categories[s]) ? 1.0 : 0.0;
    }
  }
  return mask;
}

double draw_in_bin(const NumericBin& bin, const Interval& iv, Rng& rng) {
  if (bin.lo == bin.hi) return bin.lo;
  const double a = std::max(bin.lo, iv.lo);
  const double b = std::min(bin.hi, iv.hi);
  double x = uniform_real(rng, a, b);
  if (!iv.contains(x)) {
    x = iv.lo_open && x <= iv.lo ? std::nextafter(iv.lo, b) : std::nextafter(iv.hi, a);
  }
  if (!iv.contains(x)) x = 0.5 * (a + b);
  return x;
}

Cell state_value(const ColumnMarginal& m, std::size_t state, const Interval& iv, Rng& rng) {
  if (m.kind == ColumnKind::kNumeric) return draw_in_bin(m.bins[state], iv, rng);
  return m.categories[state];
}

const DependencyEdge* incoming_edge(const JointDistributionModel& model, std::string_view column) {
  for (const auto& e : model.edges) {
    if (e.child == column) return &e;
  }
  return nullptr;
}

// Shared ancestral sampler; mask == nullptr means unconstrained.
std::optional<Row> ancestral(const JointDistributionModel& model, const Region* region, Rng& rng) {
  const auto& cols = model.schema.columns;
  Row row(cols.size());
  std::vector<std::size_t> state(cols.size(), 0);
  static const ColumnRegion kOpen{};
  for (std::size_t c : model.sampling_order()) {
    const ColumnMarginal& m = model.marginals[c];
    const ColumnRegion& creg = region ? (*region)[c] : kOpen;
    std::vector<double> weights;
    if (const DependencyEdge* e = incoming_edge(model, cols[c].name)) {
      weights = model.conditional(*e, state[model.schema.require_index(e->parent)]);
    } else {
      weights = m.probabilities;
    }
    if (region) {
      const auto mask = state_mask(m, creg);
      for (std::size_t s = 0; s < weights.size(); ++s) weights[s] *= mask[s];
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) return std::nullopt;
    state[c] = sample_discrete(rng, weights);
    row[c] = state_value(m, state[c], creg.interval, rng);
  }
  return row;
}

}  // namespace

// --- marginals ------------------------------------------------------------------

std::optional<std::size_t> ColumnMarginal::state_of(const Cell& value) const {
  if (kind == ColumnKind::kCategorical) {
    const std::string text = cell_text(value);
    auto it = std::find(categories.begin(), categories.end(), text);
    if (it == categories.end()) return std::nullopt;
    return static_cast<std::size_t>(it - categories.begin());
  }
  if (bins.empty()) return std::nullopt;
  const double x = cell_number(value);
  std::size_t idx = 0;
  for (std::size_t b = 1; b < bins.size(); ++b) {
    if (x >= bins[b].lo) idx = b;
  }
  return idx;
}

std::vector<NumericBin> equal_frequency_bins(std::vector<double> values, std::size_t k) {
  if (values.empty()) fail(ErrorCode::kInvalidArgument, "cannot bin an empty column");
  if (k == 0) k = 1;
  std::sort(values.begin(), values.end());
  const double lo = values.front();
  const double hi = values.back();
  if (lo == hi) return {NumericBin{lo, hi}};

  std::vector<double> edges{lo};
  const std::size_t n = values.size();
  for (std::size_t j = 1; j < k; ++j) {
    const double e = values[(j * n) / k];
    if (e > edges.back()) edges.push_back(e);
  }
  std::vector<NumericBin> bins;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double upper = i + 1 < edges.size() ? edges[i + 1] : hi;
    bins.push_back({edges[i], upper});
  }
  return bins;
}

std::vector<std::size_t> discretize(const ColumnMarginal& marginal, const Table& table,
                                    std::size_t column) {
  std::vector<std::size_t> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    auto s = marginal.state_of(row[column]);
    if (!s) fail(ErrorCode::kInvalidArgument, "value outside the column domain");
    out.push_back(*s);
  }
  return out;
}

double mutual_information(const std::vector<std::vector<double>>& counts) {
  double n = 0.0;
  std::vector<double> rows(counts.size(), 0.0);
  std::vector<double> cols(counts.empty() ? 0 : counts.front().size(), 0.0);
  for (std::size_t a = 0; a < counts.size(); ++a) {
    for (std::size_t b = 0; b < counts[a].size(); ++b) {
      rows[a] += counts[a][b];
      cols[b] += counts[a][b];
      n += counts[a][b];
    }
  }
  if (n <= 0.0) return 0.0;
  double mi = 0.0;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    for (std::size_t b = 0; b < counts[a].size(); ++b) {
      const double nab = counts[a][b];
      if (nab > 0.0) mi += (nab / n) * std::log(nab * n / (rows[a] * cols[b]));
    }
  }
  return std::max(0.0, mi);
}

// --- model ---------------------------------------------------------------------

const ColumnMarginal& JointDistributionModel::marginal(std::string_view column) const {
  return marginals.at(schema.require_index(column));
}

bool JointDistributionModel::is_detached(std::string_view column) const {
  return std::find(detached.begin(), detached.end(), column) != detached.end();
}

std::vector<double> JointDistributionModel::conditional(const DependencyEdge& edge,
                                                        std::size_t parent_state) const {
  const auto& counts = edge.joint_counts.at(parent_state);
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  const double k = static_cast<double>(counts.size());
  std::vector<double> out(counts.size());
  for (std::size_t s = 0; s < counts.size(); ++s) {
    out[s] = total + smoothing * k > 0.0 ? (counts[s] + smoothing) / (total + smoothing * k)
                                         : 1.0 / k;
  }
  return out;
}

std::vector<std::size_t> JointDistributionModel::sampling_order() const {
  const std::size_t n = schema.columns.size();
  std::vector<std::vector<std::size_t>> children(n);
  std::vector<bool> has_parent(n, false);
  for (const auto& e : edges) {
    const std::size_t p = schema.require_index(e.parent);
    const std::size_t c = schema.require_index(e.child);
    children[p].push_back(c);
    has_parent[c] = true;
  }
  std::vector<std::size_t> roots;
  if (auto r = schema.index_of(root); r && !has_parent[*r]) roots.push_back(*r);
  for (std::size_t i = 0; i < n; ++i) {
    if (!has_parent[i] && (roots.empty() || roots.front() != i)) roots.push_back(i);
  }
  std::vector<std::size_t> order;
  std::queue<std::size_t> q;
  for (std::size_t r : roots) {
    q.push(r);
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      order.push_back(v);
      for (std::size_t c : children[v]) q.push(c);
    }
  }
  return order;
}

JointDistributionModel fit_distribution_model(const Table& training, FitOptions options) {
  if (training.schema.columns.empty()) fail(ErrorCode::kInvalidArgument, "empty table: no columns");
  if (training.rows.size() < 2) fail(ErrorCode::kInvalidArgument, "empty table: need at least 2 rows");

  JointDistributionModel model;
  model.schema = training.schema;
  model.smoothing = options.smoothing;
  const std::size_t ncols = training.schema.columns.size();
  const double n = static_cast<double>(training.rows.size());

  std::vector<std::vector<std::size_t>> states(ncols);
  for (std::size_t c = 0; c < ncols; ++c) {
    const Column& col = training.schema.columns[c];
    ColumnMarginal m;
    m.kind = col.kind;
    if (col.is_numeric()) {
      std::vector<double> values;
      values.reserve(training.rows.size());
      for (const auto& row : training.rows) values.push_back(cell_number(row[c]));
      m.bins = equal_frequency_bins(std::move(values), options.bins);
      m.probabilities.assign(m.bins.size(), 0.0);
    } else {
      m.categories = col.categories;
      m.probabilities.assign(m.categories.size(), 0.0);
    }
    states[c] = discretize(m, training, c);
    for (std::size_t s : states[c]) m.probabilities[s] += 1.0;
    for (double& p : m.probabilities) p /= n;
    model.marginals.push_back(std::move(m));
  }

  auto contingency = [&](std::size_t a, std::size_t b) {
    std::vector<std::vector<double>> counts(model.marginals[a].state_count(),
                                            std::vector<double>(model.marginals[b].state_count(), 0.0));
    for (std::size_t r = 0; r < training.rows.size(); ++r) counts[states[a][r]][states[b][r]] += 1.0;
    return counts;
  };

  model.pairwise_mi.assign(ncols, std::vector<double>(ncols, 0.0));
  struct Candidate {
    double mi;
    std::size_t a, b;
  };
  std::vector<Candidate> candidates;
  for (std::size_t a = 0; a < ncols; ++a) {
    for (std::size_t b = a + 1; b < ncols; ++b) {
      const double mi = mutual_information(contingency(a, b));
      model.pairwise_mi[a][b] = model.pairwise_mi[b][a] = mi;
      candidates.push_back({mi, a, b});
    }
  }
  const auto& cols = training.schema.columns;
  auto pair_key = [&](const Candidate& c) {
    const std::string& x = cols[c.a].name;
    const std::string& y = cols[c.b].name;
    return x < y ? std::make_pair(x, y) : std::make_pair(y, x);
  };
  std::stable_sort(candidates.begin(), candidates.end(), [&](const Candidate& l, const Candidate& r) {
    if (l.mi != r.mi) return l.mi > r.mi;
    return pair_key(l) < pair_key(r);
  });

  // Kruskal on descending MI gives the maximum-weight spanning tree.
  DisjointSets sets(ncols);
  std::vector<std::vector<std::size_t>> adjacent(ncols);
  std::vector<double> weight_sum(ncols, 0.0);
  for (const auto& c : candidates) {
    if (!sets.unite(c.a, c.b)) continue;
    adjacent[c.a].push_back(c.b);
    adjacent[c.b].push_back(c.a);
    weight_sum[c.a] += c.mi;
    weight_sum[c.b] += c.mi;
  }

  std::size_t root = 0;
  for (std::size_t c = 1; c < ncols; ++c) {
    if (weight_sum[c] > weight_sum[root] ||
        (weight_sum[c] == weight_sum[root] && cols[c].name < cols[root].name)) {
      root = c;
    }
  }
  model.root = cols[root].name;

  std::vector<bool> seen(ncols, false);
  std::queue<std::size_t> q;
  q.push(root);
  seen[root] = true;
  while (!q.empty()) {
    const std::size_t p = q.front();
    q.pop();
    auto next = adjacent[p];
    std::sort(next.begin(), next.end());
    for (std::size_t c : next) {
      if (seen[c]) continue;
      seen[c] = true;
      model.edges.push_back({cols[p].name, cols[c].name, model.pairwise_mi[p][c], contingency(p, c)});
      q.push(c);
    }
  }
  return model;
}

// --- UDC ------------------------------------------------------------------------

UserDefinedConstraint UserDefinedConstraint::parse(const Json& document) {
  UserDefinedConstraint udc;
  if (document.is_null()) return udc;
  if (!document.is_object()) fail(ErrorCode::kInvalidArgument, "UDC document must be a JSON object");
  for (auto it = document.begin(); it != document.end(); ++it) {
    const Json& spec = it.value();
    AttributeConstraint ac;
    if (!spec.is_object()) fail(ErrorCode::kInvalidArgument, "UDC for " + it.key() + " must be an object");
    if (auto d = spec.find("distribution"); d != spec.end()) {
      if (!d->is_object() || d->empty()) {
        fail(ErrorCode::kInvalidArgument, "UDC distribution for " + it.key() + " must be a non-empty object");
      }
      std::vector<std::pair<std::string, double>> dist;
      double total = 0.0;
      for (auto p = d->begin(); p != d->end(); ++p) {
        if (!p.value().is_number()) {
          fail(ErrorCode::kInvalidArgument, "UDC probability for " + it.key() + "." + p.key() + " must be numeric");
        }
        const double prob = p.value().get<double>();
        if (prob < 0.0) fail(ErrorCode::kInvalidArgument, "UDC probabilities must be nonnegative");
        total += prob;
        dist.emplace_back(p.key(), prob);
      }
      if (std::fabs(total - 1.0) > kSumTolerance) {
        fail(ErrorCode::kInvalidArgument,
             "UDC probabilities for " + it.key() + " must sum to 1 (got " + std::to_string(total) + ")");
      }
      ac.distribution = std::move(dist);
    }
    if (auto r = spec.find("range"); r != spec.end()) {
      if (!r->is_array() || r->size() != 2 || !(*r)[0].is_number() || !(*r)[1].is_number()) {
        fail(ErrorCode::kInvalidArgument, "UDC range for " + it.key() + " must be [lo, hi]");
      }
      const double lo = (*r)[0].get<double>();
      const double hi = (*r)[1].get<double>();
      if (lo > hi) fail(ErrorCode::kInvalidArgument, "UDC range for " + it.key() + " has lo > hi");
      ac.range = std::make_pair(lo, hi);
    }
    if (!ac.distribution == !ac.range) {
      fail(ErrorCode::kInvalidArgument, "UDC for " + it.key() + " needs exactly one of distribution or range");
    }
    udc.attributes.emplace_back(it.key(), std::move(ac));
  }
  return udc;
}

Json UserDefinedConstraint::to_json() const {
  Json out = Json::object();
  for (const auto& [name, ac] : attributes) {
    if (ac.distribution) {
      Json d = Json::object();
      for (const auto& [k, p] : *ac.distribution) d[k] = p;
      out[name] = Json{{"distribution", d}};
    } else {
      out[name] = Json{{"range", Json::array({ac.range->first, ac.range->second})}};
    }
  }
  return out;
}

JointDistributionModel apply_udc(const JointDistributionModel& model,
                                 const UserDefinedConstraint& udc) {
  JointDistributionModel out = model;
  for (const auto& [name, ac] : udc.attributes) {
    const auto idx = model.schema.index_of(name);
    if (!idx) fail(ErrorCode::kInvalidArgument, "UDC attribute '" + name + "' is not a schema column");
    Column& col = out.schema.columns[*idx];
    ColumnMarginal& m = out.marginals[*idx];

    if (ac.distribution) {
      if (col.is_numeric()) {
        fail(ErrorCode::kInvalidArgument, "UDC distribution on numeric column '" + name + "'; use a range");
      }
      double total = 0.0;
      for (const auto& entry : *ac.distribution) total += entry.second;
      if (std::fabs(total - 1.0) > kSumTolerance) {
        fail(ErrorCode::kInvalidArgument, "UDC probabilities for " + name + " must sum to 1");
      }
      for (const auto& [cat, p] : *ac.distribution) {
        if (std::find(col.categories.begin(), col.categories.end(), cat) == col.categories.end()) {
          col.categories.push_back(cat);
        }
      }
      m.categories = col.categories;
      m.probabilities.assign(m.categories.size(), 0.0);
      for (const auto& [cat, p] : *ac.distribution) {
        const auto pos = std::find(m.categories.begin(), m.categories.end(), cat) - m.categories.begin();
        m.probabilities[static_cast<std::size_t>(pos)] = p;
      }
    } else {
      if (!col.is_numeric()) {
        fail(ErrorCode::kInvalidArgument, "UDC range on categorical column '" + name + "'");
      }
      const auto [lo, hi] = *ac.range;
      if (hi < col.min || lo > col.max) {
        fail(ErrorCode::kInvalidArgument, "UDC range for '" + name + "' is disjoint from the column domain");
      }
      const Interval iv{lo, hi, false, false};
      ColumnMarginal truncated;
      truncated.kind = ColumnKind::kNumeric;
      for (std::size_t s = 0; s < m.bins.size(); ++s) {
        const double frac = bin_overlap_fraction(m.bins[s], iv);
        if (frac <= 0.0) continue;
        const NumericBin& b = m.bins[s];
        truncated.bins.push_back(b.lo == b.hi ? b : NumericBin{std::max(b.lo, lo), std::min(b.hi, hi)});
        truncated.probabilities.push_back(m.probabilities[s] * frac);
      }
      const double total = std::accumulate(truncated.probabilities.begin(),
                                           truncated.probabilities.end(), 0.0);
      if (truncated.bins.empty() || !(total > 0.0)) {
        fail(ErrorCode::kInvalidArgument, "UDC range for '" + name + "' has no training mass");
      }
      for (double& p : truncated.probabilities) p /= total;
      m = std::move(truncated);
      col.min = std::max(col.min, lo);
      col.max = std::min(col.max, hi);
    }

    std::erase_if(out.edges, [&](const DependencyEdge& e) { return e.parent == name || e.child == name; });
    if (!out.is_detached(name)) out.detached.push_back(name);
  }
  return out;
}

// --- sampling ---------------------------------------------------------------------

bool Interval::contains(double x) const noexcept {
  if (lo_open ? !(x > lo) : !(x >= lo)) return false;
  if (hi_open ? !(x < hi) : !(x <= hi)) return false;
  return true;
}

bool Interval::empty() const noexcept {
  if (lo > hi) return true;
  if (lo == hi) return lo_open || hi_open;
  return false;
}

bool ColumnRegion::admits(const std::string& category) const {
  if (allowed && !allowed->contains(category)) return false;
  return !excluded.contains(category);
}

Region unconstrained_region(const TableSchema& schema) { return Region(schema.columns.size()); }

bool region_contains(const TableSchema& schema, const Region& region, const Row& row) {
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    if (schema.columns[c].is_numeric()) {
      if (!region[c].interval.contains(cell_number(row[c]))) return false;
    } else if (!region[c].admits(cell_text(row[c]))) {
      return false;
    }
  }
  return true;
}

bool region_satisfiable(const JointDistributionModel& model, const Region& region) {
  for (std::size_t c = 0; c < model.schema.columns.size(); ++c) {
    const ColumnMarginal& m = model.marginals[c];
    const auto mask = state_mask(m, region[c]);
    const bool from_marginal = incoming_edge(model, model.schema.columns[c].name) == nullptr;
    double mass = 0.0;
    for (std::size_t s = 0; s < mask.size(); ++s) {
      mass += mask[s] * (from_marginal ? m.probabilities[s] : 1.0);
    }
    if (!(mass > 0.0)) return false;
  }
  return true;
}

Row sample_row(const JointDistributionModel& model, Rng& rng) {
  auto row = ancestral(model, nullptr, rng);
  if (!row) fail(ErrorCode::kInternal, "model has a zero-mass column");
  return std::move(*row);
}

std::vector<Row> sample_joint(const JointDistributionModel& model, std::size_t n,
                              std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Row> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rows.push_back(sample_row(model, rng));
  return rows;
}

std::optional<Row> sample_constrained(const JointDistributionModel& model, const Region& region,
                                      Rng& rng) {
  return ancestral(model, &region, rng);
}

// --- serialization ----------------------------------------------------------------

void to_json(Json& j, const JointDistributionModel& model) {
  Json marginals = Json::array();
  for (const auto& m : model.marginals) {
    Json jm{{"kind", m.kind == ColumnKind::kNumeric ? "numeric" : "categorical"},
            {"probabilities", m.probabilities}};
    if (m.kind == ColumnKind::kNumeric) {
      Json bins = Json::array();
      for (const auto& b : m.bins) bins.push_back(Json::array({b.lo, b.hi}));
      jm["bins"] = bins;
    } else {
      jm["categories"] = m.categories;
    }
    marginals.push_back(std::move(jm));
  }
  Json edges = Json::array();
  for (const auto& e : model.edges) {
    edges.push_back(Json{{"parent", e.parent},
                         {"child", e.child},
                         {"mutual_information", e.mutual_information},
                         {"joint_counts", e.joint_counts}});
  }
  j = Json{{"schema", model.schema},
           {"marginals", marginals},
           {"edges", edges},
           {"root", model.root},
           {"detached", model.detached},
           {"smoothing", model.smoothing},
           {"pairwise_mi", model.pairwise_mi}};
}

void from_json(const Json& j, JointDistributionModel& model) {
  model = JointDistributionModel{};
  model.schema = j.at("schema").get<TableSchema>();
  for (const auto& jm : j.at("marginals")) {
    ColumnMarginal m;
    m.kind = jm.at("kind").get<std::string>() == "numeric" ? ColumnKind::kNumeric
                                                            : ColumnKind::kCategorical;
    m.probabilities = jm.at("probabilities").get<std::vector<double>>();
    if (m.kind == ColumnKind::kNumeric) {
      for (const auto& b : jm.at("bins")) m.bins.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    } else {
      m.categories = jm.at("categories").get<std::vector<std::string>>();
    }
    model.marginals.push_back(std::move(m));
  }
  for (const auto& je : j.at("edges")) {
    model.edges.push_back({je.at("parent").get<std::string>(), je.at("child").get<std::string>(),
                           je.at("mutual_information").get<double>(),
                           je.at("joint_counts").get<std::vector<std::vector<double>>>()});
  }
  model.root = j.at("root").get<std::string>();
  model.detached = j.value("detached", std::vector<std::string>{});
  model.smoothing = j.value("smoothing", 1.0);
  model.pairwise_mi = j.value("pairwise_mi", std::vector<std::vector<double>>{});
}

}  // namespace modelprobe::synth
