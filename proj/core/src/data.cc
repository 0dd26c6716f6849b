// Copyright 2026 The SimplexDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "simplexdp/data.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "simplexdp/errors.h"

namespace simplexdp {
namespace {

constexpr double kGridTol = 1e-9;

std::string quote(std::string_view s) { return "'" + std::string(s) + "'"; }

// Largest multiple of step strictly below x.
double truncate_below(double x, double step) {
  double m = std::floor(x / step + kGridTol);
  if (m * step >= x - step * kGridTol) m -= 1.0;
  return m * step;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + quote(path) + " for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void check_field_count(const std::string& path, std::size_t lineno,
                       const std::vector<std::string>& fields, std::size_t expected) {
  if (fields.size() != expected) {
    throw DataFormatError(path + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(expected) + " comma-separated field(s), got " +
                          std::to_string(fields.size()) +
                          " (labels containing commas are not supported)");
  }
  for (const auto& f : fields) {
    if (f.empty()) {
      throw DataFormatError(path + ":" + std::to_string(lineno) + ": empty field");
    }
  }
}

}  // namespace

CategorySet CategorySet::create(std::vector<std::string> labels) {
  if (labels.size() < 3) {
    throw ValidationError("CategorySet: need at least 3 categories, got " +
                          std::to_string(labels.size()));
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) {
      throw ValidationError("CategorySet: duplicate label " + quote(l));
    }
  }
  return CategorySet{std::move(labels)};
}

std::optional<std::size_t> CategorySet::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  return std::nullopt;
}

EventLog EventLog::create(std::vector<std::string> partition_ids,
                          std::vector<std::vector<std::string>> partitions) {
  if (partition_ids.size() != partitions.size()) {
    throw ValidationError("EventLog: partition id count does not match partition count");
  }
  if (partitions.empty()) throw ValidationError("EventLog: no partitions");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < partition_ids.size(); ++i) {
    if (!seen.insert(partition_ids[i]).second) {
      throw ValidationError("EventLog: duplicate partition id " + quote(partition_ids[i]));
    }
    if (partitions[i].empty()) {
      throw ValidationError("EventLog: partition " + quote(partition_ids[i]) + " is empty");
    }
  }
  return EventLog{std::move(partition_ids), std::move(partitions)};
}

std::size_t EventLog::total_events() const {
  std::size_t total = 0;
  for (const auto& p : partitions) total += p.size();
  return total;
}

double CountVector::min_entry() const {
  double m = std::numeric_limits<double>::infinity();
  for (double p : probs) m = std::min(m, p);
  return m;
}

CountVector count_query(const std::vector<std::string>& partition, const CategorySet& categories,
                        const CountOptions& options) {
  if (partition.empty()) throw ValidationError("count_query: empty partition");
  const std::size_t n = categories.size();
  std::vector<std::int64_t> counts(n, 0);
  for (std::size_t r = 0; r < partition.size(); ++r) {
    auto idx = categories.index_of(partition[r]);
    if (!idx) {
      throw ValidationError("count_query: record " + std::to_string(r) + " has unknown label " +
                            quote(partition[r]));
    }
    ++counts[*idx];
  }
  const auto N = static_cast<std::int64_t>(partition.size());
  CountVector q;
  q.n = static_cast<int>(n);
  q.N = N;
  q.probs.resize(n);
  double min_positive = std::numeric_limits<double>::infinity();
  bool has_zero = false;
  for (std::size_t i = 0; i < n; ++i) {
    q.probs[i] = static_cast<double>(counts[i]) / static_cast<double>(N);
    if (counts[i] == 0) {
      has_zero = true;
      q.warnings.push_back("category " + quote(categories.labels[i]) +
                           " has zero count; no bordered simplex with eta > 0 admits this vector");
    } else {
      min_positive = std::min(min_positive, q.probs[i]);
    }
  }
  double eta = has_zero ? 0.0 : min_positive;
  if (options.eta_slack && !has_zero) {
    eta = truncate_below(min_positive, 1.0 / (4.0 * static_cast<double>(N)));
    if (eta <= 0.0) {
      q.warnings.push_back("eta slack truncation reached zero; falling back to the minimum entry");
      eta = min_positive;
    }
  }
  if (options.eta_override) {
    const double o = *options.eta_override;
    if (!(o > 0.0) || !std::isfinite(o)) {
      throw ValidationError("count_query: eta override must be positive and finite");
    }
    if (o > q.min_entry() + 1e-12) {
      throw AdmissionError("count_query: eta override " + std::to_string(o) +
                           " exceeds the minimum entry " + std::to_string(q.min_entry()));
    }
    eta = o;
  }
  q.eta = eta;
  return q;
}

TransitionCounts transition_counts(const EventLog& log, const CategorySet& categories,
                                   const CountOptions& options) {
  const std::size_t n = categories.size();
  if (log.partitions.size() != n) {
    throw StructureError("transition_counts: " + std::to_string(log.partitions.size()) +
                         " partition(s) for " + std::to_string(n) +
                         " state(s); a square chain needs one partition per state");
  }
  // Reorder partitions to the category order; ids must match labels 1-1.
  std::vector<const std::vector<std::string>*> by_state(n, nullptr);
  for (std::size_t p = 0; p < n; ++p) {
    auto idx = categories.index_of(log.partition_ids[p]);
    if (!idx) {
      throw StructureError("transition_counts: partition id " + quote(log.partition_ids[p]) +
                           " is not a state label");
    }
    by_state[*idx] = &log.partitions[p];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (by_state[i] == nullptr) {
      throw StructureError("transition_counts: state " + quote(categories.labels[i]) +
                           " has no outgoing events (no partition)");
    }
  }
  TransitionCounts tc;
  tc.state_labels = categories;
  tc.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    tc.rows.push_back(count_query(*by_state[i], categories, options));
  }
  return tc;
}

EventLog merge_partitions(const EventLog& log,
                          const std::vector<std::pair<std::string, std::string>>& mapping) {
  std::map<std::string, std::string> map;
  for (const auto& [from, to] : mapping) {
    auto [it, inserted] = map.emplace(from, to);
    if (!inserted && it->second != to) {
      throw ValidationError("merge_partitions: conflicting mappings for label " + quote(from));
    }
  }
  // Coverage: every event label, and every partition id unless this is the
  // degenerate single-partition (vector) case with a synthetic id.
  std::set<std::string> unmapped;
  for (const auto& p : log.partitions) {
    for (const auto& e : p) {
      if (!map.count(e)) unmapped.insert(e);
    }
  }
  const bool vector_mode = log.partitions.size() == 1;
  if (!vector_mode) {
    for (const auto& id : log.partition_ids) {
      if (!map.count(id)) unmapped.insert(id);
    }
  }
  if (!unmapped.empty()) {
    std::string msg = "merge_partitions: mapping is not total; unmapped label(s):";
    for (const auto& l : unmapped) msg += " " + quote(l);
    throw ValidationError(msg);
  }

  auto image_of = [&](const std::string& l) {
    auto it = map.find(l);
    return it == map.end() ? l : it->second;
  };

  std::vector<std::string> new_ids;
  std::vector<std::vector<std::string>> new_parts;
  std::map<std::string, std::size_t> id_pos;
  for (std::size_t p = 0; p < log.partitions.size(); ++p) {
    const std::string nid = image_of(log.partition_ids[p]);
    auto [it, inserted] = id_pos.emplace(nid, new_ids.size());
    if (inserted) {
      new_ids.push_back(nid);
      new_parts.emplace_back();
    }
    auto& dst = new_parts[it->second];
    for (const auto& e : log.partitions[p]) dst.push_back(map.at(e));
  }

  std::set<std::string> image_labels(new_ids.begin(), new_ids.end());
  for (const auto& p : new_parts) image_labels.insert(p.begin(), p.end());
  if (image_labels.size() < 3) {
    throw ValidationError("merge_partitions: merged image has " +
                          std::to_string(image_labels.size()) + " label(s); need at least 3");
  }
  return EventLog::create(std::move(new_ids), std::move(new_parts));
}

ChainDiagnostics validate_chain_structure(const TransitionCounts& tc) {
  const int n = tc.n();
  ChainDiagnostics d;
  d.strictly_positive = true;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (tc.rows[i].probs[j] <= 0.0) {
        d.strictly_positive = false;
        d.notes.push_back("transition " + tc.state_labels.labels[i] + " -> " +
                          tc.state_labels.labels[j] +
                          " never occurred; bordered-simplex admission of this row needs eta <= 0");
      }
    }
  }
  // Strong connectivity: everything reachable from state 0 in the graph and
  // in its transpose.
  auto reach = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w) {
        const double p = transpose ? tc.rows[w].probs[v] : tc.rows[v].probs[w];
        if (p > 0.0 && !seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    return std::count(seen.begin(), seen.end(), 1) == n;
  };
  d.irreducible = reach(false) && reach(true);
  if (!d.irreducible) {
    d.notes.push_back("positive-entry digraph is not strongly connected; the chain is reducible");
  }
  for (int j = 0; j < n; ++j) {
    double col = 0.0;
    for (int i = 0; i < n; ++i) col += tc.rows[i].probs[j];
    if (col == 0.0) {
      d.notes.push_back("state " + tc.state_labels.labels[j] +
                        " has outgoing data but no incoming transitions");
    }
  }
  return d;
}

CountVector apply_pseudocounts(const CountVector& q) {
  CountVector out;
  out.n = q.n;
  out.N = q.N + q.n;
  out.probs.resize(q.probs.size());
  double min_entry = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q.probs.size(); ++i) {
    const auto count = static_cast<std::int64_t>(std::llround(q.probs[i] * static_cast<double>(q.N)));
    out.probs[i] = static_cast<double>(count + 1) / static_cast<double>(out.N);
    min_entry = std::min(min_entry, out.probs[i]);
  }
  out.eta = min_entry;
  out.warnings = q.warnings;
  out.warnings.push_back("pseudo-count policy applied: one event added to every category, N " +
                         std::to_string(q.N) + " -> " + std::to_string(out.N));
  return out;
}

EventLog read_vector_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || split_fields(lines[0]) != std::vector<std::string>{"category"}) {
    throw DataFormatError(path + ": expected header 'category'");
  }
  std::vector<std::string> events;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() && i + 1 == lines.size()) break;  // trailing newline
    const auto fields = split_fields(lines[i]);
    check_field_count(path, i + 1, fields, 1);
    events.push_back(fields[0]);
  }
  if (events.empty()) throw DataFormatError(path + ": no event rows");
  return EventLog::create({"events"}, {std::move(events)});
}

EventLog read_chain_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() ||
      split_fields(lines[0]) != std::vector<std::string>{"from_state", "to_state"}) {
    throw DataFormatError(path + ": expected header 'from_state,to_state'");
  }
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> parts;
  std::map<std::string, std::size_t> pos;
  std::size_t rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() && i + 1 == lines.size()) break;
    const auto fields = split_fields(lines[i]);
    check_field_count(path, i + 1, fields, 2);
    auto [it, inserted] = pos.emplace(fields[0], ids.size());
    if (inserted) {
      ids.push_back(fields[0]);
      parts.emplace_back();
    }
    parts[it->second].push_back(fields[1]);
    ++rows;
  }
  if (rows == 0) throw DataFormatError(path + ": no event rows");
  return EventLog::create(std::move(ids), std::move(parts));
}

std::vector<std::pair<std::string, std::string>> read_merge_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() ||
      split_fields(lines[0]) != std::vector<std::string>{"old_label", "new_label"}) {
    throw DataFormatError(path + ": expected header 'old_label,new_label'");
  }
  std::vector<std::pair<std::string, std::string>> mapping;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() && i + 1 == lines.size()) break;
    const auto fields = split_fields(lines[i]);
    check_field_count(path, i + 1, fields, 2);
    mapping.emplace_back(fields[0], fields[1]);
  }
  if (mapping.empty()) throw DataFormatError(path + ": no mapping rows");
  return mapping;
}

CategorySet vector_categories(const EventLog& log) {
  std::vector<std::string> labels;
  std::set<std::string> seen;
  for (const auto& p : log.partitions) {
    for (const auto& e : p) {
      if (seen.insert(e).second) labels.push_back(e);
    }
  }
  return CategorySet::create(std::move(labels));
}

CategorySet chain_categories(const EventLog& log) {
  std::vector<std::string> labels;
  std::set<std::string> seen;
  for (const auto& id : log.partition_ids) {
    if (seen.insert(id).second) labels.push_back(id);
  }
  for (const auto& p : log.partitions) {
    for (const auto& e : p) {
      if (seen.insert(e).second) labels.push_back(e);
    }
  }
  return CategorySet::create(std::move(labels));
}

}  // namespace simplexdp
