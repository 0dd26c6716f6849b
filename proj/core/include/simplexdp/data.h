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
//
// Sensitive-data ingestion and aggregation: categorical counting queries,
// transition-count construction, partition merging and structural
// validation. Values produced here are immutable snapshots and safe to share
// across threads.

#ifndef SIMPLEXDP_DATA_H_
#define SIMPLEXDP_DATA_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace simplexdp {

// Ordered set of at least three distinct category labels.
struct CategorySet {
  std::vector<std::string> labels;

  static CategorySet create(std::vector<std::string> labels);
  std::size_t size() const { return labels.size(); }
  std::optional<std::size_t> index_of(std::string_view label) const;
};

// Partitioned database of categorical events; one label per event record.
// Partitions are disjoint by construction (each record lives in exactly one).
struct EventLog {
  std::vector<std::string> partition_ids;
  std::vector<std::vector<std::string>> partitions;

  static EventLog create(std::vector<std::string> partition_ids,
                         std::vector<std::vector<std::string>> partitions);
  std::size_t total_events() const;
};

// A counting-query output: per-category fractions on the 1/N grid, with the
// record count N and the border parameter eta it was admitted under.
struct CountVector {
  std::vector<double> probs;
  int n = 0;
  std::int64_t N = 0;
  double eta = 0.0;
  std::vector<std::string> warnings;

  double min_entry() const;
};

struct CountOptions {
  // Caller-supplied eta; must be positive and at most the minimum entry.
  std::optional<double> eta_override;
  // When set, eta is truncated down to a multiple of 1/(4N) strictly below
  // the minimum entry, leaving slack between the data and the border.
  bool eta_slack = false;
};

// Tallies one partition into a CountVector. eta defaults to the minimum
// positive entry. A zero-count category yields eta = 0 plus a warning: no
// bordered simplex with eta > 0 admits such a vector.
CountVector count_query(const std::vector<std::string>& partition, const CategorySet& categories,
                        const CountOptions& options = {});

// Square matrix of transition counts; row i is the counting query of the
// partition whose id equals state label i.
struct TransitionCounts {
  std::vector<CountVector> rows;
  CategorySet state_labels;

  int n() const { return static_cast<int>(state_labels.size()); }
};

TransitionCounts transition_counts(const EventLog& log, const CategorySet& categories,
                                   const CountOptions& options = {});

// Relabels events through the mapping and concatenates partitions that share
// an image id. The mapping must cover every event label; partition ids are
// translated too (exempt from the coverage requirement only in the
// single-partition vector case). Total event count is preserved.
EventLog merge_partitions(const EventLog& log,
                          const std::vector<std::pair<std::string, std::string>>& mapping);

// Structural diagnostics for a chain: irreducibility (strong connectivity of
// the positive-entry digraph) and strict positivity of all entries. These
// are reports, not exceptions.
struct ChainDiagnostics {
  bool irreducible = false;
  bool strictly_positive = false;
  std::vector<std::string> notes;

  bool pass() const { return irreducible && strictly_positive; }
};

ChainDiagnostics validate_chain_structure(const TransitionCounts& tc);

// Opt-in smoothing for vectors with zero cells: adds one event to every
// category and renormalizes (N grows by n). Never applied implicitly.
CountVector apply_pseudocounts(const CountVector& q);

// CSV ingestion. Vector mode: header "category", one row per event. Chain
// mode: header "from_state,to_state"; the from_state column induces the
// partition. Merge map: header "old_label,new_label". UTF-8, comma
// separated; labels containing commas are rejected (no quoting).
EventLog read_vector_csv(const std::string& path);
EventLog read_chain_csv(const std::string& path);
std::vector<std::pair<std::string, std::string>> read_merge_csv(const std::string& path);

// Category universes derived from ingested logs, in first-appearance order.
// For chains, partition ids come first, then destination-only labels.
CategorySet vector_categories(const EventLog& log);
CategorySet chain_categories(const EventLog& log);

}  // namespace simplexdp

#endif  // SIMPLEXDP_DATA_H_
