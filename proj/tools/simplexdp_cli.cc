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
// Command line front end: ingestion, budget accounting, privatization, and
// report emission. Reports are JSON with a fixed key order; sweeps emit CSV.
// All randomness flows from --seed through addressed substreams, so reports
// are byte-identical across runs and across SIMPLEXDP_THREADS settings.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "simplexdp/accuracy.h"
#include "simplexdp/data.h"
#include "simplexdp/dirichlet.h"
#include "simplexdp/errors.h"
#include "simplexdp/markov.h"
#include "simplexdp/privacy.h"
#include "simplexdp/rng.h"

#ifndef SIMPLEXDP_VERSION
#define SIMPLEXDP_VERSION "0.0.0"
#endif

namespace {

using nlohmann::ordered_json;
using namespace simplexdp;

constexpr const char* kDeltaDomainNote =
    "delta is certified on the extreme count vectors of the bordered 1/N grid; "
    "the border count is rounded down to the grid, which encloses every "
    "admissible count vector and can only raise the reported delta";

struct Options {
  std::string input;
  std::string merge_map;
  std::string output;
  std::vector<double> eta;
  std::optional<double> gamma;
  std::optional<double> k;
  std::optional<double> epsilon;
  std::int64_t samples = 1000000;
  std::int64_t reps = 2000;
  std::uint64_t seed = 0;
  bool include_sensitive = false;
  bool pseudo_count = false;
  std::string z_sign = "paper";
  std::optional<std::int64_t> record_count;  // --N for parameter-only commands
  std::optional<int> category_count;         // --n for parameter-only commands
  std::string k_grid;
  std::string epsilon_grid;
  std::string scale_grid;
};

enum class InputKind { kVector, kChain };

ZSign z_sign_of(const Options& o) {
  return o.z_sign == "classical" ? ZSign::kClassical : ZSign::kPaper;
}

InputKind sniff_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file " + path);
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header == "category") return InputKind::kVector;
  if (header == "from_state,to_state") return InputKind::kChain;
  throw DataFormatError(path + ":1: unrecognized header '" + header +
                        "'; expected 'category' or 'from_state,to_state'");
}

void write_text(const std::string& output, const std::string& text) {
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw IoError("cannot open output file " + output);
  out << text;
  if (!out) throw IoError("failed writing output file " + output);
}

void emit_report(const Options& o, ordered_json report) {
  write_text(o.output, report.dump(2) + "\n");
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Inclusive start:stop:step grid; a bare number is a single-point grid.
std::vector<double> parse_grid(const std::string& text, const char* flag) {
  std::vector<double> parts;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t colon = text.find(':', begin);
    const std::string piece =
        text.substr(begin, colon == std::string::npos ? std::string::npos : colon - begin);
    try {
      std::size_t used = 0;
      const double v = std::stod(piece, &used);
      if (used != piece.size()) throw std::invalid_argument(piece);
      parts.push_back(v);
    } catch (const std::exception&) {
      throw ValidationError(std::string(flag) + ": cannot parse '" + piece + "' in grid '" +
                            text + "'");
    }
    if (colon == std::string::npos) break;
    begin = colon + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) {
    throw ValidationError(std::string(flag) + ": expected start:stop:step or a single value, got '" +
                          text + "'");
  }
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0) || stop < start) {
    throw ValidationError(std::string(flag) + ": need stop >= start and step > 0 in '" + text +
                          "'");
  }
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double v = start + step * i;
    if (v > stop + 1e-9 * step) break;
    grid.push_back(v);
  }
  return grid;
}

// Effective border parameter. An explicit value wins; otherwise the data
// minimum, tightened onto the 1/(4N) grid strictly below 1/4 when the
// minimum is too large to be a valid eta. nullopt means a zero count makes
// every eta > 0 inadmissible.
std::optional<double> effective_eta(const CountVector& q, std::optional<double> flag,
                                    std::vector<std::string>* notes) {
  if (flag) return flag;
  if (!(q.eta > 0.0)) return std::nullopt;
  if (q.eta < 0.25) return q.eta;
  const double step = 1.0 / (4.0 * static_cast<double>(q.N));
  const double eta = static_cast<double>(q.N - 1) * step;
  if (notes != nullptr) {
    notes->push_back("data minimum " + fmt17(q.eta) +
                     " is not a valid eta; tightened to the 1/(4N) grid point " + fmt17(eta));
  }
  return eta;
}

double require_eta(const CountVector& q, std::optional<double> flag,
                   std::vector<std::string>* notes, const std::string& what) {
  const auto eta = effective_eta(q, flag, notes);
  if (!eta) {
    throw AdmissionError(what +
                         ": a category has zero count, so no eta > 0 admits the data; merge "
                         "sparse categories (--merge-map) or add pseudocounts (--pseudo-count)");
  }
  return *eta;
}

void require_k_xor_epsilon(const Options& o, const char* command) {
  if (o.k.has_value() == o.epsilon.has_value()) {
    throw ValidationError(std::string(command) + ": exactly one of --k or --epsilon is required");
  }
}

double resolve_k(const Options& o, double eta, double gamma, std::int64_t N, int n) {
  if (o.k) return *o.k;
  return calibrate_k(*o.epsilon, eta, gamma, N, n);
}

double require_gamma(const Options& o, const char* command) {
  if (!o.gamma) throw ValidationError(std::string(command) + ": --gamma is required");
  return *o.gamma;
}

struct LoadedVector {
  CategorySet categories;
  CountVector q;
  std::vector<std::string> eta_notes;
};

LoadedVector load_vector(const Options& o) {
  EventLog log = read_vector_csv(o.input);
  if (!o.merge_map.empty()) log = merge_partitions(log, read_merge_csv(o.merge_map));
  LoadedVector lv;
  lv.categories = vector_categories(log);
  lv.q = count_query(log.partitions.front(), lv.categories);
  if (o.pseudo_count) lv.q = apply_pseudocounts(lv.q);
  return lv;
}

struct LoadedChain {
  TransitionCounts tc;
  std::vector<std::string> eta_notes;
};

LoadedChain load_chain(const Options& o) {
  EventLog log = read_chain_csv(o.input);
  if (!o.merge_map.empty()) log = merge_partitions(log, read_merge_csv(o.merge_map));
  LoadedChain lc;
  lc.tc = transition_counts(log, chain_categories(log));
  if (o.pseudo_count) {
    for (auto& row : lc.tc.rows) row = apply_pseudocounts(row);
  }
  return lc;
}

// Per-row eta flags: none (data default per row), one (shared), or n values.
std::optional<double> row_eta_flag(const Options& o, std::size_t i, std::size_t n) {
  if (o.eta.empty()) return std::nullopt;
  if (o.eta.size() == 1) return o.eta.front();
  if (o.eta.size() != n) {
    throw ValidationError("--eta: expected 1 or " + std::to_string(n) + " values, got " +
                          std::to_string(o.eta.size()));
  }
  return o.eta[i];
}

std::optional<double> vector_eta_flag(const Options& o) {
  if (o.eta.empty()) return std::nullopt;
  if (o.eta.size() != 1) throw ValidationError("--eta: vector mode takes a single value");
  return o.eta.front();
}

std::vector<MechanismConfig> chain_configs(const TransitionCounts& tc, const Options& o,
                                           const char* command,
                                           std::vector<std::string>* eta_notes) {
  const double gamma = require_gamma(o, command);
  const std::size_t n = tc.state_labels.size();
  std::vector<MechanismConfig> cfgs;
  cfgs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CountVector& row = tc.rows[i];
    const double eta = require_eta(row, row_eta_flag(o, i, n), eta_notes,
                                   std::string(command) + " row '" + tc.state_labels.labels[i] +
                                       "'");
    const double k = resolve_k(o, eta, gamma, row.N, row.n);
    cfgs.push_back(MechanismConfig::validated(k, eta, gamma, row.N, row.n));
  }
  return cfgs;
}

std::vector<std::int64_t> sensitive_counts(const CountVector& q) {
  std::vector<std::int64_t> counts(q.probs.size());
  for (std::size_t i = 0; i < q.probs.size(); ++i) {
    counts[i] = static_cast<std::int64_t>(std::llround(q.probs[i] * static_cast<double>(q.N)));
  }
  return counts;
}

Matrix rows_matrix(const TransitionCounts& tc) {
  Matrix P;
  P.reserve(tc.rows.size());
  for (const auto& row : tc.rows) P.push_back(row.probs);
  return P;
}

ordered_json budget_json(const PrivacyBudget& b) {
  ordered_json j;
  j["epsilon"] = b.epsilon;
  j["delta"] = b.delta;
  if (b.mc_std_error) j["delta_std_error"] = *b.mc_std_error;
  j["method"] = budget_method_name(b.method);
  return j;
}

ordered_json accuracy_json(const AccuracyReport& a) {
  ordered_json j;
  j["expected_kl_exact"] = a.expected_kl_exact;
  j["expected_kl_bound"] = a.expected_kl_bound;
  j["coord_abs_error"] = a.coord_abs_error;
  j["coord_abs_error_upper"] = a.coord_abs_error_upper;
  j["coord_abs_error_lower"] = a.coord_abs_error_lower;
  j["coord_sq_error"] = a.coord_sq_error;
  j["coord_sq_error_upper"] = a.coord_sq_error_upper;
  return j;
}

ordered_json mechanism_json(const MechanismConfig& c, std::int64_t samples) {
  ordered_json j;
  j["k"] = c.k;
  j["eta"] = c.eta;
  j["gamma"] = c.gamma;
  j["N"] = c.N;
  j["n"] = c.n;
  j["min_k"] = min_k(c.eta);
  j["samples"] = samples;
  return j;
}

ordered_json provenance_json(const Options& o, const char* command, bool uses_seed) {
  ordered_json j;
  j["tool_version"] = SIMPLEXDP_VERSION;
  j["command"] = command;
  if (!o.input.empty()) j["input"] = o.input;
  if (!o.merge_map.empty()) j["merge_map"] = o.merge_map;
  if (o.pseudo_count) j["pseudo_count"] = true;
  if (uses_seed) j["seed"] = o.seed;
  j["delta_domain_note"] = kDeltaDomainNote;
  return j;
}

// ---------------------------------------------------------------------------
// count

void run_count(const Options& o) {
  ordered_json report;
  if (sniff_input(o.input) == InputKind::kVector) {
    LoadedVector lv = load_vector(o);
    const auto eta = effective_eta(lv.q, vector_eta_flag(o), &lv.eta_notes);
    report["mode"] = "vector";
    report["categories"] = lv.categories.labels;
    report["n"] = lv.q.n;
    report["N"] = lv.q.N;
    report["eta_data_minimum"] = lv.q.eta;
    report["eta_effective"] = eta ? ordered_json(*eta) : ordered_json(nullptr);
    report["min_k"] = eta ? ordered_json(min_k(*eta)) : ordered_json(nullptr);
    report["warnings"] = lv.q.warnings;
    report["eta_notes"] = lv.eta_notes;
    if (o.include_sensitive) {
      report["sensitive"]["counts"] = sensitive_counts(lv.q);
      report["sensitive"]["probs"] = lv.q.probs;
    }
  } else {
    LoadedChain lc = load_chain(o);
    const std::size_t n = lc.tc.state_labels.size();
    report["mode"] = "chain";
    report["states"] = lc.tc.state_labels.labels;
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
      const CountVector& row = lc.tc.rows[i];
      const auto eta = effective_eta(row, row_eta_flag(o, i, n), &lc.eta_notes);
      ordered_json r;
      r["state"] = lc.tc.state_labels.labels[i];
      r["N"] = row.N;
      r["eta_data_minimum"] = row.eta;
      r["eta_effective"] = eta ? ordered_json(*eta) : ordered_json(nullptr);
      r["min_k"] = eta ? ordered_json(min_k(*eta)) : ordered_json(nullptr);
      r["warnings"] = row.warnings;
      rows.push_back(std::move(r));
    }
    report["rows"] = std::move(rows);
    const ChainDiagnostics diag = validate_chain_structure(lc.tc);
    report["structure"]["irreducible"] = diag.irreducible;
    report["structure"]["strictly_positive"] = diag.strictly_positive;
    report["structure"]["notes"] = diag.notes;
    report["eta_notes"] = lc.eta_notes;
    if (o.include_sensitive) {
      ordered_json counts = ordered_json::array();
      ordered_json probs = ordered_json::array();
      for (const auto& row : lc.tc.rows) {
        counts.push_back(sensitive_counts(row));
        probs.push_back(row.probs);
      }
      report["sensitive"]["counts"] = std::move(counts);
      report["sensitive"]["probs"] = std::move(probs);
    }
  }
  report["provenance"] = provenance_json(o, "count", false);
  emit_report(o, std::move(report));
}

// ---------------------------------------------------------------------------
// privatize-vector

void run_privatize_vector(const Options& o) {
  require_k_xor_epsilon(o, "privatize-vector");
  const double gamma = require_gamma(o, "privatize-vector");
  if (sniff_input(o.input) != InputKind::kVector) {
    throw ValidationError("privatize-vector: input is a chain CSV; use privatize-chain");
  }
  LoadedVector lv = load_vector(o);
  const double eta = require_eta(lv.q, vector_eta_flag(o), &lv.eta_notes, "privatize-vector");
  const double k = resolve_k(o, eta, gamma, lv.q.N, lv.q.n);
  const MechanismConfig cfg = MechanismConfig::validated(k, eta, gamma, lv.q.N, lv.q.n);

  RngStream rng(RngSeed{o.seed, 0});
  const VectorPrivatization priv = privatize_vector(lv.q, cfg, o.samples, rng);

  ordered_json report;
  report["mode"] = "vector";
  report["categories"] = lv.categories.labels;
  report["private_vector"] = priv.private_vector;
  report["budget"] = budget_json(priv.budget);
  report["accuracy"] = accuracy_json(analyze_vector(lv.q, cfg.k));
  report["mechanism"] = mechanism_json(cfg, o.samples);
  report["diagnostics"]["boundary_nudges"] = priv.diagnostics.boundary_nudges;
  report["diagnostics"]["count_warnings"] = lv.q.warnings;
  report["diagnostics"]["eta_notes"] = lv.eta_notes;
  if (o.include_sensitive) {
    report["sensitive"]["counts"] = sensitive_counts(lv.q);
    report["sensitive"]["probs"] = lv.q.probs;
  }
  report["provenance"] = provenance_json(o, "privatize-vector", true);
  emit_report(o, std::move(report));
}

// ---------------------------------------------------------------------------
// privatize-chain

void run_privatize_chain(const Options& o) {
  require_k_xor_epsilon(o, "privatize-chain");
  if (sniff_input(o.input) != InputKind::kChain) {
    throw ValidationError("privatize-chain: input is a vector CSV; use privatize-vector");
  }
  LoadedChain lc = load_chain(o);
  const std::vector<MechanismConfig> cfgs =
      chain_configs(lc.tc, o, "privatize-chain", &lc.eta_notes);
  const ZSign sign = z_sign_of(o);

  RngStream rng(RngSeed{o.seed, 0});
  const ChainPrivatization priv = privatize_chain(lc.tc, cfgs, o.samples, rng, sign);

  // Reference quantities from the raw chain: the perturbation bounds and the
  // observed drift of this draw.
  const Matrix P = rows_matrix(lc.tc);
  const TransitionModel raw = build_transition_model(P, lc.tc.state_labels.labels, sign);
  std::vector<std::int64_t> Ns(lc.tc.rows.size());
  std::vector<double> ks(lc.tc.rows.size());
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    Ns[i] = cfgs[i].N;
    ks[i] = cfgs[i].k;
  }
  const PerturbationBounds bounds = perturbation_bounds(P, raw.pi, Ns, ks, sign);
  double tv_observed = 0.0;
  for (std::size_t i = 0; i < raw.pi.size(); ++i) {
    tv_observed += std::abs(raw.pi[i] - priv.model.pi[i]);
  }
  tv_observed *= 0.5;

  ordered_json report;
  report["mode"] = "chain";
  report["states"] = priv.model.state_labels;
  report["private_matrix"] = priv.model.P;
  report["private_stationary"] = priv.model.pi;
  report["private_tau_inf"] = priv.model.tau_inf;
  report["private_z"]["sign"] = o.z_sign;
  report["private_z"]["norm1"] = priv.model.z_norm1;
  report["private_z"]["condition"] = priv.model.z_condition;
  report["budget"] = budget_json(priv.budget);
  ordered_json row_budgets = ordered_json::array();
  for (std::size_t i = 0; i < priv.row_budgets.size(); ++i) {
    ordered_json rb = budget_json(priv.row_budgets[i]);
    rb["state"] = priv.model.state_labels[i];
    row_budgets.push_back(std::move(rb));
  }
  report["row_budgets"] = std::move(row_budgets);
  ordered_json mech_rows = ordered_json::array();
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    ordered_json m = mechanism_json(cfgs[i], o.samples);
    m["state"] = priv.model.state_labels[i];
    mech_rows.push_back(std::move(m));
  }
  report["mechanism"]["rows"] = std::move(mech_rows);
  report["mechanism"]["samples"] = o.samples;
  report["perturbation"]["expected_chain_kl_bound"] = bounds.L;
  report["perturbation"]["tv_bound"] = bounds.tv_bound;
  report["perturbation"]["tau_bound"] = bounds.tau_bound;
  report["observed"]["tv"] = tv_observed;
  report["observed"]["tau_abs"] = std::abs(raw.tau_inf - priv.model.tau_inf);
  report["diagnostics"]["boundary_nudges"] = priv.diagnostics.boundary_nudges;
  report["diagnostics"]["eta_notes"] = lc.eta_notes;
  if (o.include_sensitive) {
    ordered_json counts = ordered_json::array();
    ordered_json probs = ordered_json::array();
    for (const auto& row : lc.tc.rows) {
      counts.push_back(sensitive_counts(row));
      probs.push_back(row.probs);
    }
    report["sensitive"]["counts"] = std::move(counts);
    report["sensitive"]["probs"] = std::move(probs);
    report["sensitive"]["stationary"] = raw.pi;
    report["sensitive"]["tau_inf"] = raw.tau_inf;
  }
  report["provenance"] = provenance_json(o, "privatize-chain", true);
  report["provenance"]["z_sign"] = o.z_sign;
  emit_report(o, std::move(report));
}

// ---------------------------------------------------------------------------
// calibrate

void run_calibrate(const Options& o) {
  if (!o.epsilon) throw ValidationError("calibrate: --epsilon is required");
  if (o.k) throw ValidationError("calibrate: --k conflicts with calibration");
  const double gamma = require_gamma(o, "calibrate");

  double eta = 0.0;
  std::int64_t N = 0;
  int n = 0;
  std::vector<std::string> eta_notes;
  if (!o.input.empty()) {
    if (sniff_input(o.input) != InputKind::kVector) {
      throw ValidationError("calibrate: --input must be a vector CSV");
    }
    LoadedVector lv = load_vector(o);
    eta = require_eta(lv.q, vector_eta_flag(o), &eta_notes, "calibrate");
    N = lv.q.N;
    n = lv.q.n;
  } else {
    if (!o.record_count || !o.category_count) {
      throw ValidationError("calibrate: need --input or both --N and --n");
    }
    if (o.eta.size() != 1) throw ValidationError("calibrate: --eta is required without --input");
    eta = o.eta.front();
    N = *o.record_count;
    n = *o.category_count;
  }

  const double k = calibrate_k(*o.epsilon, eta, gamma, N, n);
  const MechanismConfig cfg = MechanismConfig::validated(k, eta, gamma, N, n);
  ordered_json report;
  report["k"] = k;
  report["epsilon_target"] = *o.epsilon;
  report["epsilon_achieved"] = epsilon_bound(cfg);
  report["min_k"] = min_k(eta);
  report["min_epsilon"] = min_epsilon(eta, gamma, N, n);
  report["config"]["eta"] = eta;
  report["config"]["gamma"] = gamma;
  report["config"]["N"] = N;
  report["config"]["n"] = n;
  report["eta_notes"] = eta_notes;
  report["provenance"] = provenance_json(o, "calibrate", false);
  emit_report(o, std::move(report));
}

// ---------------------------------------------------------------------------
// delta

void run_delta(const Options& o) {
  require_k_xor_epsilon(o, "delta");
  const double gamma = require_gamma(o, "delta");

  double eta = 0.0;
  std::int64_t N = 0;
  int n = 0;
  std::vector<std::string> eta_notes;
  if (!o.input.empty()) {
    if (sniff_input(o.input) != InputKind::kVector) {
      throw ValidationError("delta: --input must be a vector CSV");
    }
    LoadedVector lv = load_vector(o);
    eta = require_eta(lv.q, vector_eta_flag(o), &eta_notes, "delta");
    N = lv.q.N;
    n = lv.q.n;
  } else {
    if (!o.record_count || !o.category_count) {
      throw ValidationError("delta: need --input or both --N and --n");
    }
    if (o.eta.size() != 1) throw ValidationError("delta: --eta is required without --input");
    eta = o.eta.front();
    N = *o.record_count;
    n = *o.category_count;
  }

  const double k = resolve_k(o, eta, gamma, N, n);
  const MechanismConfig cfg = MechanismConfig::validated(k, eta, gamma, N, n);
  const std::vector<CountVector> points = delta_extreme_points(cfg);
  RngStream rng(RngSeed{o.seed, 0});
  const PrivacyBudget budget = delta_bound(cfg, o.samples, rng);

  ordered_json report;
  report["budget"] = budget_json(budget);
  const double border = points.front().eta;
  report["extreme_points"]["count"] = points.size();
  report["extreme_points"]["border_count"] =
      static_cast<std::int64_t>(std::llround(border * static_cast<double>(N)));
  report["extreme_points"]["peak_count"] = static_cast<std::int64_t>(
      std::llround((1.0 - (n - 1) * border) * static_cast<double>(N)));
  report["mechanism"] = mechanism_json(cfg, o.samples);
  report["eta_notes"] = eta_notes;
  report["provenance"] = provenance_json(o, "delta", true);
  emit_report(o, std::move(report));
}

// ---------------------------------------------------------------------------
// analyze

void run_analyze(const Options& o) {
  require_k_xor_epsilon(o, "analyze");
  if (sniff_input(o.input) == InputKind::kVector) {
    const double gamma = o.gamma.value_or(0.0);
    if (o.epsilon && !o.gamma) {
      throw ValidationError("analyze: --epsilon calibration needs --gamma");
    }
    LoadedVector lv = load_vector(o);
    std::vector<std::string> eta_notes;
    const double eta = require_eta(lv.q, vector_eta_flag(o), &eta_notes, "analyze");
    const double k = o.k ? *o.k : calibrate_k(*o.epsilon, eta, gamma, lv.q.N, lv.q.n);

    ordered_json report;
    report["mode"] = "vector";
    report["categories"] = lv.categories.labels;
    report["accuracy"] = accuracy_json(analyze_vector(lv.q, k));
    report["k"] = k;
    report["eta"] = eta;
    report["N"] = lv.q.N;
    report["n"] = lv.q.n;
    report["min_k"] = min_k(eta);
    report["eta_notes"] = eta_notes;
    if (o.include_sensitive) {
      report["sensitive"]["counts"] = sensitive_counts(lv.q);
      report["sensitive"]["probs"] = lv.q.probs;
    }
    report["provenance"] = provenance_json(o, "analyze", false);
    emit_report(o, std::move(report));
    return;
  }

  if (o.epsilon && !o.gamma) {
    throw ValidationError("analyze: --epsilon calibration needs --gamma");
  }
  LoadedChain lc = load_chain(o);
  const ChainDiagnostics diag = validate_chain_structure(lc.tc);
  if (!diag.pass()) {
    std::string msg = "analyze: structural validation failed;";
    for (const auto& note : diag.notes) msg += " " + note + ";";
    throw StructureError(msg);
  }
  const std::size_t n = lc.tc.state_labels.size();
  const ZSign sign = z_sign_of(o);
  std::vector<double> ks(n);
  std::vector<std::int64_t> Ns(n);
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const CountVector& row = lc.tc.rows[i];
    const double eta = require_eta(row, row_eta_flag(o, i, n), &lc.eta_notes,
                                   "analyze row '" + lc.tc.state_labels.labels[i] + "'");
    const double k =
        o.k ? *o.k : calibrate_k(*o.epsilon, eta, o.gamma.value_or(0.0), row.N, row.n);
    ks[i] = k;
    Ns[i] = row.N;
    ordered_json r;
    r["state"] = lc.tc.state_labels.labels[i];
    r["k"] = k;
    r["eta"] = eta;
    r["N"] = row.N;
    r["expected_kl_exact"] = expected_kl_exact(row, k);
    r["expected_kl_bound"] = expected_kl_bound(row.N, row.n, k);
    rows.push_back(std::move(r));
  }
  const Matrix P = rows_matrix(lc.tc);
  const TransitionModel raw = build_transition_model(P, lc.tc.state_labels.labels, sign);
  const PerturbationBounds bounds = perturbation_bounds(P, raw.pi, Ns, ks, sign);

  ordered_json report;
  report["mode"] = "chain";
  report["states"] = lc.tc.state_labels.labels;
  report["rows"] = std::move(rows);
  report["chain"]["expected_kl_exact"] = markov_expected_kl(lc.tc, raw.pi, ks);
  report["chain"]["expected_kl_bound"] = bounds.L;
  report["chain"]["tv_bound"] = bounds.tv_bound;
  report["chain"]["tau_bound"] = bounds.tau_bound;
  report["chain"]["z_sign"] = o.z_sign;
  report["chain"]["z_norm1"] = raw.z_norm1;
  report["eta_notes"] = lc.eta_notes;
  if (o.include_sensitive) {
    ordered_json probs = ordered_json::array();
    for (const auto& row : lc.tc.rows) probs.push_back(row.probs);
    report["sensitive"]["probs"] = std::move(probs);
    report["sensitive"]["stationary"] = raw.pi;
    report["sensitive"]["tau_inf"] = raw.tau_inf;
  }
  report["provenance"] = provenance_json(o, "analyze", false);
  emit_report(o, std::move(report));
}

// ---------------------------------------------------------------------------
// merge

void run_merge(const Options& o) {
  if (o.merge_map.empty()) throw ValidationError("merge: --merge-map is required");
  if (o.pseudo_count) {
    throw ValidationError("merge: --pseudo-count applies to counts, not event logs");
  }
  const InputKind kind = sniff_input(o.input);
  EventLog log = kind == InputKind::kVector ? read_vector_csv(o.input) : read_chain_csv(o.input);
  log = merge_partitions(log, read_merge_csv(o.merge_map));

  std::string out;
  if (kind == InputKind::kVector) {
    out = "category\n";
    for (const auto& partition : log.partitions) {
      for (const auto& label : partition) out += label + "\n";
    }
  } else {
    out = "from_state,to_state\n";
    for (std::size_t p = 0; p < log.partitions.size(); ++p) {
      for (const auto& label : log.partitions[p]) {
        out += log.partition_ids[p] + "," + label + "\n";
      }
    }
  }
  write_text(o.output, out);
}

// ---------------------------------------------------------------------------
// sweep

void sweep_vector(const Options& o) {
  const double gamma = require_gamma(o, "sweep");
  LoadedVector lv = load_vector(o);
  const double eta = require_eta(lv.q, vector_eta_flag(o), &lv.eta_notes, "sweep");
  if (lv.q.min_entry() < eta - 1e-12) {
    throw AdmissionError("sweep: minimum entry " + fmt17(lv.q.min_entry()) +
                         " is below eta = " + fmt17(eta));
  }

  std::vector<double> ks;
  if (!o.k_grid.empty()) {
    ks = parse_grid(o.k_grid, "--k-grid");
  } else {
    for (double target : parse_grid(o.epsilon_grid, "--epsilon-grid")) {
      ks.push_back(calibrate_k(target, eta, gamma, lv.q.N, lv.q.n));
    }
  }

  const RngStream root(RngSeed{o.seed, 0});
  std::string csv = "k,epsilon,delta_hat,delta_stderr,kl_mc_mean,kl_exact,kl_bound\n";
  for (std::size_t g = 0; g < ks.size(); ++g) {
    const MechanismConfig cfg =
        MechanismConfig::validated(ks[g], eta, gamma, lv.q.N, lv.q.n);
    const RngStream grid_stream = root.substream(g);
    RngStream delta_stream = grid_stream.substream(0);
    const PrivacyBudget budget = delta_bound(cfg, o.samples, delta_stream);

    const DirichletParams params = DirichletParams::create(lv.q, cfg.k);
    double kl_sum = 0.0;
    for (std::int64_t r = 0; r < o.reps; ++r) {
      RngStream rep_stream = grid_stream.substream(static_cast<std::uint64_t>(1 + r));
      const std::vector<double> draw = sample(params, rep_stream);
      double kl = 0.0;
      for (std::size_t i = 0; i < draw.size(); ++i) {
        if (lv.q.probs[i] > 0.0) kl += lv.q.probs[i] * std::log(lv.q.probs[i] / draw[i]);
      }
      kl_sum += kl;
    }

    csv += fmt17(cfg.k) + "," + fmt17(budget.epsilon) + "," + fmt17(budget.delta) + "," +
           fmt17(budget.mc_std_error.value_or(0.0)) + "," +
           fmt17(kl_sum / static_cast<double>(o.reps)) + "," +
           fmt17(expected_kl_exact(lv.q, cfg.k)) + "," +
           fmt17(expected_kl_bound(lv.q.N, lv.q.n, cfg.k)) + "\n";
  }
  write_text(o.output, csv);
}

void sweep_chain(const Options& o) {
  const double gamma = require_gamma(o, "sweep");
  LoadedChain lc = load_chain(o);
  const ChainDiagnostics diag = validate_chain_structure(lc.tc);
  if (!diag.pass()) {
    std::string msg = "sweep: structural validation failed;";
    for (const auto& note : diag.notes) msg += " " + note + ";";
    throw StructureError(msg);
  }
  const std::size_t n = lc.tc.state_labels.size();
  std::vector<double> etas(n);
  std::vector<double> min_ks(n);
  std::vector<std::int64_t> Ns(n);
  for (std::size_t i = 0; i < n; ++i) {
    etas[i] = require_eta(lc.tc.rows[i], row_eta_flag(o, i, n), &lc.eta_notes,
                          "sweep row '" + lc.tc.state_labels.labels[i] + "'");
    if (lc.tc.rows[i].min_entry() < etas[i] - 1e-12) {
      throw AdmissionError("sweep row '" + lc.tc.state_labels.labels[i] + "': minimum entry " +
                           fmt17(lc.tc.rows[i].min_entry()) + " is below eta = " +
                           fmt17(etas[i]));
    }
    min_ks[i] = min_k(etas[i]);
    Ns[i] = lc.tc.rows[i].N;
  }

  // Grid points: per-row k as a multiple of that row's minimum concentration
  // (--scale-grid), or per-row calibration to a common epsilon target
  // (--epsilon-grid).
  std::vector<std::vector<double>> ks_grid;
  std::vector<double> scales;
  if (!o.scale_grid.empty()) {
    for (double s : parse_grid(o.scale_grid, "--scale-grid")) {
      if (s < 1.0 - 1e-12) {
        throw ValidationError("--scale-grid: scales below 1 fall under the minimum concentration");
      }
      std::vector<double> ks(n);
      for (std::size_t i = 0; i < n; ++i) ks[i] = s * min_ks[i];
      scales.push_back(s);
      ks_grid.push_back(std::move(ks));
    }
  } else {
    for (double target : parse_grid(o.epsilon_grid, "--epsilon-grid")) {
      std::vector<double> ks(n);
      for (std::size_t i = 0; i < n; ++i) {
        ks[i] = calibrate_k(target, etas[i], gamma, Ns[i], static_cast<int>(n));
      }
      scales.push_back(ks[0] / min_ks[0]);
      ks_grid.push_back(std::move(ks));
    }
  }

  const Matrix P = rows_matrix(lc.tc);
  const ZSign sign = z_sign_of(o);
  const TransitionModel raw = build_transition_model(P, lc.tc.state_labels.labels, sign);

  const RngStream root(RngSeed{o.seed, 0});
  std::string csv = "scale,epsilon,delta_hat,delta_stderr,tv_mean,tv_bound,tau_mean,tau_bound\n";
  for (std::size_t g = 0; g < ks_grid.size(); ++g) {
    const std::vector<double>& ks = ks_grid[g];
    std::vector<MechanismConfig> cfgs;
    cfgs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      cfgs.push_back(
          MechanismConfig::validated(ks[i], etas[i], gamma, Ns[i], static_cast<int>(n)));
    }
    const RngStream grid_stream = root.substream(g);

    std::vector<PrivacyBudget> row_budgets;
    row_budgets.reserve(n);
    const RngStream delta_base = grid_stream.substream(0);
    for (std::size_t i = 0; i < n; ++i) {
      RngStream ds = delta_base.substream(i);
      row_budgets.push_back(delta_bound(cfgs[i], o.samples, ds));
    }
    const PrivacyBudget budget = compose_parallel(row_budgets);
    const PerturbationBounds bounds = perturbation_bounds(P, raw.pi, Ns, ks, sign);

    std::vector<DirichletParams> params;
    params.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      params.push_back(DirichletParams::create(lc.tc.rows[i], ks[i]));
    }
    double tv_sum = 0.0;
    double tau_sum = 0.0;
    Matrix ptilde(n);
    for (std::int64_t r = 0; r < o.reps; ++r) {
      const RngStream rep_stream = grid_stream.substream(static_cast<std::uint64_t>(1 + r));
      for (std::size_t i = 0; i < n; ++i) {
        RngStream row_stream = rep_stream.substream(i);
        ptilde[i] = sample(params[i], row_stream);
      }
      const std::vector<double> pi_tilde = stationary_distribution(ptilde);
      double tv = 0.0;
      for (std::size_t i = 0; i < n; ++i) tv += std::abs(raw.pi[i] - pi_tilde[i]);
      tv_sum += 0.5 * tv;
      tau_sum += std::abs(raw.tau_inf - tau_inf(ptilde));
    }

    csv += fmt17(scales[g]) + "," + fmt17(budget.epsilon) + "," + fmt17(budget.delta) + "," +
           fmt17(budget.mc_std_error.value_or(0.0)) + "," +
           fmt17(tv_sum / static_cast<double>(o.reps)) + "," + fmt17(bounds.tv_bound) + "," +
           fmt17(tau_sum / static_cast<double>(o.reps)) + "," + fmt17(bounds.tau_bound) + "\n";
  }
  write_text(o.output, csv);
}

void run_sweep(const Options& o) {
  const int grids = (!o.k_grid.empty() ? 1 : 0) + (!o.epsilon_grid.empty() ? 1 : 0) +
                    (!o.scale_grid.empty() ? 1 : 0);
  if (grids != 1) {
    throw ValidationError("sweep: exactly one of --k-grid, --epsilon-grid, --scale-grid");
  }
  if (o.k.has_value() || o.epsilon.has_value()) {
    throw ValidationError("sweep: use the grid flags instead of --k/--epsilon");
  }
  if (o.reps < 1) throw ValidationError("sweep: --reps must be at least 1");
  if (sniff_input(o.input) == InputKind::kVector) {
    if (!o.scale_grid.empty()) {
      throw ValidationError("sweep: --scale-grid applies to chain inputs only");
    }
    sweep_vector(o);
  } else {
    if (!o.k_grid.empty()) {
      throw ValidationError("sweep: --k-grid applies to vector inputs; chains take --scale-grid");
    }
    sweep_chain(o);
  }
}

void add_common_flags(CLI::App* cmd, Options* o, bool with_input) {
  if (with_input) {
    cmd->add_option("--input", o->input, "Input CSV path")->required();
    cmd->add_option("--merge-map", o->merge_map, "Label merge map CSV");
    cmd->add_flag("--pseudo-count", o->pseudo_count, "Add one pseudocount per cell");
  }
  cmd->add_option("--output", o->output, "Output path (default stdout)");
}

void add_mechanism_flags(CLI::App* cmd, Options* o) {
  cmd->add_option("--eta", o->eta, "Border parameter (repeat for per-row values)")
      ->expected(-1);
  cmd->add_option("--gamma", o->gamma, "Release-set floor parameter");
  cmd->add_option("--k", o->k, "Dirichlet concentration");
  cmd->add_option("--epsilon", o->epsilon, "Target epsilon (calibrates k)");
}

void add_mc_flags(CLI::App* cmd, Options* o) {
  cmd->add_option("--samples", o->samples, "Monte-Carlo samples for delta")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o->seed, "Root seed for all randomness");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet-mechanism privatization of counting queries and Markov chains"};
  app.require_subcommand(1);
  Options o;

  CLI::App* count = app.add_subcommand("count", "Summarize a dataset and its admissible eta");
  add_common_flags(count, &o, true);
  count->add_option("--eta", o.eta, "Border parameter override")->expected(-1);
  count->add_flag("--include-sensitive", o.include_sensitive, "Include raw counts in the report");
  count->callback([&o] { run_count(o); });

  CLI::App* pv = app.add_subcommand("privatize-vector", "Release a private counting query");
  add_common_flags(pv, &o, true);
  add_mechanism_flags(pv, &o);
  add_mc_flags(pv, &o);
  pv->add_flag("--include-sensitive", o.include_sensitive, "Include raw counts in the report");
  pv->callback([&o] { run_privatize_vector(o); });

  CLI::App* pc = app.add_subcommand("privatize-chain", "Release a private transition matrix");
  add_common_flags(pc, &o, true);
  add_mechanism_flags(pc, &o);
  add_mc_flags(pc, &o);
  pc->add_option("--z-sign", o.z_sign, "Fundamental-matrix sign convention")
      ->check(CLI::IsMember({"paper", "classical"}));
  pc->add_flag("--include-sensitive", o.include_sensitive, "Include raw counts in the report");
  pc->callback([&o] { run_privatize_chain(o); });

  CLI::App* cal = app.add_subcommand("calibrate", "Solve for k at a target epsilon");
  add_common_flags(cal, &o, false);
  cal->add_option("--input", o.input, "Vector CSV to read N, n, eta from");
  cal->add_option("--merge-map", o.merge_map, "Label merge map CSV");
  cal->add_flag("--pseudo-count", o.pseudo_count, "Add one pseudocount per cell");
  add_mechanism_flags(cal, &o);
  cal->add_option("--N", o.record_count, "Record count (without --input)")
      ->check(CLI::PositiveNumber);
  cal->add_option("--n", o.category_count, "Category count (without --input)")
      ->check(CLI::PositiveNumber);
  cal->callback([&o] { run_calibrate(o); });

  CLI::App* del = app.add_subcommand("delta", "Estimate delta for a mechanism config");
  add_common_flags(del, &o, false);
  del->add_option("--input", o.input, "Vector CSV to read N, n, eta from");
  del->add_option("--merge-map", o.merge_map, "Label merge map CSV");
  del->add_flag("--pseudo-count", o.pseudo_count, "Add one pseudocount per cell");
  add_mechanism_flags(del, &o);
  add_mc_flags(del, &o);
  del->add_option("--N", o.record_count, "Record count (without --input)")
      ->check(CLI::PositiveNumber);
  del->add_option("--n", o.category_count, "Category count (without --input)")
      ->check(CLI::PositiveNumber);
  del->callback([&o] { run_delta(o); });

  CLI::App* an = app.add_subcommand("analyze", "Analytic accuracy report without privatizing");
  add_common_flags(an, &o, true);
  add_mechanism_flags(an, &o);
  an->add_option("--z-sign", o.z_sign, "Fundamental-matrix sign convention")
      ->check(CLI::IsMember({"paper", "classical"}));
  an->add_flag("--include-sensitive", o.include_sensitive, "Include raw counts in the report");
  an->callback([&o] { run_analyze(o); });

  CLI::App* mg = app.add_subcommand("merge", "Apply a merge map and write the merged CSV");
  add_common_flags(mg, &o, true);
  mg->callback([&o] { run_merge(o); });

  CLI::App* sw = app.add_subcommand("sweep", "Accuracy/budget summaries over a parameter grid");
  add_common_flags(sw, &o, true);
  add_mechanism_flags(sw, &o);
  add_mc_flags(sw, &o);
  sw->add_option("--reps", o.reps, "Privatizations per grid point")->check(CLI::PositiveNumber);
  sw->add_option("--k-grid", o.k_grid, "k grid start:stop:step (vector input)");
  sw->add_option("--epsilon-grid", o.epsilon_grid, "epsilon grid start:stop:step");
  sw->add_option("--scale-grid", o.scale_grid, "k_min multiples start:stop:step (chain input)");
  sw->add_option("--z-sign", o.z_sign, "Fundamental-matrix sign convention")
      ->check(CLI::IsMember({"paper", "classical"}));
  sw->callback([&o] { run_sweep(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  } catch (const ValidationError& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return 2;
  } catch (const AdmissionError& e) {
    std::cerr << "error: admission: " << e.what() << "\n";
    return 3;
  } catch (const StructureError& e) {
    std::cerr << "error: structure: " << e.what() << "\n";
    return 4;
  } catch (const CalibrationError& e) {
    std::cerr << "error: calibration: " << e.what() << "\n";
    return 5;
  } catch (const DataFormatError& e) {
    std::cerr << "error: data-format: " << e.what() << "\n";
    return 6;
  } catch (const NumericError& e) {
    std::cerr << "error: numeric: " << e.what() << "\n";
    return 7;
  } catch (const IoError& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return 8;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
