// Copyright 2026 The dpate Authors
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

#ifndef DPATE_HARNESS_H_
#define DPATE_HARNESS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dpate/dataset.h"
#include "dpate/estimation.h"
#include "dpate/pipeline.h"

namespace dpate {

// |tau_hat - tau| / |tau|. Errors: ZeroTrueEffect.
absl::StatusOr<double> RelativeError(double tau_hat, double tau_oracle);

struct LimitSetting {
  LimitMode mode = LimitMode::kAdaptive;
  int fixed_k = 1;
  friend bool operator==(const LimitSetting&, const LimitSetting&) = default;
};

std::string LimitSettingName(const LimitSetting& limit);
absl::StatusOr<LimitSetting> ParseLimitSetting(std::string_view name);

// Grid of experiment cells; every cell is repeated `trials` times with
// seeds seed_base + trial.
struct SweepSpec {
  std::vector<double> eps_grid = {0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4};
  int trials = 10;
  std::vector<PrivacyLevel> levels = {PrivacyLevel::kLabelLevel,
                                      PrivacyLevel::kSampleLevel};
  std::vector<LimitSetting> limit_modes = {LimitSetting{}};
  // Error coefficients to sweep; empty means the per-level default.
  std::vector<double> coeff_grid;
  // Phase ratios for sample-level cells; empty means 0.1:0.7:0.2.
  std::vector<SplitRatios> alloc_grid;
  int neighbors = 5;
  double lambda = 1.0;
  std::uint64_t seed_base = 0;
  // Worker threads; output order does not depend on it.
  int threads = 1;
  // Record wall-clock seconds per trial. Off by default so that output
  // files are reproducible byte-for-byte.
  bool record_time = false;
};

// key=value lines: eps, trials, levels, limits, coeffs, allocs, neighbors,
// lambda, seed, threads, timing. Lists are comma-separated; allocs are
// r1:r2:r3 triples. '#' starts a comment.
absl::StatusOr<SweepSpec> ParseSweepSpec(std::string_view text);

struct SweepCell {
  int id = 0;
  RunConfig config;
  LimitSetting limit;
};

std::vector<SweepCell> ExpandCells(const SweepSpec& spec);

struct TrialRecord {
  int cell_id = 0;
  PrivacyLevel level = PrivacyLevel::kLabelLevel;
  double eps = 0.0;
  std::string limit_mode;
  int trial = 0;
  double tau_hat = 0.0;
  double tau_oracle = 0.0;
  double relative_error = 0.0;
  double seconds = 0.0;
  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct CellSummary {
  int cell_id = 0;
  PrivacyLevel level = PrivacyLevel::kLabelLevel;
  double eps = 0.0;
  std::string limit_mode;
  double coeff = 0.0;
  SplitRatios ratios;
  int trials = 0;
  double mean_re = 0.0;
  // Sample standard deviation (n - 1); 0 for a single trial.
  double std_re = 0.0;
  double mean_tau_hat = 0.0;
};

struct SweepResult {
  double tau_oracle = 0.0;
  std::vector<TrialRecord> records;
  std::vector<CellSummary> summary;
};

// Runs every (cell, trial) against one dataset. The non-private oracle is
// computed once and used as the relative-error denominator.
absl::StatusOr<SweepResult> RunSweep(const Dataset& dataset,
                                     const SweepSpec& spec);

// Same run with a precomputed oracle value.
absl::StatusOr<SweepResult> RunSweep(const Dataset& dataset,
                                     const SweepSpec& spec, double tau_oracle);

// Mean and sample standard deviation per cell, in cell order.
std::vector<CellSummary> Summarize(const std::vector<SweepCell>& cells,
                                   const std::vector<TrialRecord>& records);

// cell_id,level,eps,limit_mode,trial,tau_hat,tau_oracle,re,seconds
std::string ResultsToCsv(const std::vector<TrialRecord>& records);
absl::StatusOr<std::vector<TrialRecord>> ParseResultsCsv(std::string_view text);

std::string SummaryToCsv(const std::vector<CellSummary>& summary);

}  // namespace dpate

#endif  // DPATE_HARNESS_H_
