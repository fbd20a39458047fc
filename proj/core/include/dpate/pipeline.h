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

#ifndef DPATE_PIPELINE_H_
#define DPATE_PIPELINE_H_

#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "dpate/dataset.h"
#include "dpate/estimation.h"
#include "dpate/ledger.h"
#include "dpate/propensity.h"

namespace dpate {

// Phase-level budget fractions for sample-level runs.
struct SplitRatios {
  double phase1 = 0.1;
  double phase2 = 0.7;
  double phase3 = 0.2;
};

struct RunConfig {
  PrivacyLevel level = PrivacyLevel::kLabelLevel;
  double eps_total = 1.0;
  SplitRatios ratios;
  // Share of the phase-1 budget spent on the model weights; the rest goes
  // to the per-sample scores.
  double phase1_weight_share = 0.5;
  MatchConfig match;
  TrainOptions train;
  std::uint64_t seed = 0;
  // Disables every noise source. The result is tainted and not private.
  bool oracle_mode = false;
};

// Config with the default error coefficient for `level`.
RunConfig DefaultConfig(PrivacyLevel level, double eps);

// Label-level: everything on the outcome sums. Sample-level:
// eps_11 = share * r1 * eps, eps_12 = (1 - share) * r1 * eps,
// eps_2 = r2 * eps, eps_3 = r3 * eps. Errors: InvalidRatios.
absl::StatusOr<BudgetSplit> SplitBudget(const RunConfig& config);

struct RunOutput {
  AteResult result;
  BudgetLedger ledger{0.0};
  GroupCounts counts;
  LogisticModel model;
};

// Runs propensity training, matching and estimation end to end.
// Errors: propagated phase errors; LedgerViolation (internal) when the
// final accounting does not add up to eps_total.
absl::StatusOr<RunOutput> Run(const Dataset& dataset, const RunConfig& config);

// Non-private reference estimate: exact scores, uncapped nearest-N
// matching by direct search, exact sums. Errors: DegenerateGroups.
absl::StatusOr<double> RunOraclePsm(const Dataset& dataset, int neighbors,
                                    const TrainOptions& train = {});

// {tau_hat, eps, level, k1, k2, k_star, M, M1, seed, flags}
std::string AteResultJson(const AteResult& result);

// Config, ledger and result in one JSON document.
std::string ProvenanceJson(const RunConfig& config, const RunOutput& output);

std::string LimitModeName(const MatchConfig& match);

}  // namespace dpate

#endif  // DPATE_PIPELINE_H_
