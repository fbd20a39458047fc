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

#ifndef DPATE_LEDGER_H_
#define DPATE_LEDGER_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpate {

// Per-phase privacy budgets. Label-level runs spend everything on the
// outcome sums (eps_3 == eps_total); sample-level runs split the total
// across model weights, scores, treatment and outcome sums.
struct BudgetSplit {
  double eps_total = 0.0;
  double eps_weights = 0.0;    // eps_11
  double eps_scores = 0.0;     // eps_12
  double eps_treatment = 0.0;  // eps_2
  double eps_outcomes = 0.0;   // eps_3

  double Sum() const {
    return ((eps_weights + eps_scores) + eps_treatment) + eps_outcomes;
  }
  friend bool operator==(const BudgetSplit&, const BudgetSplit&) = default;
};

enum class Composition { kSequential, kParallel, kPostProcessing };

std::string_view CompositionName(Composition kind);
absl::StatusOr<Composition> ParseComposition(std::string_view name);

// Phase labels used by the pipeline.
namespace phase {
inline constexpr std::string_view kWeights = "phase1a";
inline constexpr std::string_view kScores = "phase1b";
inline constexpr std::string_view kTreatment = "phase2";
inline constexpr std::string_view kSorting = "phase2-sort";
inline constexpr std::string_view kMatchLimit = "phase3-limit";
inline constexpr std::string_view kOutcomes = "phase3";
inline constexpr std::string_view kAte = "phase3-ate";
}  // namespace phase

struct LedgerEntry {
  std::string phase;
  double eps = 0.0;
  Composition kind = Composition::kSequential;

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

// Relative slack allowed when comparing floating-point budget sums.
inline constexpr double kBudgetRelativeSlack = 1e-12;

// Bookkeeping for pure-DP composition.
//
// Sequential entries add up. Parallel entries sharing a phase label act on
// disjoint records, so the phase costs the largest of them. Post-processing
// entries cost nothing. Recording is single-writer.
class BudgetLedger {
 public:
  explicit BudgetLedger(double eps_total) : eps_total_(eps_total) {}

  // Errors: BudgetExceeded if the new total would exceed eps_total;
  // InvalidArgument on negative eps.
  absl::Status Record(std::string_view phase, double eps, Composition kind);
  // Records a zero-cost post-processing step.
  void RecordPostProcessing(std::string_view phase);

  double eps_total() const { return eps_total_; }
  const std::vector<LedgerEntry>& entries() const { return entries_; }

  // Composed spend over all entries.
  double Total() const;
  // Number of entries that cost budget.
  int BudgetBearingPhases() const;
  int CountEntries(Composition kind) const;

  // Set when any mechanism ran with noise disabled.
  bool tainted() const { return tainted_; }
  void MarkTainted() { tainted_ = true; }

  // True if Total() equals eps_total up to kBudgetRelativeSlack.
  bool Balanced() const;

  // One `phase,kind,eps` line per entry.
  std::string AuditLog() const;

 private:
  static double Compose(const std::vector<LedgerEntry>& entries);

  double eps_total_;
  std::vector<LedgerEntry> entries_;
  bool tainted_ = false;
};

absl::StatusOr<std::vector<LedgerEntry>> ParseAuditLog(std::string_view text);

}  // namespace dpate

#endif  // DPATE_LEDGER_H_
