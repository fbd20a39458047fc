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

#ifndef DPATE_MATCHING_H_
#define DPATE_MATCHING_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpate/dataset.h"
#include "dpate/ledger.h"
#include "dpate/noise.h"
#include "dpate/propensity.h"

namespace dpate {

using SampleIndex = std::uint32_t;

// Treatment bits as seen by the matching and estimation phases. Under
// sample-level privacy these are randomized-response outputs and every
// downstream group split uses them.
struct TreatmentView {
  std::vector<std::uint8_t> bits;
  bool perturbed = false;
  GroupCounts counts;
};

// Label-level: T' = T at no cost. Sample-level: each bit goes through
// randomized response with eps and one parallel phase-2 entry is recorded.
// Errors: NonPositiveBudget.
absl::StatusOr<TreatmentView> PerturbTreatment(const Dataset& dataset,
                                               PrivacyLevel level, double eps,
                                               NoiseSource& rng,
                                               BudgetLedger* ledger);

inline double Distance(double a, double b) { return a < b ? b - a : a - b; }

// Ascending-distance candidate lists into the opposite group.
//
// Row r of `control_rows` belongs to control sample control_ids[r] and lists
// every treated sample index ordered by (distance, index). `treated_rows`
// is the mirror image. Rows are stored densely, one after the other.
class SortedMatrices {
 public:
  SortedMatrices() = default;
  // `control_rows` and `treated_rows` each hold treated x control entries.
  SortedMatrices(std::vector<SampleIndex> treated_ids,
                 std::vector<SampleIndex> control_ids,
                 std::unique_ptr<SampleIndex[]> control_rows,
                 std::unique_ptr<SampleIndex[]> treated_rows);

  std::span<const SampleIndex> treated_ids() const { return treated_ids_; }
  std::span<const SampleIndex> control_ids() const { return control_ids_; }

  // Candidates (treated samples) for the r-th control sample.
  std::span<const SampleIndex> control_row(std::size_t r) const {
    return std::span<const SampleIndex>(
        control_rows_.get() + r * treated_ids_.size(), treated_ids_.size());
  }
  // Candidates (control samples) for the r-th treated sample.
  std::span<const SampleIndex> treated_row(std::size_t r) const {
    return std::span<const SampleIndex>(
        treated_rows_.get() + r * control_ids_.size(), control_ids_.size());
  }

  // Candidate row for an arbitrary sample given its group position.
  std::span<const SampleIndex> RowFor(std::uint8_t group,
                                      std::size_t position) const {
    return group != 0 ? treated_row(position) : control_row(position);
  }

 private:
  std::vector<SampleIndex> treated_ids_;
  std::vector<SampleIndex> control_ids_;
  std::unique_ptr<SampleIndex[]> control_rows_;  // H0
  std::unique_ptr<SampleIndex[]> treated_rows_;  // H1
};

// Builds H0 and H1 from scores and the treatment view. Pure
// post-processing; records a zero-cost entry when a ledger is given.
// Errors: DegenerateGroups, DimensionMismatch.
absl::StatusOr<SortedMatrices> BuildSortedMatrices(
    const PropensityScores& scores, const TreatmentView& treatment,
    BudgetLedger* ledger = nullptr);

// Position of each sample inside its own group, indexed by sample.
std::vector<std::size_t> GroupPositions(std::span<const std::uint8_t> bits);

}  // namespace dpate

#endif  // DPATE_MATCHING_H_
