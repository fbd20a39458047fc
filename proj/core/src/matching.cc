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

#include "dpate/matching.h"

#include <algorithm>
#include <limits>
#include <memory>
#include <numeric>
#include <utility>

#include "dpate/status.h"
#include "fmt/format.h"

namespace dpate {
namespace {

// Candidates of one group, pre-sorted twice so each query row can be
// produced by merging outward from the query score in linear time.
class CandidateIndex {
 public:
  CandidateIndex(std::span<const SampleIndex> ids,
                 std::span<const double> scores)
      : scores_(scores),
        ascending_(ids.begin(), ids.end()),
        descending_(ids.begin(), ids.end()) {
    std::sort(ascending_.begin(), ascending_.end(),
              [&](SampleIndex a, SampleIndex b) {
                return scores_[a] != scores_[b] ? scores_[a] < scores_[b]
                                                : a < b;
              });
    std::sort(descending_.begin(), descending_.end(),
              [&](SampleIndex a, SampleIndex b) {
                return scores_[a] != scores_[b] ? scores_[a] > scores_[b]
                                                : a < b;
              });
  }

  // Writes all candidates ordered by (|score - query|, index) into `out`.
  void Row(double query, std::span<SampleIndex> out) const {
    // Right stream: scores >= query, ascending. Left stream: scores < query,
    // descending. Both are non-decreasing in distance with index ties
    // broken upward whenever the scores coincide.
    auto right = std::lower_bound(
        ascending_.begin(), ascending_.end(), query,
        [&](SampleIndex id, double q) { return scores_[id] < q; });
    auto left = std::lower_bound(
        descending_.begin(), descending_.end(), query,
        [&](SampleIndex id, double q) { return scores_[id] >= q; });
    const auto right_end = ascending_.end();
    const auto left_end = descending_.end();

    std::size_t k = 0;
    double prev_dist = -1.0;
    bool disordered = false;
    while (right != right_end || left != left_end) {
      bool take_right;
      double dr = 0.0;
      double dl = 0.0;
      if (right != right_end) dr = scores_[*right] - query;
      if (left != left_end) dl = query - scores_[*left];
      if (left == left_end) {
        take_right = true;
      } else if (right == right_end) {
        take_right = false;
      } else {
        take_right = dr != dl ? dr < dl : *right < *left;
      }
      const SampleIndex id = take_right ? *right++ : *left++;
      const double dist = take_right ? dr : dl;
      // Each stream is ordered by distance, but distinct scores can round
      // to the same distance with their indices out of order.
      if (k > 0 && dist == prev_dist && id < out[k - 1]) disordered = true;
      prev_dist = dist;
      out[k++] = id;
    }
    if (disordered) RestoreIndexOrder(query, out);
  }

 private:
  void RestoreIndexOrder(double query, std::span<SampleIndex> out) const {
    std::size_t run_start = 0;
    double run_dist = Distance(scores_[out[0]], query);
    for (std::size_t i = 1; i <= out.size(); ++i) {
      const double dist = i < out.size()
                              ? Distance(scores_[out[i]], query)
                              : std::numeric_limits<double>::quiet_NaN();
      if (dist != run_dist) {
        if (i - run_start > 1) {
          std::sort(out.begin() + run_start, out.begin() + i);
        }
        run_start = i;
        run_dist = dist;
      }
    }
  }

  std::span<const double> scores_;
  std::vector<SampleIndex> ascending_;
  std::vector<SampleIndex> descending_;
};

}  // namespace

absl::StatusOr<TreatmentView> PerturbTreatment(const Dataset& dataset,
                                               PrivacyLevel level, double eps,
                                               NoiseSource& rng,
                                               BudgetLedger* ledger) {
  TreatmentView view;
  view.bits.assign(dataset.treatment().begin(), dataset.treatment().end());
  if (level == PrivacyLevel::kLabelLevel) {
    view.counts = dataset.counts();
    return view;
  }
  for (std::uint8_t& bit : view.bits) {
    absl::StatusOr<std::uint8_t> flipped = RandomizedResponse(bit, eps, rng);
    if (!flipped.ok()) return flipped.status();
    bit = *flipped;
  }
  if (ledger != nullptr) {
    if (rng.disabled()) ledger->MarkTainted();
    if (absl::Status s =
            ledger->Record(phase::kTreatment, eps, Composition::kParallel);
        !s.ok()) {
      return s;
    }
  }
  view.perturbed = true;
  view.counts = CountGroups(view.bits, /*perturbed=*/true);
  return view;
}

SortedMatrices::SortedMatrices(std::vector<SampleIndex> treated_ids,
                               std::vector<SampleIndex> control_ids,
                               std::unique_ptr<SampleIndex[]> control_rows,
                               std::unique_ptr<SampleIndex[]> treated_rows)
    : treated_ids_(std::move(treated_ids)),
      control_ids_(std::move(control_ids)),
      control_rows_(std::move(control_rows)),
      treated_rows_(std::move(treated_rows)) {}

std::vector<std::size_t> GroupPositions(std::span<const std::uint8_t> bits) {
  std::vector<std::size_t> positions(bits.size());
  std::size_t treated = 0;
  std::size_t control = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    positions[i] = bits[i] != 0 ? treated++ : control++;
  }
  return positions;
}

absl::StatusOr<SortedMatrices> BuildSortedMatrices(
    const PropensityScores& scores, const TreatmentView& treatment,
    BudgetLedger* ledger) {
  const std::size_t n = treatment.bits.size();
  if (scores.scores.size() != n) {
    return DataError(
        errors::kDimensionMismatch,
        fmt::format("{} scores for {} samples", scores.scores.size(), n));
  }
  if (n > std::numeric_limits<SampleIndex>::max()) {
    return absl::InvalidArgumentError("too many samples for index type");
  }
  std::vector<SampleIndex> treated_ids;
  std::vector<SampleIndex> control_ids;
  for (std::size_t i = 0; i < n; ++i) {
    (treatment.bits[i] != 0 ? treated_ids : control_ids)
        .push_back(static_cast<SampleIndex>(i));
  }
  if (treated_ids.empty() || control_ids.empty()) {
    return DataError(
        errors::kDegenerateGroups,
        fmt::format("matching needs both groups, got {} treated / {} "
                    "control",
                    treated_ids.size(), control_ids.size()));
  }

  const std::span<const double> s = scores.scores;
  const CandidateIndex treated_index(treated_ids, s);
  const CandidateIndex control_index(control_ids, s);

  // Every entry is written by Row, so the buffers skip zero-filling.
  const std::size_t pairs = treated_ids.size() * control_ids.size();
  auto control_rows = std::make_unique_for_overwrite<SampleIndex[]>(pairs);
  auto treated_rows = std::make_unique_for_overwrite<SampleIndex[]>(pairs);
  for (std::size_t r = 0; r < control_ids.size(); ++r) {
    treated_index.Row(
        s[control_ids[r]],
        std::span<SampleIndex>(control_rows.get() + r * treated_ids.size(),
                               treated_ids.size()));
  }
  for (std::size_t r = 0; r < treated_ids.size(); ++r) {
    control_index.Row(
        s[treated_ids[r]],
        std::span<SampleIndex>(treated_rows.get() + r * control_ids.size(),
                               control_ids.size()));
  }
  if (ledger != nullptr) ledger->RecordPostProcessing(phase::kSorting);
  return SortedMatrices(std::move(treated_ids), std::move(control_ids),
                        std::move(control_rows), std::move(treated_rows));
}

}  // namespace dpate
