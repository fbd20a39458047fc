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

#ifndef DPATE_DATASET_H_
#define DPATE_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace dpate {

// Which attributes of a record are protected.
//
// kLabelLevel: neighbouring datasets differ in one observed outcome only;
//   covariates and treatment are public.
// kSampleLevel: neighbouring datasets differ by one whole record.
enum class PrivacyLevel { kLabelLevel, kSampleLevel };

std::string_view PrivacyLevelName(PrivacyLevel level);
absl::StatusOr<PrivacyLevel> ParsePrivacyLevel(std::string_view name);

struct GroupCounts {
  std::size_t treated = 0;
  std::size_t control = 0;
  // Set when the counts were taken from randomized treatment bits.
  bool perturbed = false;

  std::size_t total() const { return treated + control; }
  friend bool operator==(const GroupCounts&, const GroupCounts&) = default;
};

GroupCounts CountGroups(std::span<const std::uint8_t> treatment,
                        bool perturbed = false);

// Unvalidated columns as they come out of a reader or generator.
struct RawDataset {
  std::vector<std::uint8_t> treatment;
  // Row-major n x d.
  std::vector<double> covariates;
  std::vector<double> outcomes;
  std::size_t dimension = 0;
};

// Observational data that satisfies the estimator's standing assumptions:
// binary treatment with both arms present, covariates in [0,1]^d and an
// outcome span no larger than the public range B.
//
// Immutable once built; safe to share across threads.
class Dataset {
 public:
  std::size_t size() const { return outcomes_.size(); }
  std::size_t dimension() const { return dimension_; }
  double outcome_range() const { return outcome_range_; }

  std::span<const std::uint8_t> treatment() const { return treatment_; }
  std::span<const double> outcomes() const { return outcomes_; }
  std::span<const double> covariates() const { return covariates_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(covariates_)
        .subspan(i * dimension_, dimension_);
  }
  const GroupCounts& counts() const { return counts_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  friend absl::StatusOr<Dataset> Validate(RawDataset raw, double outcome_range);

  Dataset() = default;

  std::vector<std::uint8_t> treatment_;
  std::vector<double> covariates_;
  std::vector<double> outcomes_;
  std::size_t dimension_ = 0;
  double outcome_range_ = 0.0;
  GroupCounts counts_;
};

// Checks the standing assumptions and attaches the public outcome range.
// Errors: EmptyDataset, DimensionMismatch, CovariateOutOfRange,
// OutcomeRangeExceeded, DegenerateGroups.
absl::StatusOr<Dataset> Validate(RawDataset raw, double outcome_range);

// Re-validation of an existing dataset under a (possibly different) range.
absl::StatusOr<Dataset> Validate(const Dataset& dataset, double outcome_range);

RawDataset ToRaw(const Dataset& dataset);

}  // namespace dpate

#endif  // DPATE_DATASET_H_
