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

#include "dpate/dataset.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dpate/status.h"
#include "fmt/format.h"

namespace dpate {

std::string_view PrivacyLevelName(PrivacyLevel level) {
  return level == PrivacyLevel::kLabelLevel ? "label" : "sample";
}

absl::StatusOr<PrivacyLevel> ParsePrivacyLevel(std::string_view name) {
  if (name == "label" || name == "label-level") {
    return PrivacyLevel::kLabelLevel;
  }
  if (name == "sample" || name == "sample-level") {
    return PrivacyLevel::kSampleLevel;
  }
  return absl::InvalidArgumentError(
      fmt::format("unknown privacy level '{}' (expected label|sample)", name));
}

GroupCounts CountGroups(std::span<const std::uint8_t> treatment,
                        bool perturbed) {
  GroupCounts counts;
  counts.perturbed = perturbed;
  for (std::uint8_t t : treatment) {
    if (t != 0) {
      ++counts.treated;
    } else {
      ++counts.control;
    }
  }
  return counts;
}

absl::StatusOr<Dataset> Validate(RawDataset raw, double outcome_range) {
  const std::size_t n = raw.outcomes.size();
  if (n == 0) {
    return DataError(errors::kEmptyDataset, "dataset has no rows");
  }
  if (n < 2) {
    return DataError(errors::kEmptyDataset,
                     "at least two samples are required");
  }
  if (raw.dimension == 0) {
    return DataError(errors::kDimensionMismatch,
                     "covariate dimension must be at least 1");
  }
  if (raw.treatment.size() != n || raw.covariates.size() != n * raw.dimension) {
    return DataError(
        errors::kDimensionMismatch,
        fmt::format("column lengths disagree: {} outcomes, {} treatments, "
                    "{} covariate cells for d={}",
                    n, raw.treatment.size(), raw.covariates.size(),
                    raw.dimension));
  }
  if (!(outcome_range > 0.0) || !std::isfinite(outcome_range)) {
    return DataError(errors::kOutcomeRangeExceeded,
                     fmt::format("outcome range B must be a positive "
                                 "finite number, got {:g}",
                                 outcome_range));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (raw.treatment[i] > 1) {
      return DataError(errors::kParseError,
                       fmt::format("row {}: treatment must be 0 or 1", i));
    }
    for (std::size_t j = 0; j < raw.dimension; ++j) {
      const double x = raw.covariates[i * raw.dimension + j];
      if (!(x >= 0.0 && x <= 1.0)) {
        return DataError(
            errors::kCovariateOutOfRange,
            fmt::format("row {} column {} value {:g} outside [0,1]", i, j, x));
      }
    }
    if (!std::isfinite(raw.outcomes[i])) {
      return DataError(errors::kOutcomeRangeExceeded,
                       fmt::format("row {}: outcome is not finite", i));
    }
  }
  const auto [lo, hi] =
      std::minmax_element(raw.outcomes.begin(), raw.outcomes.end());
  if (*hi - *lo > outcome_range) {
    return DataError(
        errors::kOutcomeRangeExceeded,
        fmt::format("outcome span {:g} exceeds public range B={:g}", *hi - *lo,
                    outcome_range));
  }
  const GroupCounts counts = CountGroups(raw.treatment);
  if (counts.treated == 0 || counts.control == 0) {
    return DataError(
        errors::kDegenerateGroups,
        fmt::format("need both arms present, got {} treated / {} control",
                    counts.treated, counts.control));
  }

  Dataset dataset;
  dataset.treatment_ = std::move(raw.treatment);
  dataset.covariates_ = std::move(raw.covariates);
  dataset.outcomes_ = std::move(raw.outcomes);
  dataset.dimension_ = raw.dimension;
  dataset.outcome_range_ = outcome_range;
  dataset.counts_ = counts;
  return dataset;
}

absl::StatusOr<Dataset> Validate(const Dataset& dataset, double outcome_range) {
  return Validate(ToRaw(dataset), outcome_range);
}

RawDataset ToRaw(const Dataset& dataset) {
  RawDataset raw;
  raw.treatment.assign(dataset.treatment().begin(), dataset.treatment().end());
  raw.covariates.assign(dataset.covariates().begin(),
                        dataset.covariates().end());
  raw.outcomes.assign(dataset.outcomes().begin(), dataset.outcomes().end());
  raw.dimension = dataset.dimension();
  return raw;
}

}  // namespace dpate
