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

#ifndef DPATE_STATUS_H_
#define DPATE_STATUS_H_

#include <string_view>

#include "absl/status/status.h"

namespace dpate {

// Error kinds carried as the leading token of a status message, e.g.
// "CovariateOutOfRange: row 3 column 1 value 1.5". Data problems map to
// kInvalidArgument, accounting violations to kInternal.
namespace errors {

inline constexpr std::string_view kEmptyDataset = "EmptyDataset";
inline constexpr std::string_view kCovariateOutOfRange = "CovariateOutOfRange";
inline constexpr std::string_view kOutcomeRangeExceeded =
    "OutcomeRangeExceeded";
inline constexpr std::string_view kDegenerateGroups = "DegenerateGroups";
inline constexpr std::string_view kDimensionMismatch = "DimensionMismatch";
inline constexpr std::string_view kNonPositiveBudget = "NonPositiveBudget";
inline constexpr std::string_view kNonPositiveSensitivity =
    "NonPositiveSensitivity";
inline constexpr std::string_view kBudgetExceeded = "BudgetExceeded";
inline constexpr std::string_view kInvalidRatios = "InvalidRatios";
inline constexpr std::string_view kLedgerViolation = "LedgerViolation";
inline constexpr std::string_view kParseError = "ParseError";
inline constexpr std::string_view kSchemaError = "SchemaError";
inline constexpr std::string_view kZeroTrueEffect = "ZeroTrueEffect";
inline constexpr std::string_view kUnboundedSensitivity =
    "UnboundedSensitivity";

}  // namespace errors

// InvalidArgument status whose message starts with `kind`.
absl::Status DataError(std::string_view kind, std::string_view detail);

// Internal status whose message starts with `kind`.
absl::Status InternalError(std::string_view kind, std::string_view detail);

// True if `status` was produced with the given error kind.
bool HasErrorKind(const absl::Status& status, std::string_view kind);

}  // namespace dpate

#endif  // DPATE_STATUS_H_
