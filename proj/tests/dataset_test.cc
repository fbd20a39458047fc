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

#include <vector>

#include "dpate/status.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpate {
namespace {

RawDataset TwoByTwo() {
  RawDataset raw;
  raw.treatment = {1, 0};
  raw.covariates = {0.1, 0.2, 0.3, 0.4};
  raw.outcomes = {0.0, 3.0};
  raw.dimension = 2;
  return raw;
}

TEST(ValidateTest, AcceptsWellFormedData) {
  absl::StatusOr<Dataset> ds = Validate(TwoByTwo(), 3.0);
  ASSERT_TRUE(ds.ok()) << ds.status();
  EXPECT_EQ(ds->size(), 2u);
  EXPECT_EQ(ds->dimension(), 2u);
  EXPECT_DOUBLE_EQ(ds->outcome_range(), 3.0);
  EXPECT_EQ(ds->counts(), (GroupCounts{1, 1, false}));
  EXPECT_DOUBLE_EQ(ds->row(1)[0], 0.3);
}

TEST(ValidateTest, GroupCountsOfImbalancedData) {
  std::vector<std::uint8_t> t(747, 0);
  for (int i = 0; i < 139; ++i) t[i * 5] = 1;
  const GroupCounts c = CountGroups(t);
  EXPECT_EQ(c.treated, 139u);
  EXPECT_EQ(c.control, 608u);
  EXPECT_EQ(c.total(), 747u);
}

TEST(ValidateTest, OutcomeSpanAboveRange) {
  RawDataset raw = TwoByTwo();
  raw.outcomes = {0.0, 5.0};
  EXPECT_TRUE(
      HasErrorKind(Validate(raw, 4.0).status(), errors::kOutcomeRangeExceeded));
  EXPECT_TRUE(Validate(raw, 5.0).ok());
}

TEST(ValidateTest, CovariateOutsideUnitInterval) {
  RawDataset raw = TwoByTwo();
  raw.covariates[3] = 1.5;
  EXPECT_TRUE(
      HasErrorKind(Validate(raw, 3.0).status(), errors::kCovariateOutOfRange));
  raw.covariates[3] = -0.01;
  EXPECT_TRUE(
      HasErrorKind(Validate(raw, 3.0).status(), errors::kCovariateOutOfRange));
}

TEST(ValidateTest, SingleArm) {
  RawDataset raw = TwoByTwo();
  raw.treatment = {1, 1};
  EXPECT_TRUE(
      HasErrorKind(Validate(raw, 3.0).status(), errors::kDegenerateGroups));
}

TEST(ValidateTest, EmptyAndTiny) {
  RawDataset raw;
  raw.dimension = 1;
  EXPECT_TRUE(HasErrorKind(Validate(raw, 1.0).status(), errors::kEmptyDataset));
  raw.treatment = {1};
  raw.covariates = {0.5};
  raw.outcomes = {1.0};
  EXPECT_TRUE(HasErrorKind(Validate(raw, 1.0).status(), errors::kEmptyDataset));
}

TEST(ValidateTest, ShapeMismatch) {
  RawDataset raw = TwoByTwo();
  raw.covariates.pop_back();
  EXPECT_TRUE(
      HasErrorKind(Validate(raw, 3.0).status(), errors::kDimensionMismatch));
}

TEST(ValidateTest, RangeMustBePositive) {
  EXPECT_FALSE(Validate(TwoByTwo(), 0.0).ok());
  EXPECT_FALSE(Validate(TwoByTwo(), -1.0).ok());
}

TEST(ValidateTest, RevalidationIsIdempotent) {
  const Dataset ds = testing::RandomDataset(3, 20, 3);
  absl::StatusOr<Dataset> again = Validate(ds, ds.outcome_range());
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*again, ds);
}

TEST(PrivacyLevelTest, NamesRoundTrip) {
  for (PrivacyLevel l :
       {PrivacyLevel::kLabelLevel, PrivacyLevel::kSampleLevel}) {
    EXPECT_EQ(*ParsePrivacyLevel(PrivacyLevelName(l)), l);
  }
  EXPECT_FALSE(ParsePrivacyLevel("node").ok());
}

}  // namespace
}  // namespace dpate
