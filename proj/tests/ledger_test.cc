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

#include "dpate/ledger.h"

#include "dpate/status.h"
#include "gtest/gtest.h"

namespace dpate {
namespace {

TEST(LedgerTest, SequentialEntriesAdd) {
  BudgetLedger ledger(1.0);
  ASSERT_TRUE(ledger.Record("a", 0.25, Composition::kSequential).ok());
  ASSERT_TRUE(ledger.Record("b", 0.75, Composition::kSequential).ok());
  EXPECT_EQ(ledger.Total(), 1.0);
  EXPECT_TRUE(ledger.Balanced());
}

TEST(LedgerTest, ParallelEntriesTakeMaxPerPhase) {
  BudgetLedger ledger(0.5);
  for (int i = 0; i < 100; ++i) {
    ASSERT_TRUE(
        ledger.Record(phase::kScores, 0.5, Composition::kParallel).ok());
  }
  EXPECT_EQ(ledger.Total(), 0.5);
  EXPECT_EQ(ledger.BudgetBearingPhases(), 1);
}

TEST(LedgerTest, PostProcessingIsFree) {
  BudgetLedger ledger(1.0);
  ASSERT_TRUE(
      ledger.Record(phase::kOutcomes, 1.0, Composition::kSequential).ok());
  ledger.RecordPostProcessing(phase::kSorting);
  ledger.RecordPostProcessing(phase::kAte);
  EXPECT_EQ(ledger.Total(), 1.0);
  EXPECT_EQ(ledger.CountEntries(Composition::kPostProcessing), 2);
  EXPECT_EQ(ledger.BudgetBearingPhases(), 1);
}

TEST(LedgerTest, OverspendIsRejected) {
  BudgetLedger ledger(1.0);
  ASSERT_TRUE(ledger.Record("a", 0.6, Composition::kSequential).ok());
  const absl::Status s = ledger.Record("b", 0.6, Composition::kSequential);
  EXPECT_EQ(s.code(), absl::StatusCode::kResourceExhausted);
  EXPECT_TRUE(HasErrorKind(s, errors::kBudgetExceeded));
  // The rejected entry is not kept.
  EXPECT_EQ(ledger.entries().size(), 1u);
  EXPECT_FALSE(ledger.Balanced());
}

TEST(LedgerTest, InvalidEps) {
  BudgetLedger ledger(1.0);
  EXPECT_FALSE(ledger.Record("a", -0.1, Composition::kSequential).ok());
  EXPECT_FALSE(ledger.Record("a", std::nan(""), Composition::kSequential).ok());
}

TEST(LedgerTest, AuditLogRoundTrips) {
  BudgetLedger ledger(2.0);
  ASSERT_TRUE(
      ledger.Record(phase::kWeights, 0.1, Composition::kSequential).ok());
  ASSERT_TRUE(ledger.Record(phase::kScores, 0.1, Composition::kParallel).ok());
  ASSERT_TRUE(
      ledger.Record(phase::kTreatment, 1.4, Composition::kParallel).ok());
  ledger.RecordPostProcessing(phase::kSorting);
  ASSERT_TRUE(
      ledger.Record(phase::kOutcomes, 0.4, Composition::kSequential).ok());
  const std::string log = ledger.AuditLog();
  EXPECT_EQ(log.substr(0, log.find('\n')),
            "phase1a,sequential,0.10000000000000001");
  absl::StatusOr<std::vector<LedgerEntry>> parsed = ParseAuditLog(log);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(*parsed, ledger.entries());
}

TEST(LedgerTest, ParseAuditLogRejectsGarbage) {
  EXPECT_FALSE(ParseAuditLog("phase1,sequential\n").ok());
  EXPECT_FALSE(ParseAuditLog("phase1,serial,0.1\n").ok());
  EXPECT_FALSE(ParseAuditLog("phase1,sequential,abc\n").ok());
}

TEST(LedgerTest, CompositionNames) {
  for (Composition c : {Composition::kSequential, Composition::kParallel,
                        Composition::kPostProcessing}) {
    EXPECT_EQ(*ParseComposition(CompositionName(c)), c);
  }
}

TEST(LedgerTest, TaintIsSticky) {
  BudgetLedger ledger(1.0);
  EXPECT_FALSE(ledger.tainted());
  ledger.MarkTainted();
  EXPECT_TRUE(ledger.tainted());
}

}  // namespace
}  // namespace dpate
