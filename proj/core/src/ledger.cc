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

#include <algorithm>
#include <cmath>
#include <map>

#include "dpate/status.h"
#include "fmt/format.h"
#include "text.h"

namespace dpate {

std::string_view CompositionName(Composition kind) {
  switch (kind) {
    case Composition::kSequential:
      return "sequential";
    case Composition::kParallel:
      return "parallel";
    case Composition::kPostProcessing:
      return "post-processing";
  }
  return "unknown";
}

absl::StatusOr<Composition> ParseComposition(std::string_view name) {
  if (name == "sequential") return Composition::kSequential;
  if (name == "parallel") return Composition::kParallel;
  if (name == "post-processing") return Composition::kPostProcessing;
  return absl::InvalidArgumentError(
      fmt::format("unknown composition kind '{}'", name));
}

double BudgetLedger::Compose(const std::vector<LedgerEntry>& entries) {
  std::map<std::string, double, std::less<>> parallel_max;
  for (const LedgerEntry& e : entries) {
    if (e.kind != Composition::kParallel) continue;
    double& m = parallel_max[e.phase];
    m = std::max(m, e.eps);
  }
  // Sum in recording order so the floating-point result is reproducible:
  // each parallel phase contributes its maximum at its first appearance.
  double total = 0.0;
  for (const LedgerEntry& e : entries) {
    if (e.kind == Composition::kSequential) {
      total += e.eps;
    } else if (e.kind == Composition::kParallel) {
      auto it = parallel_max.find(e.phase);
      if (it != parallel_max.end()) {
        total += it->second;
        parallel_max.erase(it);
      }
    }
  }
  return total;
}

absl::Status BudgetLedger::Record(std::string_view phase, double eps,
                                  Composition kind) {
  if (kind == Composition::kPostProcessing) {
    RecordPostProcessing(phase);
    return absl::OkStatus();
  }
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError(
        fmt::format("ledger entry for {} has invalid eps {:g}", phase, eps));
  }
  std::vector<LedgerEntry> next = entries_;
  next.push_back(LedgerEntry{std::string(phase), eps, kind});
  const double total = Compose(next);
  if (total > eps_total_ * (1.0 + kBudgetRelativeSlack)) {
    return absl::ResourceExhaustedError(fmt::format(
        "{}: recording {:g} for {} brings the total to {:.17g} > {:.17g}",
        errors::kBudgetExceeded, eps, phase, total, eps_total_));
  }
  entries_ = std::move(next);
  return absl::OkStatus();
}

void BudgetLedger::RecordPostProcessing(std::string_view phase) {
  entries_.push_back(
      LedgerEntry{std::string(phase), 0.0, Composition::kPostProcessing});
}

double BudgetLedger::Total() const { return Compose(entries_); }

int BudgetLedger::BudgetBearingPhases() const {
  std::vector<std::string_view> phases;
  for (const LedgerEntry& e : entries_) {
    if (e.kind == Composition::kPostProcessing || e.eps == 0.0) continue;
    if (std::find(phases.begin(), phases.end(), e.phase) == phases.end()) {
      phases.push_back(e.phase);
    }
  }
  return static_cast<int>(phases.size());
}

int BudgetLedger::CountEntries(Composition kind) const {
  return static_cast<int>(
      std::count_if(entries_.begin(), entries_.end(),
                    [kind](const LedgerEntry& e) { return e.kind == kind; }));
}

bool BudgetLedger::Balanced() const {
  return std::fabs(Total() - eps_total_) <=
         kBudgetRelativeSlack * std::max(1.0, std::fabs(eps_total_));
}

std::string BudgetLedger::AuditLog() const {
  std::string out;
  for (const LedgerEntry& e : entries_) {
    fmt::format_to(std::back_inserter(out), "{},{},{:.17g}\n", e.phase,
                   CompositionName(e.kind), e.eps);
  }
  return out;
}

absl::StatusOr<std::vector<LedgerEntry>> ParseAuditLog(std::string_view text) {
  std::vector<LedgerEntry> entries;
  int line_no = 0;
  for (std::string_view line : text::Split(text, '\n', true)) {
    ++line_no;
    std::vector<std::string_view> fields = text::Split(line, ',');
    if (fields.size() != 3) {
      return DataError(
          errors::kParseError,
          fmt::format("audit line {}: expected 3 fields", line_no));
    }
    absl::StatusOr<Composition> kind = ParseComposition(fields[1]);
    if (!kind.ok()) return kind.status();
    double eps = 0.0;
    if (!text::ParseDouble(fields[2], &eps)) {
      return DataError(
          errors::kParseError,
          fmt::format("audit line {}: bad eps '{}'", line_no, fields[2]));
    }
    entries.push_back(LedgerEntry{std::string(fields[0]), eps, *kind});
  }
  return entries;
}

}  // namespace dpate
