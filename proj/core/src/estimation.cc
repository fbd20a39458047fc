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

#include "dpate/estimation.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpate/status.h"
#include "fmt/format.h"

namespace dpate {
namespace {

constexpr std::int64_t kNoCap = std::numeric_limits<std::int64_t>::max();

std::size_t Prefix(std::size_t row_length, int neighbors) {
  return std::min(row_length, static_cast<std::size_t>(neighbors));
}

}  // namespace

std::int64_t EffectiveNeighbors(int neighbors, std::size_t group_size) {
  return std::min<std::int64_t>(neighbors,
                                static_cast<std::int64_t>(group_size));
}

int RoundLimit(double x) { return static_cast<int>(std::round(x)); }

MatchCount CountMaxMatches(const SortedMatrices& matrices, int neighbors) {
  const auto treated = matrices.treated_ids();
  const auto control = matrices.control_ids();
  std::size_t n = 0;
  for (SampleIndex id : treated) n = std::max<std::size_t>(n, id + 1);
  for (SampleIndex id : control) n = std::max<std::size_t>(n, id + 1);
  std::vector<int> appearances(n, 0);

  for (std::size_t r = 0; r < control.size(); ++r) {
    const auto row = matrices.control_row(r);
    const std::size_t m = Prefix(row.size(), neighbors);
    for (std::size_t k = 0; k < m; ++k) ++appearances[row[k]];
  }
  for (std::size_t r = 0; r < treated.size(); ++r) {
    const auto row = matrices.treated_row(r);
    const std::size_t m = Prefix(row.size(), neighbors);
    for (std::size_t k = 0; k < m; ++k) ++appearances[row[k]];
  }

  MatchCount out;
  for (SampleIndex id : treated) {
    out.m_treated = std::max(out.m_treated, appearances[id]);
  }
  for (SampleIndex id : control) {
    out.m_control = std::max(out.m_control, appearances[id]);
  }
  out.m_max = std::max(out.m_treated, out.m_control);
  out.m1 = static_cast<double>(out.m_max) / neighbors;
  return out;
}

LimitValue MatchingLimitLabel(double eps, double coeff, std::size_t n1,
                              double m1) {
  LimitValue out;
  out.k_star = std::sqrt(eps * coeff * static_cast<double>(n1) * m1 / 2.0);
  // M1 = M / N can be fractional; never cap below it.
  const int m1_cap = std::max(1, static_cast<int>(std::ceil(m1)));
  out.k_f = std::min(std::max(RoundLimit(out.k_star), 1), m1_cap);
  return out;
}

LimitValue MatchingLimitSample(double eps, double coeff, std::size_t n1,
                               double m1) {
  LimitValue out;
  out.k_star = std::sqrt(eps * coeff * static_cast<double>(n1) * m1 / 2.0);
  out.k_f = std::max(RoundLimit(out.k_star), 1);
  return out;
}

absl::StatusOr<std::pair<int, int>> PairLimits(int k_f,
                                               const GroupCounts& counts) {
  if (counts.treated == 0 || counts.control == 0) {
    return DataError(errors::kDegenerateGroups,
                     "matching limits need both groups non-empty");
  }
  const double r1 =
      static_cast<double>(counts.treated) / static_cast<double>(counts.control);
  if (r1 <= 1.0) {
    return std::make_pair(k_f, std::max(1, RoundLimit(k_f * r1)));
  }
  return std::make_pair(std::max(1, RoundLimit(k_f / r1)), k_f);
}

MatchPlan UnlimitedPlan(int neighbors) {
  MatchPlan plan;
  plan.neighbors = neighbors;
  plan.unlimited = true;
  plan.mode = LimitMode::kUnlimited;
  plan.k_treated = 0;
  plan.k_control = 0;
  plan.cap_treated = kNoCap;
  plan.cap_control = kNoCap;
  return plan;
}

absl::StatusOr<MatchPlan> PlanMatching(PrivacyLevel level, double eps,
                                       const MatchConfig& config,
                                       const SortedMatrices& matrices,
                                       const GroupCounts& counts) {
  if (config.neighbors < 1) {
    return absl::InvalidArgumentError("number of neighbours must be >= 1");
  }
  if (counts.treated == 0 || counts.control == 0) {
    return DataError(errors::kDegenerateGroups,
                     "matching limits need both groups non-empty");
  }
  MatchPlan plan = config.limit_mode == LimitMode::kUnlimited
                       ? UnlimitedPlan(config.neighbors)
                       : MatchPlan{};
  plan.neighbors = config.neighbors;
  plan.mode = config.limit_mode;
  plan.r1 =
      static_cast<double>(counts.treated) / static_cast<double>(counts.control);
  plan.n1 = std::max(counts.treated, counts.control);

  const MatchCount count = CountMaxMatches(matrices, config.neighbors);
  plan.m_max = count.m_max;
  if (config.per_group_max) {
    // k_f is derived for the treated group when r1 <= 1.
    plan.m_max = plan.r1 <= 1.0 ? count.m_treated : count.m_control;
  }
  plan.m1 = static_cast<double>(plan.m_max) / config.neighbors;

  switch (config.limit_mode) {
    case LimitMode::kUnlimited:
      return plan;
    case LimitMode::kFixed:
      if (config.fixed_k < 1) {
        return absl::InvalidArgumentError("fixed matching limit must be >= 1");
      }
      plan.k_star = config.fixed_k;
      plan.k_f = config.fixed_k;
      plan.k_treated = config.fixed_k;
      plan.k_control = config.fixed_k;
      break;
    case LimitMode::kAdaptive: {
      if (!(config.error_coeff > 0.0)) {
        return absl::InvalidArgumentError("error coefficient must be > 0");
      }
      const LimitValue limit =
          level == PrivacyLevel::kLabelLevel
              ? MatchingLimitLabel(eps, config.error_coeff, plan.n1, plan.m1)
              : MatchingLimitSample(eps, config.error_coeff, plan.n1, plan.m1);
      plan.k_star = limit.k_star;
      plan.k_f = limit.k_f;
      absl::StatusOr<std::pair<int, int>> pair = PairLimits(limit.k_f, counts);
      if (!pair.ok()) return pair.status();
      plan.k_treated = pair->first;
      plan.k_control = pair->second;
      break;
    }
  }
  // A row never holds more candidates than the opposite group has, so a
  // group smaller than N is averaged with weight 1/size instead of 1/N.
  plan.cap_treated = static_cast<std::int64_t>(plan.k_treated) *
                     EffectiveNeighbors(config.neighbors, counts.treated);
  plan.cap_control = static_cast<std::int64_t>(plan.k_control) *
                     EffectiveNeighbors(config.neighbors, counts.control);
  return plan;
}

Counterfactuals CappedCounterfactuals(std::span<const double> outcomes,
                                      const SortedMatrices& matrices,
                                      const TreatmentView& treatment,
                                      const MatchPlan& plan) {
  const std::size_t n = treatment.bits.size();
  const std::vector<std::size_t> position = GroupPositions(treatment.bits);
  const std::size_t want = static_cast<std::size_t>(plan.neighbors);

  Counterfactuals out;
  out.y1.resize(n);
  out.y0.resize(n);
  out.match_counts.assign(n, 0);
  std::vector<SampleIndex> chosen;
  chosen.reserve(want);

  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t group = treatment.bits[i];
    const auto row = matrices.RowFor(group, position[i]);
    // Candidates come from the opposite group.
    const std::int64_t cap = group != 0 ? plan.cap_control : plan.cap_treated;

    chosen.clear();
    for (std::size_t k = 0; k < row.size() && chosen.size() < want; ++k) {
      if (out.match_counts[row[k]] < cap) chosen.push_back(row[k]);
    }
    if (chosen.empty()) {
      ++out.exhausted;
      for (std::size_t k = 0; k < row.size() && k < want; ++k) {
        chosen.push_back(row[k]);
      }
    } else if (chosen.size() < std::min(want, row.size())) {
      ++out.short_rows;
    }

    double sum = 0.0;
    for (SampleIndex c : chosen) {
      sum += outcomes[c];
      ++out.match_counts[c];
    }
    const double counterfactual = sum / static_cast<double>(chosen.size());
    if (group != 0) {
      out.y1[i] = outcomes[i];
      out.y0[i] = counterfactual;
    } else {
      out.y1[i] = counterfactual;
      out.y0[i] = outcomes[i];
    }
  }
  return out;
}

absl::StatusOr<AggregatedOutcomes> AggregateAndPerturb(
    std::span<const double> y1, std::span<const double> y0,
    double outcome_range, const MatchPlan& plan, double eps, NoiseSource& rng,
    BudgetLedger& ledger) {
  AggregatedOutcomes agg;
  for (double v : y1) agg.s1 += v;
  for (double v : y0) agg.s0 += v;

  if (rng.disabled()) {
    agg.s1_hat = agg.s1;
    agg.s0_hat = agg.s0;
    if (!plan.unlimited) {
      agg.sens1 = (plan.k_treated + 1) * outcome_range;
      agg.sens0 = (plan.k_control + 1) * outcome_range;
    }
    ledger.MarkTainted();
  } else {
    if (plan.unlimited) {
      return DataError(errors::kUnboundedSensitivity,
                       "uncapped matching cannot be released with noise");
    }
    agg.sens1 = (plan.k_treated + 1) * outcome_range;
    agg.sens0 = (plan.k_control + 1) * outcome_range;
    absl::StatusOr<LaplaceOutput> s1 =
        LaplacePerturb(agg.s1, agg.sens1, eps, rng);
    if (!s1.ok()) return s1.status();
    absl::StatusOr<LaplaceOutput> s0 =
        LaplacePerturb(agg.s0, agg.sens0, eps, rng);
    if (!s0.ok()) return s0.status();
    agg.s1_hat = s1->value;
    agg.s0_hat = s0->value;
    agg.scale1 = s1->scale;
    agg.scale0 = s0->scale;
  }
  if (absl::Status s =
          ledger.Record(phase::kOutcomes, eps, Composition::kSequential);
      !s.ok()) {
    return s;
  }
  return agg;
}

AteResult AteFromSums(const AggregatedOutcomes& agg, std::size_t n) {
  AteResult result;
  result.n = n;
  result.s1_hat = agg.s1_hat;
  result.s0_hat = agg.s0_hat;
  result.tau_hat = (agg.s1_hat - agg.s0_hat) / static_cast<double>(n);
  return result;
}

ErrorBound ErrorBoundLabel(const Dataset& dataset,
                           const SortedMatrices& matrices, int neighbors, int k,
                           double outcome_range, double eps) {
  TreatmentView view;
  view.bits.assign(dataset.treatment().begin(), dataset.treatment().end());
  view.counts = dataset.counts();
  const Counterfactuals uncapped = CappedCounterfactuals(
      dataset.outcomes(), matrices, view, UnlimitedPlan(neighbors));

  ErrorBound out;
  double bias = 0.0;
  for (std::uint8_t group : {0, 1}) {
    const std::int64_t per_row = EffectiveNeighbors(
        neighbors, group != 0 ? view.counts.treated : view.counts.control);
    const std::int64_t cap = static_cast<std::int64_t>(k) * per_row;
    std::int64_t replaced = 0;
    for (std::size_t j = 0; j < view.bits.size(); ++j) {
      if (view.bits[j] != group) continue;
      replaced += std::max<std::int64_t>(0, uncapped.match_counts[j] - cap);
    }
    out.replacements += replaced;
    bias += static_cast<double>(replaced) * outcome_range /
            static_cast<double>(per_row);
  }
  const double noise = (k + 1) * outcome_range / eps;
  out.variance_term = 2.0 * noise * noise;
  out.bias_term = bias * bias;
  out.bound = out.variance_term + out.bias_term;
  return out;
}

}  // namespace dpate
