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

// Causal effect estimation: adaptive matching limits, capped
// nearest-neighbour counterfactuals, noisy outcome sums and the ATE.

#ifndef DPATE_ESTIMATION_H_
#define DPATE_ESTIMATION_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dpate/dataset.h"
#include "dpate/ledger.h"
#include "dpate/matching.h"
#include "dpate/noise.h"

namespace dpate {

enum class LimitMode {
  // Limits from the noise/bias trade-off.
  kAdaptive,
  // k1 = k2 = fixed_k.
  kFixed,
  // No caps at all. Only valid with noise disabled: the sensitivity is
  // unbounded.
  kUnlimited,
};

struct MatchConfig {
  // Neighbours averaged per counterfactual (N).
  int neighbors = 5;
  // Error coefficient: c for label-level, h for sample-level.
  double error_coeff = 0.01;
  LimitMode limit_mode = LimitMode::kAdaptive;
  int fixed_k = 1;
  // Count the maximum appearance M only within the group whose limit is
  // derived first, instead of jointly over both groups.
  bool per_group_max = false;
};

// Defaults from the reference experiments: c = 0.01 and h = 0.001.
inline constexpr double kDefaultLabelCoeff = 0.01;
inline constexpr double kDefaultSampleCoeff = 0.001;

struct MatchCount {
  // Largest number of rows listing one sample among their first N entries.
  int m_max = 0;
  double m1 = 0.0;  // m_max / N
  int m_treated = 0;
  int m_control = 0;
};

MatchCount CountMaxMatches(const SortedMatrices& matrices, int neighbors);

struct LimitValue {
  double k_star = 0.0;
  int k_f = 1;
};

// k* = sqrt(eps c n1 M1 / 2), k_f = min(max(round(k*), 1), ceil(M1)).
LimitValue MatchingLimitLabel(double eps, double coeff, std::size_t n1,
                              double m1);

// k* = sqrt(eps3 h n1' M1' / 2), k_f = max(round(k*), 1). Inputs must come
// from perturbed quantities only.
LimitValue MatchingLimitSample(double eps, double coeff, std::size_t n1,
                               double m1);

// Derives (k1, k2) from k_f and the group ratio r1 = n_t / n_c.
// Errors: DegenerateGroups.
absl::StatusOr<std::pair<int, int>> PairLimits(int k_f,
                                               const GroupCounts& counts);

// Round half away from zero.
int RoundLimit(double x);

// Neighbours actually averaged per row: N, or the candidate group size when
// that group is smaller.
std::int64_t EffectiveNeighbors(int neighbors, std::size_t group_size);

struct MatchPlan {
  int k_treated = 1;  // k1
  int k_control = 1;  // k2
  double k_star = 0.0;
  int k_f = 1;
  int m_max = 0;
  double m1 = 0.0;
  double r1 = 0.0;
  std::size_t n1 = 0;
  int neighbors = 1;
  // Per-candidate usage caps k * N. Max value when unlimited.
  std::int64_t cap_treated = 0;
  std::int64_t cap_control = 0;
  bool unlimited = false;
  LimitMode mode = LimitMode::kAdaptive;
};

// Statistics and limits for phase 3. `eps` is the whole budget for
// label-level and eps_3 for sample-level; `counts` must describe the same
// treatment view the matrices were built from.
absl::StatusOr<MatchPlan> PlanMatching(PrivacyLevel level, double eps,
                                       const MatchConfig& config,
                                       const SortedMatrices& matrices,
                                       const GroupCounts& counts);

// A plan with caps disabled.
MatchPlan UnlimitedPlan(int neighbors);

struct Counterfactuals {
  std::vector<double> y1;
  std::vector<double> y0;
  // Times each sample was used as a neighbour.
  std::vector<std::int64_t> match_counts;
  // Samples whose row had no uncapped candidate left; they fell back to the
  // nearest N regardless of caps, so the sensitivity bound no longer holds.
  int exhausted = 0;
  // Samples that found fewer than N uncapped candidates.
  int short_rows = 0;
};

// Walks samples in index order; each takes the first N candidates in its
// row whose counter is below the group cap.
Counterfactuals CappedCounterfactuals(std::span<const double> outcomes,
                                      const SortedMatrices& matrices,
                                      const TreatmentView& treatment,
                                      const MatchPlan& plan);

struct AggregatedOutcomes {
  double s1 = 0.0;
  double s0 = 0.0;
  double s1_hat = 0.0;
  double s0_hat = 0.0;
  // (k1 + 1) B and (k2 + 1) B.
  double sens1 = 0.0;
  double sens0 = 0.0;
  double scale1 = 0.0;
  double scale0 = 0.0;
};

// Laplace-perturbed outcome sums. The two sums cover disjoint samples and
// share eps; one sequential phase-3 entry is recorded.
// Errors: NonPositiveBudget, UnboundedSensitivity, BudgetExceeded.
absl::StatusOr<AggregatedOutcomes> AggregateAndPerturb(
    std::span<const double> y1, std::span<const double> y0,
    double outcome_range, const MatchPlan& plan, double eps, NoiseSource& rng,
    BudgetLedger& ledger);

struct AteResult {
  double tau_hat = 0.0;
  double s1_hat = 0.0;
  double s0_hat = 0.0;
  std::size_t n = 0;
  BudgetSplit budgets;
  MatchPlan plan;
  PrivacyLevel level = PrivacyLevel::kLabelLevel;
  std::uint64_t seed = 0;
  bool tainted = false;
  std::vector<std::string> flags;
};

// tau = (S1_hat - S0_hat) / n.
AteResult AteFromSums(const AggregatedOutcomes& agg, std::size_t n);

struct ErrorBound {
  double bound = 0.0;
  double variance_term = 0.0;
  double bias_term = 0.0;
  // Neighbour replacements caused by the cap: sum_j max(0, u_j - k N).
  std::int64_t replacements = 0;
};

// Diagnostic bound on the expected squared error of an outcome sum under
// label-level privacy: 2((k+1)B/eps)^2 + (R B / N)^2.
ErrorBound ErrorBoundLabel(const Dataset& dataset,
                           const SortedMatrices& matrices, int neighbors, int k,
                           double outcome_range, double eps);

}  // namespace dpate

#endif  // DPATE_ESTIMATION_H_
