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

#include "dpate/pipeline.h"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "dpate/matching.h"
#include "dpate/noise.h"
#include "dpate/status.h"
#include "fmt/format.h"
#include "json.hpp"

namespace dpate {
namespace {

using json = nlohmann::ordered_json;

NoiseSource SourceFor(const RunConfig& config, Stream stream) {
  return config.oracle_mode ? NoiseSource::Disabled()
                            : NoiseSource(config.seed, stream);
}

// Nudges `last` by a few ulps so that split.Sum() reproduces eps_total
// bit-for-bit; the ledger then balances without slack.
void BalanceLastComponent(BudgetSplit& split) {
  for (int i = 0; i < 8 && split.Sum() != split.eps_total; ++i) {
    const double target = split.Sum() < split.eps_total
                              ? std::numeric_limits<double>::infinity()
                              : -std::numeric_limits<double>::infinity();
    split.eps_outcomes = std::nextafter(split.eps_outcomes, target);
  }
}

json PlanJson(const MatchPlan& plan) {
  return json{{"k1", plan.k_treated},
              {"k2", plan.k_control},
              {"k_star", plan.k_star},
              {"k_f", plan.k_f},
              {"M", plan.m_max},
              {"M1", plan.m1},
              {"r1", plan.r1},
              {"n1", plan.n1},
              {"neighbors", plan.neighbors},
              {"unlimited", plan.unlimited}};
}

}  // namespace

std::string LimitModeName(const MatchConfig& match) {
  switch (match.limit_mode) {
    case LimitMode::kAdaptive:
      return "adaptive";
    case LimitMode::kFixed:
      return fmt::format("fixed-{}", match.fixed_k);
    case LimitMode::kUnlimited:
      return "unlimited";
  }
  return "unknown";
}

RunConfig DefaultConfig(PrivacyLevel level, double eps) {
  RunConfig config;
  config.level = level;
  config.eps_total = eps;
  config.match.error_coeff = level == PrivacyLevel::kLabelLevel
                                 ? kDefaultLabelCoeff
                                 : kDefaultSampleCoeff;
  return config;
}

absl::StatusOr<BudgetSplit> SplitBudget(const RunConfig& config) {
  const SplitRatios& r = config.ratios;
  if (!(r.phase1 >= 0.0 && r.phase2 >= 0.0 && r.phase3 >= 0.0) ||
      std::fabs(r.phase1 + r.phase2 + r.phase3 - 1.0) > 1e-9 ||
      !(config.phase1_weight_share >= 0.0 &&
        config.phase1_weight_share <= 1.0)) {
    return DataError(
        errors::kInvalidRatios,
        fmt::format("ratios {:g}:{:g}:{:g} (weight share {:g}) must be "
                    "non-negative and sum to 1",
                    r.phase1, r.phase2, r.phase3, config.phase1_weight_share));
  }
  if (!config.oracle_mode && !(config.eps_total > 0.0)) {
    return DataError(
        errors::kNonPositiveBudget,
        fmt::format("total budget must be > 0, got {:g}", config.eps_total));
  }
  BudgetSplit split;
  split.eps_total = config.eps_total;
  if (config.level == PrivacyLevel::kLabelLevel) {
    split.eps_outcomes = config.eps_total;
    return split;
  }
  const double phase1 = r.phase1 * config.eps_total;
  split.eps_weights = config.phase1_weight_share * phase1;
  split.eps_scores = (1.0 - config.phase1_weight_share) * phase1;
  split.eps_treatment = r.phase2 * config.eps_total;
  split.eps_outcomes = r.phase3 * config.eps_total;
  BalanceLastComponent(split);
  return split;
}

absl::StatusOr<RunOutput> Run(const Dataset& dataset, const RunConfig& config) {
  absl::StatusOr<BudgetSplit> split = SplitBudget(config);
  if (!split.ok()) return split.status();
  const bool sample_level = config.level == PrivacyLevel::kSampleLevel;

  RunOutput out;
  out.ledger = BudgetLedger(config.eps_total);
  BudgetLedger& ledger = out.ledger;
  if (config.oracle_mode) ledger.MarkTainted();

  // Phase 1: propensity model and scores.
  absl::StatusOr<LogisticModel> model = Train(dataset, config.train);
  if (!model.ok()) return model.status();
  if (sample_level) {
    NoiseSource rng = SourceFor(config, Stream::kWeights);
    model = PrivatizeWeights(*model, dataset.size(), split->eps_weights, rng,
                             ledger);
    if (!model.ok()) return model.status();
  }
  absl::StatusOr<PropensityScores> scores = Score(*model, dataset);
  if (!scores.ok()) return scores.status();
  if (sample_level) {
    NoiseSource rng = SourceFor(config, Stream::kScores);
    scores = PrivatizeScores(*scores, split->eps_scores, rng, ledger);
    if (!scores.ok()) return scores.status();
  }

  // Phase 2: treatment view and sorted candidate lists.
  NoiseSource treatment_rng = SourceFor(config, Stream::kTreatment);
  absl::StatusOr<TreatmentView> view =
      PerturbTreatment(dataset, config.level, split->eps_treatment,
                       treatment_rng, sample_level ? &ledger : nullptr);
  if (!view.ok()) return view.status();
  absl::StatusOr<SortedMatrices> matrices =
      BuildSortedMatrices(*scores, *view, &ledger);
  if (!matrices.ok()) return matrices.status();

  // Phase 3: limits, counterfactuals, noisy sums.
  absl::StatusOr<MatchPlan> plan = PlanMatching(
      config.level, split->eps_outcomes, config.match, *matrices, view->counts);
  if (!plan.ok()) return plan.status();
  ledger.RecordPostProcessing(phase::kMatchLimit);

  const Counterfactuals cf =
      CappedCounterfactuals(dataset.outcomes(), *matrices, *view, *plan);
  NoiseSource outcome_rng = SourceFor(config, Stream::kOutcomes);
  absl::StatusOr<AggregatedOutcomes> agg =
      AggregateAndPerturb(cf.y1, cf.y0, dataset.outcome_range(), *plan,
                          split->eps_outcomes, outcome_rng, ledger);
  if (!agg.ok()) return agg.status();

  out.result = AteFromSums(*agg, dataset.size());
  ledger.RecordPostProcessing(phase::kAte);

  if (!ledger.Balanced()) {
    return InternalError(errors::kLedgerViolation,
                         fmt::format("ledger total {:.17g} != eps {:.17g}",
                                     ledger.Total(), config.eps_total));
  }
  if (!sample_level && (ledger.CountEntries(Composition::kSequential) != 1 ||
                        ledger.CountEntries(Composition::kParallel) != 0)) {
    return InternalError(errors::kLedgerViolation,
                         "label-level run must spend through exactly one "
                         "sequential entry");
  }

  AteResult& result = out.result;
  result.budgets = *split;
  result.plan = *plan;
  result.level = config.level;
  result.seed = config.seed;
  result.tainted = ledger.tainted();
  if (config.oracle_mode) result.flags.push_back("oracle-mode");
  if (!model->converged) result.flags.push_back("model-not-converged");
  if (cf.exhausted > 0) {
    result.flags.push_back(
        fmt::format("exhausted-candidates:{}", cf.exhausted));
  }
  if (cf.short_rows > 0) {
    result.flags.push_back(fmt::format("short-rows:{}", cf.short_rows));
  }
  out.counts = view->counts;
  out.model = *std::move(model);
  return out;
}

absl::StatusOr<double> RunOraclePsm(const Dataset& dataset, int neighbors,
                                    const TrainOptions& train) {
  if (neighbors < 1) {
    return absl::InvalidArgumentError("number of neighbours must be >= 1");
  }
  const GroupCounts& counts = dataset.counts();
  if (counts.treated == 0 || counts.control == 0) {
    return DataError(errors::kDegenerateGroups, "oracle needs both groups");
  }
  absl::StatusOr<LogisticModel> model = Train(dataset, train);
  if (!model.ok()) return model.status();
  absl::StatusOr<PropensityScores> scores = Score(*model, dataset);
  if (!scores.ok()) return scores.status();

  // Direct O(n^2) search, deliberately not sharing the sorted-matrix code.
  const std::size_t n = dataset.size();
  const auto t = dataset.treatment();
  const auto y = dataset.outcomes();
  const auto& e = scores->scores;
  double s1 = 0.0;
  double s0 = 0.0;
  std::vector<std::pair<double, std::size_t>> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    candidates.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (t[j] != t[i]) candidates.emplace_back(std::fabs(e[i] - e[j]), j);
    }
    const std::size_t take =
        std::min(candidates.size(), static_cast<std::size_t>(neighbors));
    std::partial_sort(candidates.begin(), candidates.begin() + take,
                      candidates.end());
    double mean = 0.0;
    for (std::size_t k = 0; k < take; ++k) mean += y[candidates[k].second];
    mean /= static_cast<double>(take);
    if (t[i] != 0) {
      s1 += y[i];
      s0 += mean;
    } else {
      s1 += mean;
      s0 += y[i];
    }
  }
  return (s1 - s0) / static_cast<double>(n);
}

std::string AteResultJson(const AteResult& result) {
  json j{{"tau_hat", result.tau_hat},
         {"eps", result.budgets.eps_total},
         {"level", std::string(PrivacyLevelName(result.level))},
         {"k1", result.plan.k_treated},
         {"k2", result.plan.k_control},
         {"k_star", result.plan.k_star},
         {"M", result.plan.m_max},
         {"M1", result.plan.m1},
         {"seed", result.seed},
         {"flags", result.flags}};
  return j.dump();
}

std::string ProvenanceJson(const RunConfig& config, const RunOutput& output) {
  const AteResult& r = output.result;
  json ledger_entries = json::array();
  for (const LedgerEntry& e : output.ledger.entries()) {
    ledger_entries.push_back(
        json{{"phase", e.phase},
             {"kind", std::string(CompositionName(e.kind))},
             {"eps", e.eps}});
  }
  json doc{
      {"config",
       {{"level", std::string(PrivacyLevelName(config.level))},
        {"eps", config.eps_total},
        {"ratios",
         {config.ratios.phase1, config.ratios.phase2, config.ratios.phase3}},
        {"phase1_weight_share", config.phase1_weight_share},
        {"neighbors", config.match.neighbors},
        {"error_coeff", config.match.error_coeff},
        {"limit_mode", LimitModeName(config.match)},
        {"per_group_max", config.match.per_group_max},
        {"lambda", config.train.lambda},
        {"fit_intercept", config.train.fit_intercept},
        {"seed", config.seed},
        {"oracle_mode", config.oracle_mode}}},
      {"budgets",
       {{"eps_total", r.budgets.eps_total},
        {"eps_11", r.budgets.eps_weights},
        {"eps_12", r.budgets.eps_scores},
        {"eps_2", r.budgets.eps_treatment},
        {"eps_3", r.budgets.eps_outcomes}}},
      {"ledger",
       {{"entries", ledger_entries},
        {"total", output.ledger.Total()},
        {"tainted", output.ledger.tainted()}}},
      {"groups",
       {{"treated", output.counts.treated},
        {"control", output.counts.control},
        {"perturbed", output.counts.perturbed}}},
      {"plan", PlanJson(r.plan)},
      {"result",
       {{"tau_hat", r.tau_hat},
        {"s1_hat", r.s1_hat},
        {"s0_hat", r.s0_hat},
        {"n", r.n},
        {"tainted", r.tainted},
        {"flags", r.flags}}}};
  return doc.dump(2) + "\n";
}

}  // namespace dpate
