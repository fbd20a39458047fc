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

#ifndef DPATE_PROPENSITY_H_
#define DPATE_PROPENSITY_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dpate/dataset.h"
#include "dpate/ledger.h"
#include "dpate/noise.h"

namespace dpate {

struct TrainOptions {
  // l2 penalty. Larger values shrink the weight sensitivity 2d/(n*lambda)
  // at the cost of a more biased propensity model.
  double lambda = 1.0;
  // Stop once the gradient infinity-norm drops to this value.
  double tolerance = 1e-8;
  int max_iterations = 10000;
  // Appends a constant-1 covariate; the sensitivity then uses d + 1.
  bool fit_intercept = false;
};

// l2-regularized logistic regression of treatment on covariates.
struct LogisticModel {
  std::vector<double> weights;
  double lambda = 1.0;
  bool fit_intercept = false;
  int trained_iterations = 0;
  double final_loss = 0.0;
  double gradient_norm = 0.0;
  // False when max_iterations was reached first. Not an error: the weights
  // are still usable and noise is added on top in the private path.
  bool converged = true;

  // Number of coefficients, including the intercept if present.
  std::size_t dimension() const { return weights.size(); }
};

struct PropensityScores {
  std::vector<double> scores;
  bool perturbed = false;
};

// J(w) = (1/n) sum log(1 + exp(-x_i.w * t_i)) + (lambda/2)|w|^2 with
// t_i = 2 T_i - 1. Errors: DimensionMismatch.
absl::StatusOr<double> Loss(const LogisticModel& model, const Dataset& dataset);

// Analytic gradient of Loss. Errors: DimensionMismatch.
absl::StatusOr<std::vector<double>> Gradient(const LogisticModel& model,
                                             const Dataset& dataset);

// Deterministic gradient descent with backtracking line search from w = 0.
absl::StatusOr<LogisticModel> Train(const Dataset& dataset,
                                    const TrainOptions& options = {});

// L1 sensitivity of the trained weights under one-record changes:
// 2 d / (n lambda).
double WeightSensitivity(std::size_t n, std::size_t d, double lambda);

// Adds Laplace(WeightSensitivity / eps) to every coordinate and records a
// sequential phase-1a entry. Errors: NonPositiveBudget, BudgetExceeded.
absl::StatusOr<LogisticModel> PrivatizeWeights(const LogisticModel& model,
                                               std::size_t n, double eps,
                                               NoiseSource& rng,
                                               BudgetLedger& ledger);

// sigmoid(x_i . w) for every row.
absl::StatusOr<PropensityScores> Score(const LogisticModel& model,
                                       const Dataset& dataset);

// Per-record Laplace(1 / eps) noise followed by clipping to [0,1]. Records
// act on disjoint samples, so the ledger gets one parallel phase-1b entry.
absl::StatusOr<PropensityScores> PrivatizeScores(const PropensityScores& scores,
                                                 double eps, NoiseSource& rng,
                                                 BudgetLedger& ledger);

double Sigmoid(double z);

// Plain-text model export: line 1 is lambda, line 2 the comma-separated
// weights.
std::string ExportModel(const LogisticModel& model);
absl::StatusOr<LogisticModel> ImportModel(std::string_view text);

}  // namespace dpate

#endif  // DPATE_PROPENSITY_H_
