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

#include "dpate/propensity.h"

#include <algorithm>
#include <cmath>

#include "dpate/status.h"
#include "fmt/format.h"
#include "fmt/ranges.h"
#include "text.h"

namespace dpate {
namespace {

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

double Margin(const LogisticModel& model, std::span<const double> x) {
  double z = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) z += x[j] * model.weights[j];
  if (model.fit_intercept) z += model.weights[x.size()];
  return z;
}

absl::Status CheckDimension(const LogisticModel& model,
                            const Dataset& dataset) {
  const std::size_t expected =
      dataset.dimension() + (model.fit_intercept ? 1 : 0);
  if (model.weights.size() != expected) {
    return DataError(errors::kDimensionMismatch,
                     fmt::format("model has {} weights, data needs {}",
                                 model.weights.size(), expected));
  }
  return absl::OkStatus();
}

double SignedLabel(std::uint8_t t) { return t != 0 ? 1.0 : -1.0; }

double SquaredNorm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double InfinityNorm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// Unchecked loss/gradient used inside the optimizer.
double LossUnchecked(const LogisticModel& model, const Dataset& dataset) {
  const std::size_t n = dataset.size();
  const auto treatment = dataset.treatment();
  double data_term = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = Margin(model, dataset.row(i)) * SignedLabel(treatment[i]);
    data_term += Softplus(-m);
  }
  return data_term / static_cast<double>(n) +
         0.5 * model.lambda * SquaredNorm(model.weights);
}

std::vector<double> GradientUnchecked(const LogisticModel& model,
                                      const Dataset& dataset) {
  const std::size_t n = dataset.size();
  const std::size_t d = dataset.dimension();
  const auto treatment = dataset.treatment();
  std::vector<double> grad(model.weights.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = dataset.row(i);
    const double t = SignedLabel(treatment[i]);
    // d/dz log(1 + exp(-z t)) = -t * sigmoid(-z t)
    const double coeff = -t * Sigmoid(-Margin(model, x) * t);
    for (std::size_t j = 0; j < d; ++j) grad[j] += coeff * x[j];
    if (model.fit_intercept) grad[d] += coeff;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < grad.size(); ++j) {
    grad[j] = grad[j] * inv_n + model.lambda * model.weights[j];
  }
  return grad;
}

}  // namespace

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

absl::StatusOr<double> Loss(const LogisticModel& model,
                            const Dataset& dataset) {
  if (absl::Status s = CheckDimension(model, dataset); !s.ok()) return s;
  return LossUnchecked(model, dataset);
}

absl::StatusOr<std::vector<double>> Gradient(const LogisticModel& model,
                                             const Dataset& dataset) {
  if (absl::Status s = CheckDimension(model, dataset); !s.ok()) return s;
  return GradientUnchecked(model, dataset);
}

absl::StatusOr<LogisticModel> Train(const Dataset& dataset,
                                    const TrainOptions& options) {
  if (!(options.lambda > 0.0)) {
    return absl::InvalidArgumentError(
        fmt::format("lambda must be positive, got {:g}", options.lambda));
  }
  if (options.max_iterations < 0 || !(options.tolerance >= 0.0)) {
    return absl::InvalidArgumentError("invalid optimizer options");
  }
  LogisticModel model;
  model.lambda = options.lambda;
  model.fit_intercept = options.fit_intercept;
  model.weights.assign(dataset.dimension() + (options.fit_intercept ? 1 : 0),
                       0.0);

  // Upper bound on the gradient's Lipschitz constant. A step of 1/L always
  // satisfies the sufficient-decrease condition, so it is the floor for the
  // backtracking search and keeps the iteration from stalling once the
  // decrease falls below floating-point resolution.
  double row_norms = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    row_norms += SquaredNorm(dataset.row(i)) + (options.fit_intercept ? 1 : 0);
  }
  const double lipschitz =
      options.lambda + 0.25 * row_norms / static_cast<double>(dataset.size());
  const double min_step = 1.0 / lipschitz;

  double loss = LossUnchecked(model, dataset);
  std::vector<double> grad = GradientUnchecked(model, dataset);
  double step = min_step;
  int iter = 0;
  LogisticModel trial = model;
  while (InfinityNorm(grad) > options.tolerance &&
         iter < options.max_iterations) {
    const double grad_sq = SquaredNorm(grad);
    step *= 2.0;
    double trial_loss = 0.0;
    while (true) {
      if (step <= min_step) step = min_step;
      for (std::size_t j = 0; j < grad.size(); ++j) {
        trial.weights[j] = model.weights[j] - step * grad[j];
      }
      trial_loss = LossUnchecked(trial, dataset);
      if (step == min_step || trial_loss <= loss - 0.5 * step * grad_sq) {
        break;
      }
      step *= 0.5;
    }
    model.weights.swap(trial.weights);
    loss = trial_loss;
    grad = GradientUnchecked(model, dataset);
    ++iter;
  }
  model.trained_iterations = iter;
  model.final_loss = loss;
  model.gradient_norm = InfinityNorm(grad);
  model.converged = model.gradient_norm <= options.tolerance;
  return model;
}

double WeightSensitivity(std::size_t n, std::size_t d, double lambda) {
  return 2.0 * static_cast<double>(d) / (static_cast<double>(n) * lambda);
}

absl::StatusOr<LogisticModel> PrivatizeWeights(const LogisticModel& model,
                                               std::size_t n, double eps,
                                               NoiseSource& rng,
                                               BudgetLedger& ledger) {
  const double sensitivity =
      WeightSensitivity(n, model.dimension(), model.lambda);
  absl::StatusOr<std::vector<double>> noisy =
      LaplacePerturbVector(model.weights, sensitivity, eps, rng);
  if (!noisy.ok()) return noisy.status();
  if (rng.disabled()) ledger.MarkTainted();
  if (absl::Status s =
          ledger.Record(phase::kWeights, eps, Composition::kSequential);
      !s.ok()) {
    return s;
  }
  LogisticModel out = model;
  out.weights = *std::move(noisy);
  return out;
}

absl::StatusOr<PropensityScores> Score(const LogisticModel& model,
                                       const Dataset& dataset) {
  if (absl::Status s = CheckDimension(model, dataset); !s.ok()) return s;
  PropensityScores out;
  out.scores.resize(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out.scores[i] = Sigmoid(Margin(model, dataset.row(i)));
  }
  return out;
}

absl::StatusOr<PropensityScores> PrivatizeScores(const PropensityScores& scores,
                                                 double eps, NoiseSource& rng,
                                                 BudgetLedger& ledger) {
  // Scores live in [0,1], so one record moves its own score by at most 1.
  constexpr double kScoreSensitivity = 1.0;
  absl::StatusOr<std::vector<double>> noisy =
      LaplacePerturbVector(scores.scores, kScoreSensitivity, eps, rng);
  if (!noisy.ok()) return noisy.status();
  if (rng.disabled()) ledger.MarkTainted();
  if (absl::Status s =
          ledger.Record(phase::kScores, eps, Composition::kParallel);
      !s.ok()) {
    return s;
  }
  PropensityScores out;
  out.scores = *std::move(noisy);
  for (double& s : out.scores) s = std::clamp(s, 0.0, 1.0);
  out.perturbed = true;
  return out;
}

std::string ExportModel(const LogisticModel& model) {
  std::string out = fmt::format("{:.17g}\n", model.lambda);
  out += fmt::format("{:.17g}", fmt::join(model.weights, ","));
  out += "\n";
  return out;
}

absl::StatusOr<LogisticModel> ImportModel(std::string_view text) {
  std::vector<std::string_view> lines = text::Split(text, '\n', true);
  if (lines.size() != 2) {
    return DataError(errors::kParseError,
                     "model file must have exactly two lines");
  }
  LogisticModel model;
  if (!text::ParseDouble(text::Trim(lines[0]), &model.lambda) ||
      !(model.lambda > 0.0)) {
    return DataError(errors::kParseError, "line 1: lambda must be positive");
  }
  for (std::string_view field : text::Split(lines[1], ',')) {
    double w = 0.0;
    if (!text::ParseDouble(text::Trim(field), &w) || !std::isfinite(w)) {
      return DataError(errors::kParseError,
                       fmt::format("line 2: bad weight '{}'", field));
    }
    model.weights.push_back(w);
  }
  return model;
}

}  // namespace dpate
