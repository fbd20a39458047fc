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

#ifndef DPATE_DATA_IO_H_
#define DPATE_DATA_IO_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dpate/dataset.h"

namespace dpate {

// Column mapping for CSV input. An empty covariate list means "every column
// that is neither the treatment nor the outcome", in file order.
struct CsvSchema {
  std::string treatment_column;
  std::string outcome_column;
  std::vector<std::string> covariate_columns;
};

// Parses "t,y[,x1,x2,...]": treatment column, outcome column, then optional
// covariate columns.
absl::StatusOr<CsvSchema> ParseSchema(std::string_view spec);

// Comma-separated, header row first, '.' decimal point, no quoting.
// Errors: ParseError (with row and column), SchemaError, and the
// validation errors of Validate().
absl::StatusOr<Dataset> ParseCsv(std::string_view text, const CsvSchema& schema,
                                 double outcome_range);
absl::StatusOr<Dataset> LoadCsv(const std::string& path,
                                const CsvSchema& schema, double outcome_range);

// Header "t,y,x1..xd"; values printed with round-trip precision.
std::string DatasetToCsv(const Dataset& dataset);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, std::string_view contents);

// Synthetic observational data with a known effect.
//
//   X_i ~ U(0,1)^d
//   e_i = sigmoid(a * (2 mean(X_i) - 1)),   a ~ U(bias_lo, bias_hi)
//   T_i ~ Bernoulli(e_i)
//   Y_i = b . X_i + tau T_i + q_i,          b ~ U(0,1)^d, q_i ~ U(-q, q)
struct SynthParams {
  std::size_t n = 1000;
  std::size_t d = 20;
  double tau = 0.5;
  double bias_lo = 0.0;
  double bias_hi = 3.0;
  double coeff_lo = 0.0;
  double coeff_hi = 1.0;
  double noise = 0.1;
  std::uint64_t seed = 0;
  // Overrides for the drawn parameters; used by tests (e.g. a = 0).
  bool fix_bias = false;
  double bias = 0.0;
};

struct SynthData {
  Dataset dataset;
  double true_tau = 0.0;
  // Outcome span of the generated data, for use as the public range B.
  double outcome_range = 0.0;
  double bias = 0.0;
  std::vector<double> coeffs;
  std::vector<double> propensity;
};

absl::StatusOr<SynthData> GenerateSynth(const SynthParams& params);

// Sidecar JSON: {true_tau, params, seed, B}.
std::string SynthSidecarJson(const SynthParams& params, const SynthData& data);

}  // namespace dpate

#endif  // DPATE_DATA_IO_H_
