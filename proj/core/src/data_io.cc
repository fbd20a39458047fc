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

#include "dpate/data_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "dpate/noise.h"
#include "dpate/propensity.h"
#include "dpate/status.h"
#include "fmt/format.h"
#include "json.hpp"
#include "text.h"

namespace dpate {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields = text::Split(line, ',');
  for (std::string_view& f : fields) f = text::Trim(f);
  return fields;
}

absl::StatusOr<std::size_t> FindColumn(
    const std::vector<std::string_view>& header, std::string_view name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    return DataError(errors::kSchemaError,
                     fmt::format("column '{}' not found in header", name));
  }
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

absl::StatusOr<CsvSchema> ParseSchema(std::string_view spec) {
  std::vector<std::string_view> parts = SplitFields(spec);
  if (parts.size() < 2 || parts[0].empty() || parts[1].empty()) {
    return DataError(errors::kSchemaError,
                     fmt::format("schema '{}' must name at least the "
                                 "treatment and outcome columns",
                                 spec));
  }
  CsvSchema schema;
  schema.treatment_column = std::string(parts[0]);
  schema.outcome_column = std::string(parts[1]);
  for (std::size_t i = 2; i < parts.size(); ++i) {
    if (parts[i].empty()) {
      return DataError(errors::kSchemaError, "empty covariate column name");
    }
    schema.covariate_columns.emplace_back(parts[i]);
  }
  return schema;
}

absl::StatusOr<Dataset> ParseCsv(std::string_view text, const CsvSchema& schema,
                                 double outcome_range) {
  std::vector<std::string_view> lines = text::Split(text, '\n');
  // Tolerate CRLF and a trailing newline.
  for (std::string_view& l : lines) l = text::StripSuffix(l, "\r");
  while (!lines.empty() && text::Trim(lines.back()).empty()) {
    lines.pop_back();
  }
  if (lines.empty()) {
    return DataError(errors::kEmptyDataset, "CSV input has no header");
  }
  const std::vector<std::string_view> header = SplitFields(lines[0]);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (std::count(header.begin(), header.end(), header[i]) > 1) {
      return DataError(errors::kSchemaError,
                       fmt::format("duplicate column '{}'", header[i]));
    }
  }

  absl::StatusOr<std::size_t> t_col =
      FindColumn(header, schema.treatment_column);
  if (!t_col.ok()) return t_col.status();
  absl::StatusOr<std::size_t> y_col = FindColumn(header, schema.outcome_column);
  if (!y_col.ok()) return y_col.status();
  if (*t_col == *y_col) {
    return DataError(errors::kSchemaError,
                     "treatment and outcome must be different columns");
  }
  std::vector<std::size_t> x_cols;
  if (schema.covariate_columns.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != *t_col && c != *y_col) x_cols.push_back(c);
    }
  } else {
    for (const std::string& name : schema.covariate_columns) {
      absl::StatusOr<std::size_t> c = FindColumn(header, name);
      if (!c.ok()) return c.status();
      if (*c == *t_col || *c == *y_col) {
        return DataError(errors::kSchemaError,
                         fmt::format("column '{}' cannot be both a "
                                     "covariate and treatment/outcome",
                                     name));
      }
      x_cols.push_back(*c);
    }
  }
  if (x_cols.empty()) {
    return DataError(errors::kSchemaError, "no covariate columns");
  }

  RawDataset raw;
  raw.dimension = x_cols.size();
  for (std::size_t line_no = 1; line_no < lines.size(); ++line_no) {
    const std::vector<std::string_view> fields = SplitFields(lines[line_no]);
    // Line numbers are 1-based and count the header.
    const std::size_t row = line_no + 1;
    if (fields.size() != header.size()) {
      return DataError(errors::kParseError,
                       fmt::format("row {}: expected {} fields, got {}", row,
                                   header.size(), fields.size()));
    }
    const std::string_view t_field = fields[*t_col];
    double t = 0.0;
    if (!text::ParseDouble(t_field, &t) || (t != 0.0 && t != 1.0)) {
      return DataError(
          errors::kParseError,
          fmt::format("row {} column '{}': treatment '{}' is not 0 or 1", row,
                      schema.treatment_column, t_field));
    }
    raw.treatment.push_back(t == 1.0 ? 1 : 0);

    double y = 0.0;
    if (!text::ParseDouble(fields[*y_col], &y) || !std::isfinite(y)) {
      return DataError(errors::kParseError,
                       fmt::format("row {} column '{}': bad outcome '{}'", row,
                                   schema.outcome_column, fields[*y_col]));
    }
    raw.outcomes.push_back(y);

    for (std::size_t c : x_cols) {
      double x = 0.0;
      if (!text::ParseDouble(fields[c], &x) || std::isnan(x)) {
        return DataError(errors::kParseError,
                         fmt::format("row {} column '{}': bad covariate "
                                     "'{}'",
                                     row, header[c], fields[c]));
      }
      raw.covariates.push_back(x);
    }
  }
  return Validate(std::move(raw), outcome_range);
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(fmt::format("cannot open '{}'", path));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::Status WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(fmt::format("cannot write '{}'", path));
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) {
    return absl::DataLossError(fmt::format("short write to '{}'", path));
  }
  return absl::OkStatus();
}

absl::StatusOr<Dataset> LoadCsv(const std::string& path,
                                const CsvSchema& schema, double outcome_range) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  return ParseCsv(*text, schema, outcome_range);
}

std::string DatasetToCsv(const Dataset& dataset) {
  std::string out = "t,y";
  for (std::size_t j = 0; j < dataset.dimension(); ++j) {
    fmt::format_to(std::back_inserter(out), ",x{}", j + 1);
  }
  out += "\n";
  const auto t = dataset.treatment();
  const auto y = dataset.outcomes();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    fmt::format_to(std::back_inserter(out), "{},{:.17g}", t[i], y[i]);
    for (double x : dataset.row(i))
      fmt::format_to(std::back_inserter(out), ",{:.17g}", x);
    out += "\n";
  }
  return out;
}

absl::StatusOr<SynthData> GenerateSynth(const SynthParams& params) {
  if (params.n < 2 || params.d < 1) {
    return absl::InvalidArgumentError("synth needs n >= 2 and d >= 1");
  }
  if (!(params.bias_lo <= params.bias_hi) ||
      !(params.coeff_lo <= params.coeff_hi) || !(params.noise >= 0.0)) {
    return absl::InvalidArgumentError("invalid synth distribution bounds");
  }
  NoiseSource rng(params.seed, Stream::kSynth);
  const double bias = params.fix_bias
                          ? params.bias
                          : rng.Uniform(params.bias_lo, params.bias_hi);
  std::vector<double> coeffs(params.d);
  for (double& b : coeffs) b = rng.Uniform(params.coeff_lo, params.coeff_hi);

  RawDataset raw;
  raw.dimension = params.d;
  raw.covariates.resize(params.n * params.d);
  raw.treatment.resize(params.n);
  raw.outcomes.resize(params.n);
  std::vector<double> propensity(params.n);
  for (std::size_t i = 0; i < params.n; ++i) {
    double mean = 0.0;
    double linear = 0.0;
    for (std::size_t j = 0; j < params.d; ++j) {
      const double x = rng.Uniform(0.0, 1.0);
      raw.covariates[i * params.d + j] = x;
      mean += x;
      linear += coeffs[j] * x;
    }
    mean /= static_cast<double>(params.d);
    propensity[i] = Sigmoid(bias * (2.0 * mean - 1.0));
    raw.treatment[i] = rng.Uniform() < propensity[i] ? 1 : 0;
    const double q = rng.Uniform(-params.noise, params.noise);
    raw.outcomes[i] = linear + params.tau * raw.treatment[i] + q;
  }
  const auto [lo, hi] =
      std::minmax_element(raw.outcomes.begin(), raw.outcomes.end());
  const double span = *hi - *lo;
  absl::StatusOr<Dataset> dataset =
      Validate(std::move(raw), span > 0.0 ? span : 1.0);
  if (!dataset.ok()) return dataset.status();
  return SynthData{.dataset = *std::move(dataset),
                   .true_tau = params.tau,
                   .outcome_range = span > 0.0 ? span : 1.0,
                   .bias = bias,
                   .coeffs = std::move(coeffs),
                   .propensity = std::move(propensity)};
}

std::string SynthSidecarJson(const SynthParams& params, const SynthData& data) {
  nlohmann::ordered_json j{
      {"true_tau", data.true_tau},
      {"params",
       {{"n", params.n},
        {"d", params.d},
        {"tau", params.tau},
        {"bias", data.bias},
        {"bias_range", {params.bias_lo, params.bias_hi}},
        {"coeffs", data.coeffs},
        {"coeff_range", {params.coeff_lo, params.coeff_hi}},
        {"noise", params.noise},
        {"treated", data.dataset.counts().treated},
        {"control", data.dataset.counts().control}}},
      {"seed", params.seed},
      {"B", data.outcome_range}};
  return j.dump(2) + "\n";
}

}  // namespace dpate
