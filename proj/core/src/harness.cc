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

#include "dpate/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>
#include <utility>

#include "dpate/status.h"
#include "fmt/format.h"
#include "text.h"

namespace dpate {
namespace {

constexpr std::string_view kResultsHeader =
    "cell_id,level,eps,limit_mode,trial,tau_hat,tau_oracle,re,seconds";

absl::Status SpecError(std::string_view key, std::string_view value) {
  return absl::InvalidArgumentError(
      fmt::format("sweep spec: bad value '{}' for key '{}'", value, key));
}

template <typename T, typename ParseFn>
absl::StatusOr<std::vector<T>> ParseList(std::string_view key,
                                         std::string_view value,
                                         ParseFn parse) {
  std::vector<T> out;
  for (std::string_view item : text::Split(value, ',', true)) {
    item = text::Trim(item);
    std::optional<T> parsed = parse(item);
    if (!parsed.has_value()) return SpecError(key, item);
    out.push_back(*parsed);
  }
  if (out.empty()) return SpecError(key, value);
  return out;
}

std::optional<double> ParseDouble(std::string_view s) {
  double v = 0.0;
  if (!text::ParseDouble(s, &v) || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

absl::StatusOr<double> RelativeError(double tau_hat, double tau_oracle) {
  if (tau_oracle == 0.0) {
    return DataError(errors::kZeroTrueEffect,
                     "relative error is undefined for a zero reference effect");
  }
  return std::fabs(tau_hat - tau_oracle) / std::fabs(tau_oracle);
}

std::string LimitSettingName(const LimitSetting& limit) {
  MatchConfig match;
  match.limit_mode = limit.mode;
  match.fixed_k = limit.fixed_k;
  return LimitModeName(match);
}

absl::StatusOr<LimitSetting> ParseLimitSetting(std::string_view name) {
  if (name == "adaptive") return LimitSetting{LimitMode::kAdaptive, 1};
  if (name == "unlimited") return LimitSetting{LimitMode::kUnlimited, 0};
  std::string_view k = name;
  if (text::ConsumePrefix(&k, "fixed-") || text::ConsumePrefix(&k, "fixed:")) {
    int value = 0;
    if (text::ParseInt(k, &value) && value >= 1) {
      return LimitSetting{LimitMode::kFixed, value};
    }
  }
  return absl::InvalidArgumentError(fmt::format(
      "unknown limit mode '{}' (adaptive|fixed-<k>|unlimited)", name));
}

absl::StatusOr<SweepSpec> ParseSweepSpec(std::string_view text) {
  SweepSpec spec;
  for (std::string_view line : text::Split(text, '\n')) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = text::Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      return absl::InvalidArgumentError(
          fmt::format("sweep spec: expected key=value, got '{}'", line));
    }
    const std::string_view key = text::Trim(line.substr(0, eq));
    const std::string_view value = text::Trim(line.substr(eq + 1));

    if (key == "eps") {
      auto v = ParseList<double>(key, value, [](std::string_view s) {
        std::optional<double> d = ParseDouble(s);
        return d.has_value() && *d > 0.0 ? d : std::nullopt;
      });
      if (!v.ok()) return v.status();
      spec.eps_grid = *std::move(v);
    } else if (key == "levels") {
      auto v = ParseList<PrivacyLevel>(
          key, value, [](std::string_view s) -> std::optional<PrivacyLevel> {
            absl::StatusOr<PrivacyLevel> l = ParsePrivacyLevel(s);
            if (!l.ok()) return std::nullopt;
            return *l;
          });
      if (!v.ok()) return v.status();
      spec.levels = *std::move(v);
    } else if (key == "limits") {
      auto v = ParseList<LimitSetting>(
          key, value, [](std::string_view s) -> std::optional<LimitSetting> {
            absl::StatusOr<LimitSetting> l = ParseLimitSetting(s);
            if (!l.ok()) return std::nullopt;
            return *l;
          });
      if (!v.ok()) return v.status();
      spec.limit_modes = *std::move(v);
    } else if (key == "coeffs") {
      auto v = ParseList<double>(key, value, [](std::string_view s) {
        std::optional<double> d = ParseDouble(s);
        return d.has_value() && *d > 0.0 ? d : std::nullopt;
      });
      if (!v.ok()) return v.status();
      spec.coeff_grid = *std::move(v);
    } else if (key == "allocs") {
      auto v = ParseList<SplitRatios>(
          key, value, [](std::string_view s) -> std::optional<SplitRatios> {
            std::vector<std::string_view> parts = text::Split(s, ':');
            if (parts.size() != 3) return std::nullopt;
            SplitRatios r;
            std::optional<double> a = ParseDouble(parts[0]);
            std::optional<double> b = ParseDouble(parts[1]);
            std::optional<double> c = ParseDouble(parts[2]);
            if (!a || !b || !c) return std::nullopt;
            r.phase1 = *a;
            r.phase2 = *b;
            r.phase3 = *c;
            return r;
          });
      if (!v.ok()) return v.status();
      spec.alloc_grid = *std::move(v);
    } else if (key == "trials" || key == "neighbors" || key == "threads") {
      int v = 0;
      if (!text::ParseInt(value, &v) || v < 1) return SpecError(key, value);
      if (key == "trials") spec.trials = v;
      if (key == "neighbors") spec.neighbors = v;
      if (key == "threads") spec.threads = v;
    } else if (key == "lambda") {
      std::optional<double> v = ParseDouble(value);
      if (!v || !(*v > 0.0)) return SpecError(key, value);
      spec.lambda = *v;
    } else if (key == "seed") {
      if (!text::ParseInt(value, &spec.seed_base)) {
        return SpecError(key, value);
      }
    } else if (key == "timing") {
      if (!text::ParseBool(value, &spec.record_time)) {
        return SpecError(key, value);
      }
    } else {
      return absl::InvalidArgumentError(
          fmt::format("sweep spec: unknown key '{}'", key));
    }
  }
  return spec;
}

std::vector<SweepCell> ExpandCells(const SweepSpec& spec) {
  std::vector<SweepCell> cells;
  for (PrivacyLevel level : spec.levels) {
    const std::vector<double> coeffs =
        spec.coeff_grid.empty()
            ? std::vector<double>{DefaultConfig(level, 1.0).match.error_coeff}
            : spec.coeff_grid;
    // Allocation ratios only matter when the budget is split.
    const std::vector<SplitRatios> allocs =
        level == PrivacyLevel::kSampleLevel && !spec.alloc_grid.empty()
            ? spec.alloc_grid
            : std::vector<SplitRatios>{SplitRatios{}};
    for (const LimitSetting& limit : spec.limit_modes) {
      for (double coeff : coeffs) {
        for (const SplitRatios& ratios : allocs) {
          for (double eps : spec.eps_grid) {
            SweepCell cell;
            cell.id = static_cast<int>(cells.size());
            cell.limit = limit;
            cell.config = DefaultConfig(level, eps);
            cell.config.ratios = ratios;
            cell.config.match.neighbors = spec.neighbors;
            cell.config.match.error_coeff = coeff;
            cell.config.match.limit_mode = limit.mode;
            cell.config.match.fixed_k = limit.fixed_k;
            cell.config.train.lambda = spec.lambda;
            cells.push_back(std::move(cell));
          }
        }
      }
    }
  }
  return cells;
}

std::vector<CellSummary> Summarize(const std::vector<SweepCell>& cells,
                                   const std::vector<TrialRecord>& records) {
  std::vector<CellSummary> summary;
  summary.reserve(cells.size());
  for (const SweepCell& cell : cells) {
    CellSummary s;
    s.cell_id = cell.id;
    s.level = cell.config.level;
    s.eps = cell.config.eps_total;
    s.limit_mode = LimitSettingName(cell.limit);
    s.coeff = cell.config.match.error_coeff;
    s.ratios = cell.config.ratios;
    double sum_re = 0.0;
    double sum_tau = 0.0;
    for (const TrialRecord& r : records) {
      if (r.cell_id != cell.id) continue;
      ++s.trials;
      sum_re += r.relative_error;
      sum_tau += r.tau_hat;
    }
    if (s.trials > 0) {
      s.mean_re = sum_re / s.trials;
      s.mean_tau_hat = sum_tau / s.trials;
    }
    if (s.trials > 1) {
      double ss = 0.0;
      for (const TrialRecord& r : records) {
        if (r.cell_id != cell.id) continue;
        ss += (r.relative_error - s.mean_re) * (r.relative_error - s.mean_re);
      }
      s.std_re = std::sqrt(ss / (s.trials - 1));
    }
    summary.push_back(std::move(s));
  }
  return summary;
}

absl::StatusOr<SweepResult> RunSweep(const Dataset& dataset,
                                     const SweepSpec& spec) {
  absl::StatusOr<double> oracle = RunOraclePsm(
      dataset, spec.neighbors, TrainOptions{.lambda = spec.lambda});
  if (!oracle.ok()) return oracle.status();
  return RunSweep(dataset, spec, *oracle);
}

absl::StatusOr<SweepResult> RunSweep(const Dataset& dataset,
                                     const SweepSpec& spec, double tau_oracle) {
  if (spec.trials < 1 || spec.eps_grid.empty() || spec.levels.empty() ||
      spec.limit_modes.empty()) {
    return absl::InvalidArgumentError(
        "sweep needs trials >= 1 and non-empty grids");
  }
  if (tau_oracle == 0.0) {
    return DataError(errors::kZeroTrueEffect,
                     "oracle effect is zero; relative error is undefined");
  }
  const std::vector<SweepCell> cells = ExpandCells(spec);
  const std::size_t total =
      cells.size() * static_cast<std::size_t>(spec.trials);

  SweepResult result;
  result.tau_oracle = tau_oracle;
  result.records.resize(total);
  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  absl::Status first_error;

  auto worker = [&]() {
    for (std::size_t job = next++; job < total; job = next++) {
      const SweepCell& cell = cells[job / spec.trials];
      const int trial = static_cast<int>(job % spec.trials);
      RunConfig config = cell.config;
      config.seed = spec.seed_base + static_cast<std::uint64_t>(trial);

      const auto start = std::chrono::steady_clock::now();
      absl::StatusOr<RunOutput> out = Run(dataset, config);
      const auto stop = std::chrono::steady_clock::now();
      if (!out.ok()) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (first_error.ok()) first_error = out.status();
        continue;
      }
      TrialRecord& r = result.records[job];
      r.cell_id = cell.id;
      r.level = config.level;
      r.eps = config.eps_total;
      r.limit_mode = LimitSettingName(cell.limit);
      r.trial = trial;
      r.tau_hat = out->result.tau_hat;
      r.tau_oracle = tau_oracle;
      r.relative_error = *RelativeError(r.tau_hat, tau_oracle);
      r.seconds = spec.record_time
                      ? std::chrono::duration<double>(stop - start).count()
                      : 0.0;
    }
  };

  const int threads = std::max(1, spec.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (!first_error.ok()) return first_error;
  result.summary = Summarize(cells, result.records);
  return result;
}

std::string ResultsToCsv(const std::vector<TrialRecord>& records) {
  std::string out(kResultsHeader);
  out += "\n";
  for (const TrialRecord& r : records) {
    fmt::format_to(std::back_inserter(out),
                   "{},{},{:.17g},{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                   r.cell_id, PrivacyLevelName(r.level), r.eps, r.limit_mode,
                   r.trial, r.tau_hat, r.tau_oracle, r.relative_error,
                   r.seconds);
  }
  return out;
}

absl::StatusOr<std::vector<TrialRecord>> ParseResultsCsv(
    std::string_view text) {
  std::vector<std::string_view> lines = text::Split(text, '\n', true);
  if (lines.empty() || lines[0] != kResultsHeader) {
    return DataError(errors::kParseError, "results CSV header mismatch");
  }
  std::vector<TrialRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string_view> f = text::Split(lines[i], ',');
    TrialRecord r;
    absl::StatusOr<PrivacyLevel> level =
        f.size() == 9 ? ParsePrivacyLevel(f[1])
                      : absl::StatusOr<PrivacyLevel>(
                            absl::InvalidArgumentError("field count"));
    if (!level.ok() || !text::ParseInt(f[0], &r.cell_id) ||
        !text::ParseDouble(f[2], &r.eps) || !text::ParseInt(f[4], &r.trial) ||
        !text::ParseDouble(f[5], &r.tau_hat) ||
        !text::ParseDouble(f[6], &r.tau_oracle) ||
        !text::ParseDouble(f[7], &r.relative_error) ||
        !text::ParseDouble(f[8], &r.seconds)) {
      return DataError(errors::kParseError,
                       fmt::format("results CSV row {} is malformed", i + 1));
    }
    r.level = *level;
    r.limit_mode = std::string(f[3]);
    records.push_back(std::move(r));
  }
  return records;
}

std::string SummaryToCsv(const std::vector<CellSummary>& summary) {
  std::string out =
      "cell_id,level,eps,limit_mode,coeff,r1,r2,r3,trials,mean_re,std_re,"
      "mean_tau_hat\n";
  for (const CellSummary& s : summary) {
    fmt::format_to(std::back_inserter(out),
                   "{},{},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g}"
                   ",{:.17g},{:.17g}\n",
                   s.cell_id, PrivacyLevelName(s.level), s.eps, s.limit_mode,
                   s.coeff, s.ratios.phase1, s.ratios.phase2, s.ratios.phase3,
                   s.trials, s.mean_re, s.std_re, s.mean_tau_hat);
  }
  return out;
}

}  // namespace dpate
