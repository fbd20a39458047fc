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

#include "dpate/noise.h"

#include <cmath>

#include "dpate/status.h"
#include "fmt/format.h"

namespace dpate {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

absl::Status CheckBudget(double eps) {
  if (!(eps > 0.0)) {
    return DataError(errors::kNonPositiveBudget,
                     fmt::format("privacy budget must be > 0, got {:g}", eps));
  }
  return absl::OkStatus();
}

absl::Status CheckSensitivity(double sensitivity) {
  if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
    return DataError(
        errors::kNonPositiveSensitivity,
        fmt::format("sensitivity must be positive and finite, got {:g}",
                    sensitivity));
  }
  return absl::OkStatus();
}

}  // namespace

NoiseSource::NoiseSource(std::uint64_t seed, std::uint64_t stream)
    : engine_(SplitMix64(SplitMix64(seed) ^ SplitMix64(~stream))),
      seed_(seed),
      stream_(stream) {}

NoiseSource NoiseSource::Disabled() {
  NoiseSource source;
  source.disabled_ = true;
  return source;
}

double NoiseSource::Uniform() {
  // 53 random mantissa bits, shifted by half an ulp so 0 is unreachable.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseSource::Uniform(double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53);
}

double SampleLaplace(double scale, NoiseSource& rng) {
  const double u = rng.Uniform() - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::fabs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

absl::StatusOr<LaplaceOutput> LaplacePerturb(double value, double sensitivity,
                                             double eps, NoiseSource& rng) {
  if (absl::Status s = CheckSensitivity(sensitivity); !s.ok()) return s;
  if (rng.disabled()) {
    return LaplaceOutput{.value = value, .scale = 0.0};
  }
  if (absl::Status s = CheckBudget(eps); !s.ok()) return s;
  const double scale = sensitivity / eps;
  return LaplaceOutput{.value = value + SampleLaplace(scale, rng),
                       .scale = scale};
}

absl::StatusOr<std::vector<double>> LaplacePerturbVector(
    std::span<const double> values, double sensitivity, double eps,
    NoiseSource& rng) {
  if (absl::Status s = CheckSensitivity(sensitivity); !s.ok()) return s;
  std::vector<double> out(values.begin(), values.end());
  if (rng.disabled()) return out;
  if (absl::Status s = CheckBudget(eps); !s.ok()) return s;
  const double scale = sensitivity / eps;
  for (double& v : out) v += SampleLaplace(scale, rng);
  return out;
}

double KeepProbability(double eps) {
  // e^eps / (e^eps + 1) written to stay finite for large eps.
  return 1.0 / (1.0 + std::exp(-eps));
}

absl::StatusOr<std::uint8_t> RandomizedResponse(std::uint8_t bit, double eps,
                                                NoiseSource& rng) {
  if (rng.disabled()) return bit;
  if (absl::Status s = CheckBudget(eps); !s.ok()) return s;
  const bool keep = rng.Uniform() < KeepProbability(eps);
  return keep ? bit : static_cast<std::uint8_t>(bit == 0 ? 1 : 0);
}

}  // namespace dpate
